use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmat::{format_rational, Rational};

/// `Cl(p,q)`: `p` generators square to `+1`, the following `q` to `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CliffordSignature {
    pub p: usize,
    pub q: usize,
}

impl CliffordSignature {
    pub fn new(p: usize, q: usize) -> Self {
        assert!(p + q <= 31, "at most 31 generators are supported");
        CliffordSignature { p, q }
    }

    pub fn generators(&self) -> usize {
        self.p + self.q
    }

    /// Number of basis blades, `2^(p+q)`.
    pub fn dimension(&self) -> usize {
        1 << self.generators()
    }

    /// Square of the generator with 1-based index `i`.
    pub fn square(&self, i: usize) -> i32 {
        if i <= self.p {
            1
        } else {
            -1
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::SignatureMismatch(self.p, self.q, other.p, other.q));
        }
        Ok(())
    }
}

/// A basis blade `e_{i1} e_{i2} ... e_{ik}` with `i1 < i2 < ... < ik`,
/// stored as a bitmask (bit `i-1` for generator `i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Blade(pub u32);

impl Blade {
    pub const SCALAR: Blade = Blade(0);

    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        let mut last = 0;
        for &i in indices {
            if i == 0 || i > 31 || i <= last {
                return Err(Error::Parse(format!(
                    "blade indices must be strictly increasing in 1..=31, got {indices:?}"
                )));
            }
            mask |= 1 << (i - 1);
            last = i;
        }
        Ok(Blade(mask))
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..32)
            .filter(|b| self.0 >> b & 1 == 1)
            .map(|b| b + 1)
            .collect()
    }

    pub fn grade(&self) -> u32 {
        self.0.count_ones()
    }

    /// Product of two blades as `(sign, blade)`.
    pub fn mul(self, other: Blade, sig: &CliffordSignature) -> (i32, Blade) {
        // moving each generator of `other` left past the larger ones of `self`
        let mut swaps = 0;
        let mut rest = other.0;
        while rest != 0 {
            let bit = rest.trailing_zeros();
            swaps += (self.0 >> (bit + 1)).count_ones();
            rest &= rest - 1;
        }
        let mut sign = if swaps % 2 == 0 { 1 } else { -1 };
        let mut common = self.0 & other.0;
        while common != 0 {
            let bit = common.trailing_zeros() as usize;
            sign *= sig.square(bit + 1);
            common &= common - 1;
        }
        (sign, Blade(self.0 ^ other.0))
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let names: Vec<String> = self.indices().iter().map(|i| format!("e{i}")).collect();
        write!(f, "{}", names.join(""))
    }
}

/// Element of `Cl(p,q)` over ℚ as a sparse blade expansion.
#[derive(Clone, PartialEq, Eq)]
pub struct CliffordElement {
    signature: CliffordSignature,
    coefficients: BTreeMap<Blade, Rational>,
}

impl CliffordElement {
    pub fn zero(signature: CliffordSignature) -> Self {
        CliffordElement {
            signature,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn scalar(signature: CliffordSignature, value: Rational) -> Self {
        Self::from_blade(signature, Blade::SCALAR, value)
    }

    pub fn one(signature: CliffordSignature) -> Self {
        Self::scalar(signature, Rational::one())
    }

    /// The generator `e_i` (1-based).
    pub fn generator(signature: CliffordSignature, i: usize) -> Result<Self> {
        Self::blade(signature, &[i], Rational::one())
    }

    /// `c · e_{i1}...e_{ik}` for strictly increasing indices.
    pub fn blade(signature: CliffordSignature, indices: &[usize], c: Rational) -> Result<Self> {
        if let Some(&i) = indices.iter().find(|&&i| i > signature.generators()) {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: signature.generators(),
            });
        }
        Ok(Self::from_blade(
            signature,
            Blade::from_indices(indices)?,
            c,
        ))
    }

    pub fn from_blade(signature: CliffordSignature, blade: Blade, c: Rational) -> Self {
        let mut coefficients = BTreeMap::new();
        if !c.is_zero() {
            coefficients.insert(blade, c);
        }
        CliffordElement {
            signature,
            coefficients,
        }
    }

    pub fn signature(&self) -> CliffordSignature {
        self.signature
    }

    pub fn coefficient(&self, blade: Blade) -> Rational {
        self.coefficients
            .get(&blade)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Nonzero terms in blade order.
    pub fn terms(&self) -> impl Iterator<Item = (Blade, &Rational)> {
        self.coefficients.iter().map(|(b, c)| (*b, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    fn accumulate(&mut self, blade: Blade, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .coefficients
            .entry(blade)
            .or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coefficients.remove(&blade);
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.signature.check(&other.signature)?;
        let mut out = self.clone();
        for (b, c) in other.terms() {
            out.accumulate(b, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let mut out = Self::zero(self.signature);
        for (b, c) in self.terms() {
            out.accumulate(b, c * factor);
        }
        out
    }
}

/// Product in `Cl(p,q)`: the bilinear extension of `e_i² = ±1` and
/// `e_i e_j = -e_j e_i` for `i ≠ j`.
pub fn blade_mul(x: &CliffordElement, y: &CliffordElement) -> Result<CliffordElement> {
    x.signature.check(&y.signature)?;
    let mut out = CliffordElement::zero(x.signature);
    for (a, ca) in x.terms() {
        for (b, cb) in y.terms() {
            let (sign, blade) = a.mul(b, &x.signature);
            let c = ca * cb;
            out.accumulate(blade, if sign < 0 { -c } else { c });
        }
    }
    Ok(out)
}

impl fmt::Debug for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cl({},{}): {}", self.signature.p, self.signature.q, self)
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(b, c)| format!("({}){}", format_rational(c), b))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;

    fn add(self, rhs: Self) -> CliffordElement {
        self.try_add(rhs).expect("signature mismatch")
    }
}

impl Neg for &CliffordElement {
    type Output = CliffordElement;

    fn neg(self) -> CliffordElement {
        self.scale(&-Rational::one())
    }
}

impl Sub for &CliffordElement {
    type Output = CliffordElement;

    fn sub(self, rhs: Self) -> CliffordElement {
        self + &(-rhs)
    }
}

impl Mul for &CliffordElement {
    type Output = CliffordElement;

    fn mul(self, rhs: Self) -> CliffordElement {
        blade_mul(self, rhs).expect("signature mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::int;
    use proptest::prelude::*;

    fn e(sig: CliffordSignature, i: usize) -> CliffordElement {
        CliffordElement::generator(sig, i).unwrap()
    }

    #[test]
    fn generator_squares() {
        let sig = CliffordSignature::new(1, 0);
        assert_eq!(&e(sig, 1) * &e(sig, 1), CliffordElement::one(sig));
        let sig = CliffordSignature::new(0, 1);
        assert_eq!(
            &e(sig, 1) * &e(sig, 1),
            CliffordElement::scalar(sig, int(-1))
        );
    }

    #[test]
    fn generators_anticommute() {
        let sig = CliffordSignature::new(2, 0);
        let s = &(&e(sig, 1) * &e(sig, 2)) + &(&e(sig, 2) * &e(sig, 1));
        assert!(s.is_zero());
    }

    #[test]
    fn bivector_square_in_cl02() {
        // (e1e2)(e1e2) = -e1e1e2e2 = -(-1)(-1) = -1
        let sig = CliffordSignature::new(0, 2);
        let b = &e(sig, 1) * &e(sig, 2);
        assert_eq!(&b * &b, CliffordElement::scalar(sig, int(-1)));
        // same in Cl(2,0): -(1)(1) = -1
        let sig = CliffordSignature::new(2, 0);
        let b = &e(sig, 1) * &e(sig, 2);
        assert_eq!(&b * &b, CliffordElement::scalar(sig, int(-1)));
    }

    #[test]
    fn mixed_signature_bivector() {
        // in Cl(1,1): (e1e2)² = -e1²e2² = -(1)(-1) = 1
        let sig = CliffordSignature::new(1, 1);
        let b = &e(sig, 1) * &e(sig, 2);
        assert_eq!(&b * &b, CliffordElement::one(sig));
    }

    #[test]
    fn rejects_signature_mismatch() {
        let a = e(CliffordSignature::new(1, 0), 1);
        let b = e(CliffordSignature::new(0, 1), 1);
        assert!(matches!(
            blade_mul(&a, &b),
            Err(Error::SignatureMismatch(1, 0, 0, 1))
        ));
    }

    #[test]
    fn blade_parsing() {
        assert_eq!(Blade::from_indices(&[1, 3]).unwrap(), Blade(0b101));
        assert!(Blade::from_indices(&[2, 1]).is_err());
        assert_eq!(Blade(0b110).indices(), vec![2, 3]);
        assert_eq!(Blade(0b110).to_string(), "e2e3");
        let sig = CliffordSignature::new(1, 1);
        assert!(CliffordElement::blade(sig, &[3], int(1)).is_err());
    }

    #[test]
    fn dimension_counts_blades() {
        let sig = CliffordSignature::new(2, 3);
        assert_eq!(sig.dimension(), 32);
        let mut seen = std::collections::BTreeSet::new();
        for a in 0..32u32 {
            for b in 0..32u32 {
                let (_, c) = Blade(a).mul(Blade(b), &sig);
                assert!(c.0 < 32);
                seen.insert(c);
            }
        }
        assert_eq!(seen.len(), 32);
    }

    pub(crate) fn element(n: usize) -> impl Strategy<Value = Vec<(u32, i64)>> {
        prop::collection::vec((0u32..(1 << n), -3i64..=3), 0..4)
    }

    fn build(sig: CliffordSignature, terms: &[(u32, i64)]) -> CliffordElement {
        let mut out = CliffordElement::zero(sig);
        for &(b, c) in terms {
            out = &out + &CliffordElement::from_blade(sig, Blade(b), int(c));
        }
        out
    }

    proptest! {
        #[test]
        fn product_is_associative(
            (p, q, x, y, z) in (0usize..=5).prop_flat_map(|n| (0..=n).prop_flat_map(move |p| {
                (Just(p), Just(n - p), element(n), element(n), element(n))
            }))
        ) {
            let sig = CliffordSignature::new(p, q);
            let (x, y, z) = (build(sig, &x), build(sig, &y), build(sig, &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        }

        #[test]
        fn product_is_bilinear(a in element(3), b in element(3), c in element(3)) {
            let sig = CliffordSignature::new(1, 2);
            let (a, b, c) = (build(sig, &a), build(sig, &b), build(sig, &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }
}
