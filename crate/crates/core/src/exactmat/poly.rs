use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{format_rational, int, simplest_between, Rational};
use crate::error::{Error, Result};

/// Univariate polynomial with rational coefficients in ascending degree.
/// The zero polynomial has no coefficients; otherwise the leading
/// coefficient is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format_rational(c),
                1 => format!("{}·t", format_rational(c)),
                _ => format!("{}·t^{k}", format_rational(c)),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// One endpoint of a real interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Unbounded,
    Open(Rational),
    Closed(Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn real_line() -> Self {
        Interval {
            lo: Bound::Unbounded,
            hi: Bound::Unbounded,
        }
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Interval {
            lo: Bound::Open(lo),
            hi: Bound::Open(hi),
        }
    }

    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Interval {
            lo: Bound::Closed(lo),
            hi: Bound::Closed(hi),
        }
    }
}

/// An isolated real root: either found exactly, or pinned inside an open
/// interval whose endpoints carry opposite signs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RealRoot {
    Exact {
        #[serde(with = "crate::json::rational_str")]
        value: Rational,
    },
    Bracket {
        #[serde(with = "crate::json::rational_str")]
        lo: Rational,
        #[serde(with = "crate::json::rational_str")]
        hi: Rational,
    },
}

impl RealRoot {
    /// A rational point inside the root's bracket (the root itself when exact).
    pub fn representative(&self) -> Rational {
        match self {
            RealRoot::Exact { value } => value.clone(),
            RealRoot::Bracket { lo, hi } => (lo + hi) / int(2),
        }
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::new(vec![c])
    }

    /// `t − root`.
    pub fn linear_factor(root: Rational) -> Self {
        Polynomial::new(vec![-root, Rational::one()])
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    fn scale(&self, factor: &Rational) -> Self {
        Polynomial::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lead) => self.scale(&lead.recip()),
            None => Polynomial::zero(),
        }
    }

    /// Euclidean division `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let dd = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let lead = divisor.leading().expect("nonzero divisor").clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().expect("nonempty").clone() / &lead;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = &rem[k + i] - &factor * c;
            }
            quot[k] = factor;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        Ok((Polynomial::new(quot), Polynomial::new(rem)))
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self / gcd(self, self')`: same real roots, all simple.
    pub fn squarefree_part(&self) -> Result<Polynomial> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative());
        Ok(self.div_rem(&g)?.0)
    }

    /// Lagrange interpolation through points with distinct abscissae.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Result<Polynomial> {
        let mut acc = Polynomial::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            let mut basis = Polynomial::constant(yi.clone());
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let denom = xi - xj;
                if denom.is_zero() {
                    return Err(Error::DimensionMismatch(
                        "repeated interpolation node".into(),
                    ));
                }
                basis = &basis * &Polynomial::linear_factor(xj.clone()).scale(&denom.recip());
            }
            acc = &acc + &basis;
        }
        Ok(acc)
    }

    /// Sturm sequence `p, p', −rem(p, p'), …`.
    pub fn sturm_sequence(&self) -> Result<Vec<Polynomial>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().expect("nonempty").is_zero() {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1])?;
            seq.push(-&r);
        }
        seq.pop();
        Ok(seq)
    }

    /// Number of distinct real roots inside `interval`, decided exactly by
    /// Sturm sign variations on the square-free part.
    pub fn count_real_roots(&self, interval: &Interval) -> Result<usize> {
        let sf = self.squarefree_part()?;
        let seq = sf.sturm_sequence()?;
        count_with_sequence(&sf, &seq, interval)
    }

    /// Isolates every distinct real root. Rational roots are reported
    /// exactly once bisection has narrowed the bracket enough for the
    /// simplest rational inside it to be the root; irrational roots are
    /// reported as brackets no wider than `2^-refine_steps` times the
    /// initial root bound.
    pub fn real_roots(&self, refine_steps: usize) -> Result<Vec<RealRoot>> {
        let sf = self.squarefree_part()?;
        let seq = sf.sturm_sequence()?;
        let bound = sf.root_bound();
        let mut brackets = Vec::new();
        isolate(&seq, -bound.clone(), bound, &mut brackets)?;
        brackets
            .into_iter()
            .map(|(lo, hi)| refine(&sf, &seq, lo, hi, refine_steps))
            .collect()
    }

    /// Cauchy bound: every real root lies in `(−B, B)`.
    fn root_bound(&self) -> Rational {
        let lead = self.leading().expect("nonzero").abs();
        let max = self
            .coeffs
            .iter()
            .rev()
            .skip(1)
            .map(|c| c.abs() / &lead)
            .fold(Rational::zero(), |m, c| if c > m { c } else { m });
        max + int(1)
    }
}

pub fn count_real_roots(p: &Polynomial, interval: &Interval) -> Result<usize> {
    p.count_real_roots(interval)
}

fn sign(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn variations_at(seq: &[Polynomial], x: &Rational) -> usize {
    variations(seq.iter().map(|p| sign(&p.eval(x))))
}

fn variations_at_infinity(seq: &[Polynomial], positive: bool) -> usize {
    variations(seq.iter().map(|p| {
        let lead = sign(p.leading().expect("nonzero"));
        let odd = p.degree().expect("nonzero") % 2 == 1;
        if !positive && odd {
            -lead
        } else {
            lead
        }
    }))
}

// For a square-free p, V(a) − V(b) counts the roots in (a, b].
fn count_with_sequence(sf: &Polynomial, seq: &[Polynomial], interval: &Interval) -> Result<usize> {
    let finite = |b: &Bound| match b {
        Bound::Unbounded => None,
        Bound::Open(x) | Bound::Closed(x) => Some(x.clone()),
    };
    if let (Some(lo), Some(hi)) = (finite(&interval.lo), finite(&interval.hi)) {
        if lo > hi {
            return Err(Error::InvalidInterval(format!(
                "lower end {} above upper end {}",
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
    }
    let v_lo = match finite(&interval.lo) {
        None => variations_at_infinity(seq, false),
        Some(x) => variations_at(seq, &x),
    };
    let v_hi = match finite(&interval.hi) {
        None => variations_at_infinity(seq, true),
        Some(x) => variations_at(seq, &x),
    };
    let mut count = v_lo as i64 - v_hi as i64;
    if let Bound::Closed(x) = &interval.lo {
        if sf.eval(x).is_zero() {
            count += 1;
        }
    }
    if let Bound::Open(x) = &interval.hi {
        if sf.eval(x).is_zero() {
            count -= 1;
        }
    }
    Ok(count.max(0) as usize)
}

fn roots_in_half_open(seq: &[Polynomial], lo: &Rational, hi: &Rational) -> usize {
    variations_at(seq, lo).saturating_sub(variations_at(seq, hi))
}

fn isolate(
    seq: &[Polynomial],
    lo: Rational,
    hi: Rational,
    out: &mut Vec<(Rational, Rational)>,
) -> Result<()> {
    match roots_in_half_open(seq, &lo, &hi) {
        0 => Ok(()),
        1 => {
            out.push((lo, hi));
            Ok(())
        }
        _ => {
            let mid = (&lo + &hi) / int(2);
            isolate(seq, lo, mid.clone(), out)?;
            isolate(seq, mid, hi, out)
        }
    }
}

// Narrows a bracket (lo, hi] holding exactly one root of the square-free sf.
fn refine(
    sf: &Polynomial,
    seq: &[Polynomial],
    mut lo: Rational,
    mut hi: Rational,
    steps: usize,
) -> Result<RealRoot> {
    for _ in 0..=steps {
        if sf.eval(&hi).is_zero() {
            return Ok(RealRoot::Exact { value: hi });
        }
        if let Some(candidate) = simplest_between(&lo, &hi) {
            if sf.eval(&candidate).is_zero() {
                return Ok(RealRoot::Exact { value: candidate });
            }
        }
        let mid = (&lo + &hi) / int(2);
        if roots_in_half_open(seq, &lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if sf.eval(&hi).is_zero() {
        return Ok(RealRoot::Exact { value: hi });
    }
    if sf.eval(&lo).is_zero() {
        // the bracket is half-open at lo; nudge it inside
        let mut c = (&lo + &hi) / int(2);
        while roots_in_half_open(seq, &c, &hi) == 0 {
            c = (&lo + &c) / int(2);
        }
        lo = c;
    }
    Ok(RealRoot::Bracket { lo, hi })
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|k| {
                    let a = self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero);
                    let b = rhs.coeffs.get(k).cloned().unwrap_or_else(Rational::zero);
                    a + b
                })
                .collect(),
        )
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl One for Polynomial {
    fn one() -> Self {
        Polynomial::constant(Rational::one())
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::rational::frac;

    fn product(factors: &[Polynomial]) -> Polynomial {
        factors.iter().fold(Polynomial::one(), |acc, f| &acc * f)
    }

    #[test]
    fn trims_leading_zeros() {
        let p = Polynomial::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert!(Polynomial::from_i64(&[0, 0]).is_zero());
    }

    #[test]
    fn whole_line_counts() {
        let line = Interval::real_line();
        assert_eq!(
            Polynomial::from_i64(&[1, 0, 1])
                .count_real_roots(&line)
                .unwrap(),
            0
        );
        assert_eq!(
            Polynomial::from_i64(&[-1, 0, 1])
                .count_real_roots(&line)
                .unwrap(),
            2
        );
        assert_eq!(
            Polynomial::zero().count_real_roots(&line),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn constructed_degree_five() {
        // (t−1)(t−2)(t²+1)(t+3)
        let p = product(&[
            Polynomial::linear_factor(int(1)),
            Polynomial::linear_factor(int(2)),
            Polynomial::from_i64(&[1, 0, 1]),
            Polynomial::linear_factor(int(-3)),
        ]);
        assert_eq!(p.degree(), Some(5));
        assert_eq!(p.count_real_roots(&Interval::real_line()).unwrap(), 3);
        let roots = p.real_roots(64).unwrap();
        let exact: Vec<Rational> = roots
            .iter()
            .map(|r| match r {
                RealRoot::Exact { value } => value.clone(),
                other => panic!("expected exact root, got {other:?}"),
            })
            .collect();
        assert_eq!(exact, vec![int(-3), int(1), int(2)]);
    }

    #[test]
    fn endpoint_conventions() {
        // roots at 0 and 1
        let p = Polynomial::from_i64(&[0, -1, 1]);
        let count = |i: Interval| p.count_real_roots(&i).unwrap();
        assert_eq!(count(Interval::closed(int(0), int(1))), 2);
        assert_eq!(count(Interval::open(int(0), int(1))), 0);
        assert_eq!(
            count(Interval {
                lo: Bound::Open(int(0)),
                hi: Bound::Closed(int(1))
            }),
            1
        );
        assert_eq!(
            count(Interval {
                lo: Bound::Closed(int(0)),
                hi: Bound::Open(int(1))
            }),
            1
        );
        assert_eq!(count(Interval::closed(int(1), int(1))), 1);
        assert_eq!(
            count(Interval {
                lo: Bound::Unbounded,
                hi: Bound::Open(int(1))
            }),
            1
        );
        assert!(p
            .count_real_roots(&Interval::closed(int(2), int(1)))
            .is_err());
    }

    #[test]
    fn repeated_roots_count_once() {
        // (t−1)³ (t+1)²
        let p = product(&[
            Polynomial::linear_factor(int(1)),
            Polynomial::linear_factor(int(1)),
            Polynomial::linear_factor(int(1)),
            Polynomial::linear_factor(int(-1)),
            Polynomial::linear_factor(int(-1)),
        ]);
        assert_eq!(p.count_real_roots(&Interval::real_line()).unwrap(), 2);
        assert_eq!(p.squarefree_part().unwrap().degree(), Some(2));
    }

    #[test]
    fn irrational_root_bracketed() {
        let p = Polynomial::from_i64(&[-2, 0, 1]);
        let roots = p.real_roots(40).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            let RealRoot::Bracket { lo, hi } = r else {
                panic!("sqrt 2 is irrational");
            };
            assert!(p.eval(lo).is_positive() != p.eval(hi).is_positive());
            assert!(hi - lo < frac(1, 1 << 20));
        }
    }

    #[test]
    fn rational_non_dyadic_root_found_exactly() {
        // (3t − 1)(t² − 2)
        let p = &Polynomial::from_i64(&[-1, 3]) * &Polynomial::from_i64(&[-2, 0, 1]);
        let roots = p.real_roots(80).unwrap();
        assert!(roots.contains(&RealRoot::Exact { value: frac(1, 3) }));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = Polynomial::from_i64(&[3, -1, 0, 2]);
        let pts: Vec<_> = (0..4).map(|k| (int(k), p.eval(&int(k)))).collect();
        assert_eq!(Polynomial::interpolate(&pts).unwrap(), p);
    }

    #[test]
    fn division_identity() {
        let a = Polynomial::from_i64(&[5, 0, -3, 2, 1]);
        let b = Polynomial::from_i64(&[1, 1, 3]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree() < b.degree());
    }
}
