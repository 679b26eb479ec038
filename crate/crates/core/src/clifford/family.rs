use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::algebra::{CliffordElement, CliffordSignature};
use crate::error::{Error, Result};
use crate::exactmat::{format_rational, int, Rational, RationalMatrix};

/// Sign in the relation `T_i T_j + T_j T_i = 2ε δ_ij I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn sign(self) -> i64 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
        }
    }

    pub fn from_sign(s: i64) -> Result<Self> {
        match s {
            1 => Ok(Epsilon::Plus),
            -1 => Ok(Epsilon::Minus),
            _ => Err(Error::Parse(format!("epsilon must be +1 or -1, got {s}"))),
        }
    }

    /// The abstract algebra whose generators the family represents:
    /// `Cl(n,0)` for `ε = +1`, `Cl(0,n)` for `ε = -1`.
    pub fn signature(self, n: usize) -> CliffordSignature {
        match self {
            Epsilon::Plus => CliffordSignature::new(n, 0),
            Epsilon::Minus => CliffordSignature::new(0, n),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Epsilon::Plus => "+1",
            Epsilon::Minus => "-1",
        })
    }
}

impl std::str::FromStr for Epsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(Epsilon::Plus),
            "-1" | "-" => Ok(Epsilon::Minus),
            other => Err(Error::Parse(format!(
                "epsilon must be +1 or -1, got {other:?}"
            ))),
        }
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.sign())
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Epsilon::from_sign(i64::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Matrices `T_1..T_n` of a common size claiming `T_i T_j + T_j T_i = 2ε δ_ij I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsilonFamily {
    epsilon: Epsilon,
    dim: usize,
    matrices: Vec<RationalMatrix>,
}

impl EpsilonFamily {
    /// Wraps matrices without checking the relation; see
    /// [`verify_epsilon_family`].
    pub fn new(epsilon: Epsilon, dim: usize, matrices: Vec<RationalMatrix>) -> Result<Self> {
        if let Some(m) = matrices.iter().find(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim}x{dim}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(EpsilonFamily {
            epsilon,
            dim,
            matrices,
        })
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[RationalMatrix] {
        &self.matrices
    }

    pub fn into_matrices(self) -> Vec<RationalMatrix> {
        self.matrices
    }
}

/// First violated anticommutator entry. Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationFailure {
    pub i: usize,
    pub j: usize,
    pub row: usize,
    pub col: usize,
    #[serde(with = "crate::json::rational_str")]
    pub expected: Rational,
    #[serde(with = "crate::json::rational_str")]
    pub found: Rational,
}

impl fmt::Display for RelationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pair ({}, {}): entry ({}, {}) is {}, expected {}",
            self.i,
            self.j,
            self.row + 1,
            self.col + 1,
            format_rational(&self.found),
            format_rational(&self.expected)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub checked_pairs: usize,
    pub failure: Option<RelationFailure>,
}

/// Checks `A_i A_j + A_j A_i = 2 c δ_ij I` for `i ≤ j` in row order,
/// stopping at the first bad entry.
pub fn check_anticommutation(matrices: &[RationalMatrix], c: &Rational) -> VerificationReport {
    let two_c = int(2) * c;
    let mut checked = 0;
    for i in 0..matrices.len() {
        for j in i..matrices.len() {
            checked += 1;
            let (a, b) = (&matrices[i], &matrices[j]);
            let anti = match a.anticommutator(b) {
                Ok(m) if m.is_square() => m,
                _ => {
                    return VerificationReport {
                        ok: false,
                        checked_pairs: checked,
                        failure: Some(RelationFailure {
                            i: i + 1,
                            j: j + 1,
                            row: 0,
                            col: 0,
                            expected: Rational::zero(),
                            found: Rational::zero(),
                        }),
                    }
                }
            };
            for r in 0..anti.rows() {
                for s in 0..anti.cols() {
                    let expected = if i == j && r == s {
                        two_c.clone()
                    } else {
                        Rational::zero()
                    };
                    if *anti.get(r, s) != expected {
                        return VerificationReport {
                            ok: false,
                            checked_pairs: checked,
                            failure: Some(RelationFailure {
                                i: i + 1,
                                j: j + 1,
                                row: r,
                                col: s,
                                expected,
                                found: anti.get(r, s).clone(),
                            }),
                        };
                    }
                }
            }
        }
    }
    VerificationReport {
        ok: true,
        checked_pairs: checked,
        failure: None,
    }
}

pub fn verify_epsilon_family(fam: &EpsilonFamily) -> VerificationReport {
    check_anticommutation(&fam.matrices, &int(fam.epsilon.sign()))
}

// Tensor strings over {I, X, Z, J}: X = [[0,1],[1,0]], Z = diag(1,-1),
// J = [[0,1],[-1,0]]. Two strings anticommute iff an odd number of
// positions carry distinct non-identity letters; a string squares to
// (-1)^(#J) and is symmetric or skew accordingly.
type Letter = u8;
const I: Letter = 0;
const X: Letter = 1;
const Z: Letter = 2;
const J: Letter = 3;

fn letter_matrix(l: Letter) -> RationalMatrix {
    let rows: [[i64; 2]; 2] = match l {
        I => [[1, 0], [0, 1]],
        X => [[0, 1], [1, 0]],
        Z => [[1, 0], [0, -1]],
        _ => [[0, 1], [-1, 0]],
    };
    RationalMatrix::from_i64(&[&rows[0], &rows[1]])
}

fn string_matrix(s: &[Letter]) -> RationalMatrix {
    s.iter().fold(RationalMatrix::identity(1), |acc, &l| {
        acc.kron(&letter_matrix(l))
    })
}

fn anticommute(a: &[Letter], b: &[Letter]) -> bool {
    a.iter()
        .zip(b)
        .filter(|(&x, &y)| x != I && y != I && x != y)
        .count()
        % 2
        == 1
}

fn string_sign(s: &[Letter]) -> Epsilon {
    if s.iter().filter(|&&l| l == J).count() % 2 == 0 {
        Epsilon::Plus
    } else {
        Epsilon::Minus
    }
}

// Largest string length tried before giving up on the direct search.
const MAX_STRING_LEN: usize = 5;

fn search_strings(n: usize, eps: Epsilon) -> Vec<Vec<Letter>> {
    for k in 0..=MAX_STRING_LEN {
        let pool: Vec<Vec<Letter>> = (0..4usize.pow(k as u32))
            .map(|mut code| {
                let mut s = vec![I; k];
                for slot in s.iter_mut().rev() {
                    *slot = (code % 4) as Letter;
                    code /= 4;
                }
                s
            })
            .filter(|s| string_sign(s) == eps)
            .collect();
        let mut chosen = Vec::new();
        if clique(&pool, n, 0, &mut chosen) {
            return chosen.into_iter().map(|i| pool[i].clone()).collect();
        }
    }
    unreachable!("families of size ≤ 8 exist with strings of length ≤ 4")
}

fn clique(pool: &[Vec<Letter>], n: usize, start: usize, chosen: &mut Vec<usize>) -> bool {
    if chosen.len() == n {
        return true;
    }
    for c in start..pool.len() {
        if pool.len() - c < n - chosen.len() {
            return false;
        }
        if chosen.iter().all(|&o| anticommute(&pool[o], &pool[c])) {
            chosen.push(c);
            if clique(pool, n, c + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

type FamilyCache = Mutex<HashMap<(usize, Epsilon), (usize, Vec<RationalMatrix>)>>;

fn cache() -> &'static FamilyCache {
    static CACHE: OnceLock<FamilyCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn family_matrices(n: usize, eps: Epsilon) -> (usize, Vec<RationalMatrix>) {
    if n == 0 {
        return (1, Vec::new());
    }
    if let Some(hit) = cache().lock().expect("cache lock").get(&(n, eps)) {
        return hit.clone();
    }
    let built = if n <= 8 {
        let strings = search_strings(n, eps);
        let dim = 1 << strings[0].len();
        (dim, strings.iter().map(|s| string_matrix(s)).collect())
    } else {
        // period eight: {I ⊗ G_j} ∪ {B_i ⊗ ω} with ω = G_1...G_8, where
        // ω² = I, ω is symmetric and anticommutes with every G_j
        let (gdim, g) = family_matrices(8, eps);
        let omega = g
            .iter()
            .fold(RationalMatrix::identity(gdim), |acc, m| &acc * m);
        let (bdim, b) = family_matrices(n - 8, eps);
        let id = RationalMatrix::identity(bdim);
        let mut out: Vec<RationalMatrix> = g.iter().map(|m| id.kron(m)).collect();
        out.extend(b.iter().map(|m| m.kron(&omega)));
        (bdim * gdim, out)
    };
    cache()
        .lock()
        .expect("cache lock")
        .insert((n, eps), built.clone());
    built
}

/// `n` signed-permutation matrices with `T_i T_j + T_j T_i = 2ε δ_ij I`.
///
/// The matrices are Kronecker products of the 2×2 seeds `X`, `Z`
/// (symmetric, square `+I`) and `J` (skew, square `-I`). Up to eight
/// generators the shortest product length admitting the family is found by
/// search; beyond that the period-eight tensor recursion is applied. The
/// resulting dimensions are
///
/// | n      | 1 | 2 | 3 | 4 | 5 | 6  | 7  | 8  | 9  |
/// |--------|---|---|---|---|---|----|----|----|----|
/// | ε = +1 | 1 | 2 | 4 | 8 | 8 | 16 | 16 | 16 | 16 |
/// | ε = −1 | 2 | 4 | 4 | 8 | 8 | 8  | 8  | 16 | 32 |
///
/// For `ε = +1` every `T_i` is symmetric; for `ε = −1` every `T_i` is skew.
/// `n = 0` yields the empty family in dimension 1.
pub fn build_epsilon_family(n: usize, epsilon: Epsilon) -> EpsilonFamily {
    let (dim, matrices) = family_matrices(n, epsilon);
    EpsilonFamily {
        epsilon,
        dim,
        matrices,
    }
}

/// The algebra homomorphism `Cl(n,0) → End(ℝ^N)` (for `ε = +1`) or
/// `Cl(0,n) → End(ℝ^N)` (for `ε = -1`) determined by `e_i ↦ T_i`.
#[derive(Clone, Debug)]
pub struct CliffordRepresentation {
    signature: CliffordSignature,
    dim: usize,
    generators: Vec<RationalMatrix>,
}

impl CliffordRepresentation {
    pub fn signature(&self) -> CliffordSignature {
        self.signature
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator_images(&self) -> &[RationalMatrix] {
        &self.generators
    }

    /// Image of `x`, each blade `e_{i1}...e_{ik}` evaluated as the ordered
    /// product `T_{i1}...T_{ik}`.
    pub fn apply(&self, x: &CliffordElement) -> Result<RationalMatrix> {
        let sig = x.signature();
        if sig != self.signature {
            return Err(Error::SignatureMismatch(
                sig.p,
                sig.q,
                self.signature.p,
                self.signature.q,
            ));
        }
        let mut out = RationalMatrix::zeros(self.dim, self.dim);
        for (blade, c) in x.terms() {
            let image = blade
                .indices()
                .iter()
                .fold(RationalMatrix::identity(self.dim), |acc, &i| {
                    &acc * &self.generators[i - 1]
                });
            out = &out + &image.scale(c);
        }
        Ok(out)
    }
}

/// Extends `e_i ↦ T_i` to an algebra homomorphism. The relation is
/// re-checked; a family that fails it has no such extension.
pub fn extend_to_algebra_hom(fam: &EpsilonFamily) -> Result<CliffordRepresentation> {
    let report = verify_epsilon_family(fam);
    if let Some(failure) = report.failure {
        return Err(Error::UnverifiedFamily(failure.to_string()));
    }
    Ok(CliffordRepresentation {
        signature: fam.epsilon.signature(fam.len()),
        dim: fam.dim,
        generators: fam.matrices.clone(),
    })
}

/// Whether every row and column has exactly one nonzero entry, equal to ±1.
pub fn is_signed_permutation(m: &RationalMatrix) -> bool {
    let one = Rational::one();
    let unit = |x: &Rational| *x == one || *x == -one.clone();
    let lines_ok = |get: &dyn Fn(usize, usize) -> Rational| {
        (0..m.rows()).all(|i| {
            let mut nonzero = 0;
            for j in 0..m.cols() {
                let x = get(i, j);
                if !x.is_zero() {
                    if !unit(&x) {
                        return false;
                    }
                    nonzero += 1;
                }
            }
            nonzero == 1
        })
    };
    m.is_square() && lines_ok(&|i, j| m.get(i, j).clone()) && lines_ok(&|i, j| m.get(j, i).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::algebra::Blade;
    use crate::hurwitz::rho;
    use proptest::prelude::*;

    #[test]
    fn smallest_families() {
        let f = build_epsilon_family(1, Epsilon::Plus);
        assert_eq!(f.dim(), 1);
        assert_eq!(f.matrices()[0], RationalMatrix::identity(1));
        let f = build_epsilon_family(1, Epsilon::Minus);
        assert_eq!(
            f.matrices()[0],
            RationalMatrix::from_i64(&[&[0, 1], &[-1, 0]])
        );
    }

    #[test]
    fn three_skew_generators_in_dimension_four() {
        let f = build_epsilon_family(3, Epsilon::Minus);
        assert_eq!(f.dim(), 4);
        // all nine anticommutators by hand
        let m = f.matrices();
        for i in 0..3 {
            for j in 0..3 {
                let s = &(&m[i] * &m[j]) + &(&m[j] * &m[i]);
                let expected = if i == j {
                    RationalMatrix::scalar(4, int(-2))
                } else {
                    RationalMatrix::zeros(4, 4)
                };
                assert_eq!(s, expected, "({i},{j})");
            }
        }
    }

    #[test]
    fn dimension_table() {
        let plus = [1, 2, 4, 8, 8, 16, 16, 16, 16];
        let minus = [2, 4, 4, 8, 8, 8, 8, 16, 32];
        for n in 1..=9 {
            assert_eq!(
                build_epsilon_family(n, Epsilon::Plus).dim(),
                plus[n - 1],
                "+{n}"
            );
            assert_eq!(
                build_epsilon_family(n, Epsilon::Minus).dim(),
                minus[n - 1],
                "-{n}"
            );
        }
    }

    #[test]
    fn built_families_verify_with_expected_shape() {
        for n in 1..=10 {
            for eps in [Epsilon::Plus, Epsilon::Minus] {
                let f = build_epsilon_family(n, eps);
                assert_eq!(f.len(), n);
                assert!(verify_epsilon_family(&f).ok, "n={n} eps={eps}");
                for m in f.matrices() {
                    assert!(is_signed_permutation(m));
                    match eps {
                        Epsilon::Plus => assert!(m.is_symmetric()),
                        Epsilon::Minus => assert!(m.is_skew()),
                    }
                }
            }
        }
    }

    #[test]
    fn skew_families_respect_the_sphere_bound() {
        for n in 1..=12 {
            let f = build_epsilon_family(n, Epsilon::Minus);
            assert!((n as u64) < rho(f.dim() as u64).unwrap(), "n={n}");
        }
    }

    #[test]
    fn reports_first_failure() {
        let i2 = RationalMatrix::identity(2);
        let f = EpsilonFamily::new(Epsilon::Plus, 2, vec![i2.clone(), i2]).unwrap();
        let r = verify_epsilon_family(&f);
        assert!(!r.ok);
        let fail = r.failure.unwrap();
        assert_eq!((fail.i, fail.j, fail.row, fail.col), (1, 2, 0, 0));
        assert_eq!(fail.found, int(2));

        let d = RationalMatrix::from_i64(&[&[1, 0], &[0, -1]]);
        let f = EpsilonFamily::new(Epsilon::Minus, 2, vec![d]).unwrap();
        let fail = verify_epsilon_family(&f).failure.unwrap();
        assert_eq!((fail.i, fail.j), (1, 1));
        assert_eq!((fail.expected, fail.found), (int(-2), int(2)));
        assert!(extend_to_algebra_hom(&f).is_err());
    }

    #[test]
    fn homomorphism_on_generators_and_unit() {
        let f = build_epsilon_family(3, Epsilon::Plus);
        let h = extend_to_algebra_hom(&f).unwrap();
        let sig = h.signature();
        assert_eq!(sig, CliffordSignature::new(3, 0));
        let e1 = CliffordElement::generator(sig, 1).unwrap();
        assert_eq!(h.apply(&e1).unwrap(), f.matrices()[0]);
        assert_eq!(
            h.apply(&CliffordElement::one(sig)).unwrap(),
            RationalMatrix::identity(f.dim())
        );
        let e12 = CliffordElement::blade(sig, &[1, 2], int(1)).unwrap();
        let t12 = &f.matrices()[0] * &f.matrices()[1];
        assert_eq!(h.apply(&e12).unwrap(), t12);
        assert_eq!(h.apply(&(&e12 * &e12)).unwrap(), &t12 * &t12);
        let wrong = CliffordElement::one(CliffordSignature::new(0, 3));
        assert!(h.apply(&wrong).is_err());
    }

    proptest! {
        #[test]
        fn homomorphism_is_multiplicative(
            n in 1usize..=4,
            minus in any::<bool>(),
            a in 0u32..16,
            b in 0u32..16,
            ca in -3i64..=3,
            cb in -3i64..=3,
        ) {
            let eps = if minus { Epsilon::Minus } else { Epsilon::Plus };
            let f = build_epsilon_family(n, eps);
            let h = extend_to_algebra_hom(&f).unwrap();
            let sig = h.signature();
            let mask = (1u32 << n) - 1;
            let x = CliffordElement::from_blade(sig, Blade(a & mask), int(ca));
            let y = CliffordElement::from_blade(sig, Blade(b & mask), int(cb));
            let lhs = h.apply(&(&x * &y)).unwrap();
            let rhs = &h.apply(&x).unwrap() * &h.apply(&y).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
