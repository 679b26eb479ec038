//! Classical pairs `(𝔤, ι)` with a Cartan decomposition `𝔤 = 𝔨 ⊕ 𝔭`,
//! represented through the image `ι(𝔭)` as a space of real matrices.
//!
//! Witness families give lower bounds for `ρ⁽¹⁾` (matrices in `ι(𝔭)` with
//! `AᵢAⱼ + AⱼAᵢ = 2δᵢⱼI`) and `ρ⁽²⁾` (every nonzero combination
//! invertible). Requests above the tabulated value are refused from the
//! table itself; no search is run to justify the refusal.

use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::clifford::{build_epsilon_family, check_anticommutation, Epsilon, VerificationReport};
use crate::error::{Error, Result};
use crate::exactmat::{int, ComplexMatrix, ComplexRational, Rational, RationalMatrix};
use crate::hurwitz::{ord2, rho, table_value, ClassicalPairKind, DivisionAlgebra, TableValue};
use crate::pencil::{check_span, PencilVerdict};

/// The pairs with an explicit `ι(𝔭)` and witness constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CartanKind {
    /// `so(N,N)` on `ℝ^{2N}`.
    SoNN(usize),
    /// `gl(N,ℝ)` on `ℝ^N`.
    GlReal(usize),
    /// `O(N)` acting on `ℝ^N` with `𝔰 = 𝔬(N)`.
    On(usize),
    /// `sl(M,ℝ)` on `ℝ^M`.
    SlReal(usize),
    /// `gl(N,ℂ)` on `ℂ^N`, realified to `ℝ^{2N}`.
    GlComplex(usize),
}

impl CartanKind {
    /// Parses `so(N,N)`, `gl(N,R)`, `o(N)`, `sl(M,R)`, `gl(N,C)` (also
    /// `u(N)`), with concrete sizes or symbols bound to `sizes`.
    pub fn parse(name: &str, sizes: &[u64]) -> Result<Self> {
        let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        for (prefix, make) in [
            ("o(", CartanKind::On as fn(usize) -> CartanKind),
            ("so(", CartanKind::On),
            ("u(", CartanKind::GlComplex),
        ] {
            if let Some(arg) = compact
                .strip_prefix(prefix)
                .and_then(|r| r.strip_suffix(')'))
            {
                if !arg.contains(',') {
                    let n = match arg.parse::<usize>() {
                        Ok(n) => n,
                        Err(_) => *sizes.first().ok_or_else(|| {
                            Error::InvalidPair(format!("no size supplied for {compact}"))
                        })? as usize,
                    };
                    if n == 0 {
                        return Err(Error::InvalidPair(format!(
                            "{compact}: size must be positive"
                        )));
                    }
                    return Ok(make(n));
                }
            }
        }
        let kind = ClassicalPairKind::parse(&compact, sizes)?;
        use ClassicalPairKind as K;
        let real = DivisionAlgebra::Real;
        Ok(match kind {
            K::SoNN(n) => CartanKind::SoNN(n as usize),
            K::GlReal(n) => CartanKind::GlReal(n as usize),
            K::GlComplex(n) => CartanKind::GlComplex(n as usize),
            K::SlEvenReal(n) => CartanKind::SlReal(2 * n as usize),
            K::SlOdd { n, field } if field == real => CartanKind::SlReal(2 * n as usize + 1),
            K::SlOne(field) if field == real => CartanKind::SlReal(1),
            other => {
                return Err(Error::Unsupported(format!(
                    "{other}: no witness synthesizer; only the tabulated value is available"
                )))
            }
        })
    }

    /// The catalog row this pair belongs to, if any.
    pub fn table_kind(&self) -> Option<ClassicalPairKind> {
        let real = DivisionAlgebra::Real;
        Some(match *self {
            CartanKind::SoNN(n) => ClassicalPairKind::SoNN(n as u64),
            CartanKind::GlReal(n) => ClassicalPairKind::GlReal(n as u64),
            CartanKind::GlComplex(n) => ClassicalPairKind::GlComplex(n as u64),
            CartanKind::SlReal(1) => ClassicalPairKind::SlOne(real),
            CartanKind::SlReal(m) if m.is_multiple_of(2) => {
                ClassicalPairKind::SlEvenReal(m as u64 / 2)
            }
            CartanKind::SlReal(m) => ClassicalPairKind::SlOdd {
                n: (m as u64 - 1) / 2,
                field: real,
            },
            CartanKind::On(_) => return None,
        })
    }

    /// `(ρ⁽¹⁾, ρ⁽²⁾)`: the catalog value, or for `O(N)` with `𝔰 = 𝔬(N)` the
    /// sphere count `(0, ρ(N) − 1)` (skew matrices never square to `+I`).
    pub fn bounds(&self) -> TableValue {
        match (self, self.table_kind()) {
            (_, Some(kind)) => table_value(&kind).expect("validated sizes"),
            (CartanKind::On(n), None) => TableValue {
                rho1: 0,
                rho2: rho(*n as u64).expect("positive") - 1,
            },
            _ => unreachable!(),
        }
    }

    /// Real dimension of the representation space.
    pub fn rep_dim(&self) -> usize {
        match *self {
            CartanKind::SoNN(n) | CartanKind::GlComplex(n) => 2 * n,
            CartanKind::GlReal(n) | CartanKind::On(n) | CartanKind::SlReal(n) => n,
        }
    }
}

impl fmt::Display for CartanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CartanKind::SoNN(n) => write!(f, "so({n},{n})"),
            CartanKind::GlReal(n) => write!(f, "gl({n},R)"),
            CartanKind::On(n) => write!(f, "o({n})"),
            CartanKind::SlReal(n) => write!(f, "sl({n},R)"),
            CartanKind::GlComplex(n) => write!(f, "gl({n},C)"),
        }
    }
}

impl Serialize for CartanKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CartanKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        CartanKind::parse(&text, &[]).map_err(serde::de::Error::custom)
    }
}

/// A pair together with the equations cutting out `ι(𝔭)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanPair {
    pub kind: CartanKind,
    pub rep_dim: usize,
    /// Invariant bilinear form, where the pair is defined by one.
    pub form: Option<RationalMatrix>,
}

pub fn make_pair(kind: CartanKind) -> Result<CartanPair> {
    let n = match kind {
        CartanKind::SoNN(n)
        | CartanKind::GlReal(n)
        | CartanKind::On(n)
        | CartanKind::SlReal(n)
        | CartanKind::GlComplex(n) => n,
    };
    if n == 0 {
        return Err(Error::InvalidPair(format!("{kind}: size must be positive")));
    }
    let form = match kind {
        CartanKind::SoNN(n) => Some(signature_form(n)),
        _ => None,
    };
    Ok(CartanPair {
        kind,
        rep_dim: kind.rep_dim(),
        form,
    })
}

// diag(I_n, −I_n)
fn signature_form(n: usize) -> RationalMatrix {
    RationalMatrix::from_fn(2 * n, 2 * n, |i, j| match (i == j, i < n) {
        (false, _) => Rational::zero(),
        (true, true) => Rational::one(),
        (true, false) => -Rational::one(),
    })
}

/// Whether `a ∈ ι(𝔭)`.
///
/// * `so(N,N)`: `aᵀF + Fa = 0` with `F = diag(I, −I)` and `a` symmetric,
///   i.e. `a = [[0, B], [Bᵀ, 0]]`.
/// * `gl(N,ℝ)`: symmetric. `sl(M,ℝ)`: symmetric and traceless.
/// * `O(N)` with `𝔰 = 𝔬(N)`: skew.
/// * `gl(N,ℂ)`: realified Hermitian, `a = [[X, −Y], [Y, X]]` symmetric.
pub fn p_membership(pair: &CartanPair, a: &RationalMatrix) -> Result<bool> {
    let n = pair.rep_dim;
    if a.rows() != n || a.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} acts on dimension {n}, got {}x{}",
            pair.kind,
            a.rows(),
            a.cols()
        )));
    }
    Ok(match pair.kind {
        CartanKind::SoNN(_) => {
            let f = pair.form.as_ref().expect("so(N,N) carries its form");
            a.is_symmetric() && (&(&a.transpose() * f) + &(f * a)).is_zero()
        }
        CartanKind::GlReal(_) => a.is_symmetric(),
        CartanKind::SlReal(_) => a.is_symmetric() && a.trace()?.is_zero(),
        CartanKind::On(_) => a.is_skew(),
        CartanKind::GlComplex(h) => {
            a.is_symmetric()
                && a.block(0, 0, h, h) == a.block(h, h, h, h)
                && a.block(h, 0, h, h) == -&a.block(0, h, h, h)
        }
    })
}

fn unit(n: usize, i: usize, j: usize) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(n, n);
    m.set(i, j, Rational::one());
    m
}

fn sym_unit(n: usize, i: usize, j: usize) -> RationalMatrix {
    if i == j {
        unit(n, i, i)
    } else {
        &unit(n, i, j) + &unit(n, j, i)
    }
}

/// A basis of `ι(𝔭)`.
///
/// For `sl(M,ℝ)` the diagonal part is spanned by
/// `H_k = diag(1, …, 1, −k, 0, …)` (`k` ones), so `H_{M−1}` is the
/// invertible element `diag(1, …, 1, −(M−1))`.
pub fn p_basis(pair: &CartanPair) -> Vec<RationalMatrix> {
    let mut out = Vec::new();
    match pair.kind {
        CartanKind::SoNN(n) => {
            for i in 0..n {
                for j in 0..n {
                    out.push(sym_unit(2 * n, i, n + j));
                }
            }
        }
        CartanKind::GlReal(n) => {
            for i in 0..n {
                for j in i..n {
                    out.push(sym_unit(n, i, j));
                }
            }
        }
        CartanKind::On(n) => {
            for i in 0..n {
                for j in i + 1..n {
                    out.push(&unit(n, i, j) - &unit(n, j, i));
                }
            }
        }
        CartanKind::SlReal(m) => {
            for k in 1..m {
                out.push(RationalMatrix::from_fn(m, m, |i, j| {
                    if i != j || i > k {
                        Rational::zero()
                    } else if i < k {
                        Rational::one()
                    } else {
                        int(-(k as i64))
                    }
                }));
            }
            for i in 0..m {
                for j in i + 1..m {
                    out.push(sym_unit(m, i, j));
                }
            }
        }
        CartanKind::GlComplex(n) => {
            let zero = RationalMatrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let re = ComplexMatrix::from_parts(&sym_unit(n, i, j), &zero).expect("shape");
                    out.push(re.realify());
                    if i != j {
                        let skew = &unit(n, i, j) - &unit(n, j, i);
                        let im = ComplexMatrix::from_parts(&zero, &skew).expect("shape");
                        out.push(im.realify());
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessClaim {
    /// `AᵢAⱼ + AⱼAᵢ = 2δᵢⱼI`.
    CliffordRho1,
    /// Every nonzero combination is invertible.
    NonsingularRho2,
}

/// Matrices in `ι(𝔭)` with the relation they claim.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFamily {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<CartanKind>,
    pub claim: WitnessClaim,
    pub n: usize,
    pub dim: usize,
    pub matrices: Vec<RationalMatrix>,
}

impl WitnessFamily {
    fn new(pair: CartanKind, claim: WitnessClaim, matrices: Vec<RationalMatrix>) -> Self {
        WitnessFamily {
            pair: Some(pair),
            claim,
            n: matrices.len(),
            dim: pair.rep_dim(),
            matrices,
        }
    }
}

/// `n ≤ ρ(N)` matrices `[[0, Bᵢ], [Bᵢᵀ, 0]]` with `B₁ = I` and
/// `B_{i+1} = I ⊗ Jᵢ` for a skew family `J` of size `n − 1`; then
/// `BᵢBⱼᵀ + BⱼBᵢᵀ = BᵢᵀBⱼ + BⱼᵀBᵢ = 2δᵢⱼI`.
fn so_nn_family(size: usize, n: usize) -> Vec<RationalMatrix> {
    let skew = build_epsilon_family(n - 1, Epsilon::Minus);
    assert_eq!(
        size % skew.dim(),
        0,
        "n ≤ ρ(N) keeps the skew dimension a divisor"
    );
    let copies = size / skew.dim();
    let zero = RationalMatrix::zeros(size, size);
    std::iter::once(RationalMatrix::identity(size))
        .chain(skew.matrices().iter().map(|j| j.repeat_diagonal(copies)))
        .map(|b| RationalMatrix::block2(&zero, &b, &b.transpose(), &zero).expect("square blocks"))
        .collect()
}

/// `n ≤ 2·ord₂(N) + 1` Hermitian matrices on `ℂ^N` with
/// `γᵢγⱼ + γⱼγᵢ = 2δᵢⱼI`, from the Jordan–Wigner strings on `ord₂(N)`
/// qubits tensored with the identity on the odd part.
pub fn hermitian_clifford_family(size: usize, n: usize) -> Result<Vec<ComplexMatrix>> {
    let k = ord2(size as u64)? as usize;
    if n > 2 * k + 1 {
        return Err(Error::ExceedsTableBound {
            pair: format!("gl({size},C)"),
            requested: n,
            bound: 2 * k as u64 + 1,
        });
    }
    let c = |re: i64, im: i64| ComplexRational::new(int(re), int(im));
    let from = |rows: [[(i64, i64); 2]; 2]| {
        ComplexMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(a, b)| c(a, b)).collect())
                .collect(),
        )
        .expect("2x2")
    };
    let id = ComplexMatrix::identity(2);
    let x = from([[(0, 0), (1, 0)], [(1, 0), (0, 0)]]);
    let y = from([[(0, 0), (0, -1)], [(0, 1), (0, 0)]]);
    let z = from([[(1, 0), (0, 0)], [(0, 0), (-1, 0)]]);
    let string = |letters: &[&ComplexMatrix]| {
        letters
            .iter()
            .fold(ComplexMatrix::identity(1), |acc, m| acc.kron(m))
    };
    let mut gammas = Vec::with_capacity(2 * k + 1);
    for j in 0..k {
        for middle in [&x, &y] {
            let mut letters = vec![&z; j];
            letters.push(middle);
            letters.extend(std::iter::repeat_n(&id, k - j - 1));
            gammas.push(string(&letters));
        }
    }
    gammas.push(string(&vec![&z; k]));
    let odd = ComplexMatrix::identity(size >> k);
    Ok(gammas.into_iter().take(n).map(|g| odd.kron(&g)).collect())
}

/// A family of `n` elements of `ι(𝔭)` with `AᵢAⱼ + AⱼAᵢ = 2δᵢⱼI`, verified
/// exactly before it is returned.
///
/// * `so(N,N)`: up to `ρ(N)` block matrices `[[0, Bᵢ], [Bᵢᵀ, 0]]`.
/// * `gl(N,ℝ)`, `sl(N,ℝ)` with `N = 2m`: `diag(I_m, −I_m)` followed by the
///   `so(m,m)` family, up to `ρ(m) + 1`; `gl(N,ℝ)` with `N` odd: `I`.
/// * `gl(N,ℂ)`: realified Hermitian Clifford matrices, up to
///   `2·ord₂(N) + 1`.
///
/// Requests above the tabulated `ρ⁽¹⁾` are refused.
pub fn build_rho1_witness(pair: &CartanPair, n: usize) -> Result<WitnessFamily> {
    if n == 0 {
        return Err(Error::EmptyFamily);
    }
    if let CartanKind::On(_) = pair.kind {
        return Err(Error::Unsupported(
            "skew matrices cannot square to +I; o(N) has only nonsingular witnesses".into(),
        ));
    }
    let bound = pair.kind.bounds().rho1;
    if n as u64 > bound {
        return Err(Error::ExceedsTableBound {
            pair: pair.kind.to_string(),
            requested: n,
            bound,
        });
    }
    let matrices = match pair.kind {
        CartanKind::SoNN(size) => so_nn_family(size, n),
        CartanKind::GlReal(size) | CartanKind::SlReal(size) if size % 2 == 1 => {
            vec![RationalMatrix::identity(size)]
        }
        CartanKind::GlReal(size) | CartanKind::SlReal(size) => {
            let half = size / 2;
            let mut out = vec![signature_form(half)];
            if n > 1 {
                out.extend(so_nn_family(half, n - 1));
            }
            out
        }
        CartanKind::GlComplex(size) => hermitian_clifford_family(size, n)?
            .iter()
            .map(ComplexMatrix::realify)
            .collect(),
        CartanKind::On(_) => unreachable!(),
    };
    let witness = WitnessFamily::new(pair.kind, WitnessClaim::CliffordRho1, matrices);
    let check = check_witness(&witness, 0, 0)?;
    if !check.ok {
        return Err(Error::UnverifiedFamily(format!(
            "{} witness failed its own check",
            pair.kind
        )));
    }
    Ok(witness)
}

/// A family of `n` elements of `ι(𝔭)` whose nonzero combinations are all
/// invertible.
///
/// For `O(N)` this is a skew Clifford family of size `n ≤ ρ(N) − 1`
/// repeated along the diagonal; for odd `sl(M,ℝ)` it is
/// [`build_rho2_witness_odd_sl`]; elsewhere `ρ⁽¹⁾ = ρ⁽²⁾` and the Clifford
/// witness is returned.
pub fn build_rho2_witness(pair: &CartanPair, n: usize) -> Result<WitnessFamily> {
    if n == 0 {
        return Err(Error::EmptyFamily);
    }
    let bound = pair.kind.bounds().rho2;
    if n as u64 > bound {
        return Err(Error::ExceedsTableBound {
            pair: pair.kind.to_string(),
            requested: n,
            bound,
        });
    }
    match pair.kind {
        CartanKind::On(size) => {
            let skew = build_epsilon_family(n, Epsilon::Minus);
            let copies = size / skew.dim();
            let matrices = skew
                .matrices()
                .iter()
                .map(|m| m.repeat_diagonal(copies))
                .collect();
            Ok(WitnessFamily::new(
                pair.kind,
                WitnessClaim::NonsingularRho2,
                matrices,
            ))
        }
        CartanKind::SlReal(m) if m % 2 == 1 => build_rho2_witness_odd_sl(m),
        _ => build_rho1_witness(pair, n),
    }
}

/// `diag(1, …, 1, −(M−1))`: symmetric, traceless and invertible.
pub fn build_rho2_witness_odd_sl(m: usize) -> Result<WitnessFamily> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::InvalidPair(format!("expected odd M ≥ 3, got {m}")));
    }
    let diag: Vec<Rational> = (0..m)
        .map(|i| {
            if i + 1 < m {
                Rational::one()
            } else {
                int(1 - m as i64)
            }
        })
        .collect();
    Ok(WitnessFamily::new(
        CartanKind::SlReal(m),
        WitnessClaim::NonsingularRho2,
        vec![RationalMatrix::diagonal(&diag)],
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImpossibilityReport {
    pub m: usize,
    /// Solutions `(p, q)` of `p + q = M`, `p − q = 0` in nonnegative integers.
    pub multiplicity_solutions: Vec<(usize, usize)>,
    pub argument: String,
    pub seed: u64,
    pub candidates: usize,
    pub square_violations: usize,
    pub trace_violations: usize,
    pub all_candidates_violate: bool,
    pub impossible: bool,
}

/// Certifies that no traceless symmetric `A` with `A² = I_M` exists for odd
/// `M`: its eigenvalues are `±1` with multiplicities `p + q = M`, and
/// `tr A = p − q = 0` has no integer solution.
///
/// As a seeded cross-check, `candidates` matrices are tested: half are
/// exact involutions `I − 2P` (`P` an orthogonal projection onto the span
/// of random integer vectors, trace `M − 2·rank P`), half are random
/// traceless symmetric integer matrices. Each must violate `A² = I` or
/// `tr A = 0`.
pub fn odd_sl_impossibility(m: usize, seed: u64, candidates: usize) -> Result<ImpossibilityReport> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::InvalidPair(format!("expected odd M ≥ 3, got {m}")));
    }
    let multiplicity_solutions: Vec<(usize, usize)> = (0..=m)
        .map(|p| (p, m - p))
        .filter(|(p, q)| p == q)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = RationalMatrix::identity(m);
    let (mut square_violations, mut trace_violations, mut all) = (0, 0, true);
    for c in 0..candidates {
        let a = if c % 2 == 0 {
            random_involution(&mut rng, m)
        } else {
            random_traceless_symmetric(&mut rng, m)
        };
        let bad_square = &a * &a != id;
        let bad_trace = !a.trace()?.is_zero();
        square_violations += usize::from(bad_square);
        trace_violations += usize::from(bad_trace);
        all &= bad_square || bad_trace;
    }
    Ok(ImpossibilityReport {
        m,
        argument: format!(
            "A symmetric with A^2 = I has eigenvalues ±1 with multiplicities p + q = {m}; \
             tr A = p - q = 0 would force {m} = 2p, impossible for odd {m}"
        ),
        impossible: multiplicity_solutions.is_empty() && all,
        multiplicity_solutions,
        seed,
        candidates,
        square_violations,
        trace_violations,
        all_candidates_violate: all,
    })
}

fn random_involution(rng: &mut ChaCha8Rng, m: usize) -> RationalMatrix {
    let k = rng.random_range(0..=m);
    if k == 0 {
        return RationalMatrix::identity(m);
    }
    loop {
        let v = RationalMatrix::from_fn(m, k, |_, _| int(rng.random_range(-3..=3)));
        let gram = &v.transpose() * &v;
        if let Ok(Some(inv)) = gram.inverse() {
            let projection = &(&v * &inv) * &v.transpose();
            return &RationalMatrix::identity(m) - &projection.scale(&int(2));
        }
    }
}

fn random_traceless_symmetric(rng: &mut ChaCha8Rng, m: usize) -> RationalMatrix {
    let mut a = RationalMatrix::zeros(m, m);
    let mut trace = 0;
    for i in 0..m {
        for j in i..m {
            let x = rng.random_range(-3..=3i64);
            if i == j {
                if i + 1 == m {
                    a.set(i, i, int(-trace));
                    continue;
                }
                trace += x;
            }
            a.set(i, j, int(x));
            a.set(j, i, int(x));
        }
    }
    a
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub ok: bool,
    pub claim: WitnessClaim,
    /// 1-based indices of members outside `ι(𝔭)`.
    pub membership_failures: Vec<usize>,
    pub relation: Option<VerificationReport>,
    pub pencil: Option<PencilVerdict>,
}

/// Re-verifies a witness: membership of every matrix (when a pair is
/// named) and the claimed relation, exactly. Nonsingular claims go through
/// [`check_span`], with `budget` and `seed` for families of three or more.
pub fn check_witness(w: &WitnessFamily, budget: usize, seed: u64) -> Result<WitnessCheck> {
    if w.matrices.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut membership_failures = Vec::new();
    if let Some(kind) = w.pair {
        let pair = make_pair(kind)?;
        for (i, a) in w.matrices.iter().enumerate() {
            if !p_membership(&pair, a).unwrap_or(false) {
                membership_failures.push(i + 1);
            }
        }
    }
    let (relation, pencil, relation_ok) = match w.claim {
        WitnessClaim::CliffordRho1 => {
            let report = check_anticommutation(&w.matrices, &Rational::one());
            let ok = report.ok;
            (Some(report), None, ok)
        }
        WitnessClaim::NonsingularRho2 => {
            let verdict = check_span(&w.matrices, budget, seed)?;
            let ok = !verdict.is_refuted();
            (None, Some(verdict), ok)
        }
    };
    Ok(WitnessCheck {
        ok: relation_ok && membership_failures.is_empty(),
        claim: w.claim,
        membership_failures,
        relation,
        pencil,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::frac;
    use crate::pencil::PencilMethod;

    fn pair(name: &str) -> CartanPair {
        make_pair(CartanKind::parse(name, &[]).unwrap()).unwrap()
    }

    #[test]
    fn parse_names() {
        assert_eq!(
            CartanKind::parse("so(8,8)", &[]).unwrap(),
            CartanKind::SoNN(8)
        );
        assert_eq!(
            CartanKind::parse("so(N,N)", &[4]).unwrap(),
            CartanKind::SoNN(4)
        );
        assert_eq!(CartanKind::parse("o(4)", &[]).unwrap(), CartanKind::On(4));
        assert_eq!(CartanKind::parse("so(3)", &[]).unwrap(), CartanKind::On(3));
        assert_eq!(
            CartanKind::parse("sl(3,R)", &[]).unwrap(),
            CartanKind::SlReal(3)
        );
        assert_eq!(
            CartanKind::parse("sl(4,R)", &[]).unwrap(),
            CartanKind::SlReal(4)
        );
        assert_eq!(
            CartanKind::parse("u(2)", &[]).unwrap(),
            CartanKind::GlComplex(2)
        );
        assert!(matches!(
            CartanKind::parse("sp(2,2)", &[]),
            Err(Error::Unsupported(_))
        ));
        for kind in [
            CartanKind::SoNN(3),
            CartanKind::On(5),
            CartanKind::GlComplex(2),
        ] {
            assert_eq!(CartanKind::parse(&kind.to_string(), &[]).unwrap(), kind);
        }
    }

    #[test]
    fn so11_p_is_one_dimensional() {
        let basis = p_basis(&pair("so(1,1)"));
        assert_eq!(basis, vec![RationalMatrix::from_i64(&[&[0, 1], &[1, 0]])]);
    }

    #[test]
    fn basis_dimensions() {
        assert_eq!(p_basis(&pair("gl(2,R)")).len(), 3);
        assert_eq!(p_basis(&pair("o(3)")).len(), 3);
        assert_eq!(p_basis(&pair("sl(3,R)")).len(), 5);
        assert_eq!(p_basis(&pair("so(3,3)")).len(), 9);
        assert_eq!(p_basis(&pair("gl(3,C)")).len(), 9);
    }

    #[test]
    fn basis_elements_are_members_and_independent() {
        for name in [
            "so(2,2)", "gl(3,R)", "o(4)", "sl(4,R)", "sl(3,R)", "gl(2,C)",
        ] {
            let p = pair(name);
            let basis = p_basis(&p);
            for b in &basis {
                assert!(p_membership(&p, b).unwrap(), "{name}");
            }
            let n = p.rep_dim;
            let stacked =
                RationalMatrix::from_fn(n * n, basis.len(), |r, c| basis[c].entries()[r].clone());
            assert_eq!(stacked.rank(), basis.len(), "{name}");
        }
    }

    #[test]
    fn membership_examples() {
        let so = pair("so(1,1)");
        assert!(p_membership(&so, &RationalMatrix::from_i64(&[&[0, 3], &[3, 0]])).unwrap());
        assert!(!p_membership(&so, &RationalMatrix::from_i64(&[&[1, 0], &[0, -1]])).unwrap());
        let gl = pair("gl(2,R)");
        assert!(!p_membership(&gl, &RationalMatrix::from_i64(&[&[0, 1], &[-1, 0]])).unwrap());
        assert!(p_membership(&gl, &RationalMatrix::identity(3)).is_err());
        let sl = pair("sl(3,R)");
        assert!(!p_membership(&sl, &RationalMatrix::identity(3)).unwrap());
    }

    #[test]
    fn so_nn_witnesses_up_to_rho() {
        for size in [1usize, 2, 4, 8, 16] {
            let p = make_pair(CartanKind::SoNN(size)).unwrap();
            let r = rho(size as u64).unwrap() as usize;
            let w = build_rho1_witness(&p, r).unwrap();
            assert_eq!(w.matrices.len(), r);
            assert!(check_witness(&w, 0, 0).unwrap().ok);
            assert!(matches!(
                build_rho1_witness(&p, r + 1),
                Err(Error::ExceedsTableBound { .. })
            ));
        }
    }

    #[test]
    fn so11_and_so33_examples() {
        let w = build_rho1_witness(&pair("so(1,1)"), 1).unwrap();
        assert_eq!(w.matrices[0], RationalMatrix::from_i64(&[&[0, 1], &[1, 0]]));
        let p = pair("so(3,3)");
        let w = build_rho1_witness(&p, 1).unwrap();
        assert_eq!(w.matrices[0].block(0, 3, 3, 3), RationalMatrix::identity(3));
        assert!(build_rho1_witness(&p, 2).is_err());
    }

    #[test]
    fn gl_and_sl_even_witnesses() {
        // gl(N,ℝ): ρ(N/2) + 1; sl(2m,ℝ): ρ(m) + 1
        for (name, n) in [
            ("gl(8,R)", 5),
            ("gl(16,R)", 9),
            ("sl(4,R)", 3),
            ("gl(3,R)", 1),
        ] {
            let w = build_rho1_witness(&pair(name), n).unwrap();
            assert!(check_witness(&w, 0, 0).unwrap().ok, "{name}");
            assert!(build_rho1_witness(&pair(name), n + 1).is_err(), "{name}");
        }
        assert!(build_rho1_witness(&pair("sl(3,R)"), 1).is_err());
    }

    #[test]
    fn complex_witnesses_realify_with_the_same_relations() {
        for size in [1usize, 2, 4, 6, 8] {
            let n = 2 * ord2(size as u64).unwrap() as usize + 1;
            let gammas = hermitian_clifford_family(size, n).unwrap();
            // relations before realification, over the Gaussian rationals
            for i in 0..n {
                for j in 0..n {
                    let s = gammas[i].anticommutator(&gammas[j]).unwrap();
                    let expected = if i == j {
                        ComplexMatrix::scalar(size, ComplexRational::new(int(2), int(0)))
                    } else {
                        ComplexMatrix::zeros(size, size)
                    };
                    assert_eq!(s, expected);
                }
            }
            let w =
                build_rho1_witness(&make_pair(CartanKind::GlComplex(size)).unwrap(), n).unwrap();
            assert_eq!(w.dim, 2 * size);
            assert!(check_witness(&w, 0, 0).unwrap().ok);
        }
    }

    #[test]
    fn sphere_witnesses_for_o_n() {
        for size in [2usize, 4, 8, 16] {
            let p = make_pair(CartanKind::On(size)).unwrap();
            let n = rho(size as u64).unwrap() as usize - 1;
            let w = build_rho2_witness(&p, n).unwrap();
            let check = check_witness(&w, 50, 1).unwrap();
            assert!(check.ok);
            assert!(check.pencil.unwrap().is_proven());
            assert!(build_rho2_witness(&p, n + 1).is_err());
        }
        assert!(build_rho1_witness(&pair("o(4)"), 1).is_err());
    }

    #[test]
    fn odd_sl_rho2_witnesses() {
        let w = build_rho2_witness_odd_sl(3).unwrap();
        assert_eq!(
            w.matrices[0],
            RationalMatrix::diagonal(&[int(1), int(1), int(-2)])
        );
        assert_eq!(w.matrices[0].det().unwrap(), int(-2));
        let w = build_rho2_witness_odd_sl(5).unwrap();
        assert_eq!(*w.matrices[0].get(4, 4), int(-4));
        let check = check_witness(&w, 0, 0).unwrap();
        assert!(check.ok);
        assert_eq!(check.pencil.unwrap().method, PencilMethod::ExactN1);
        assert!(build_rho2_witness_odd_sl(4).is_err());
    }

    #[test]
    fn odd_sl_is_impossible() {
        for m in [3, 5, 7, 9] {
            let r = odd_sl_impossibility(m, 11, 200).unwrap();
            assert!(r.impossible, "{m}");
            assert!(r.multiplicity_solutions.is_empty());
        }
        let r = odd_sl_impossibility(3, 7, 1000).unwrap();
        assert!(r.all_candidates_violate);
        // both constraints are exercised
        assert!(r.square_violations > 0 && r.trace_violations > 0);
        assert!(odd_sl_impossibility(4, 0, 1).is_err());
    }

    #[test]
    fn involutions_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_involution(&mut rng, 5);
            assert_eq!(&a * &a, RationalMatrix::identity(5));
            assert!(a.is_symmetric());
        }
    }

    #[test]
    fn clifford_claims_give_nonsingular_spans() {
        let w = build_rho1_witness(&pair("so(4,4)"), 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let id = RationalMatrix::identity(8);
        for _ in 0..200 {
            let t: Vec<Rational> = (0..4)
                .map(|_| frac(rng.random_range(-9..=9), rng.random_range(1..=9)))
                .collect();
            if t.iter().all(Zero::is_zero) {
                continue;
            }
            let norm: Rational = t.iter().map(|x| x * x).sum();
            let s = crate::exactmat::linear_combination(&t, &w.matrices).unwrap();
            assert_eq!(&s * &s, id.scale(&norm));
            assert!(!s.det().unwrap().is_zero());
        }
    }

    #[test]
    fn check_witness_reports_failing_pair() {
        let id = RationalMatrix::identity(2);
        let w = WitnessFamily {
            pair: None,
            claim: WitnessClaim::CliffordRho1,
            n: 2,
            dim: 2,
            matrices: vec![id.clone(), id],
        };
        let check = check_witness(&w, 0, 0).unwrap();
        assert!(!check.ok);
        let failure = check.relation.unwrap().failure.unwrap();
        assert_eq!((failure.i, failure.j), (1, 2));
    }

    #[test]
    fn witness_json_round_trip() {
        let w = build_rho1_witness(&pair("so(2,2)"), 2).unwrap();
        let text = serde_json::to_string(&w).unwrap();
        assert!(text.contains(r#""pair":"so(2,2)""#));
        assert!(text.contains(r#""claim":"clifford_rho1""#));
        let back: WitnessFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
    }
}
