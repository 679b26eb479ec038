//! Linear actions on the punctured space `M = ℝ^N ∖ {0}`.
//!
//! A generator `Ã` induces the fundamental field `X(x) = Ãx`, and for the
//! standard flat connection `∇X` is the constant endomorphism `Ã`. So
//! pointwise independence of the fields is a rank condition on
//! `[Ã₁x | … | Ãₙx]`, equivalent to nonsingularity of the span, and the
//! connection-operator relations are matrix relations.

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{extend_to_algebra_hom, Blade, CliffordElement, Epsilon, EpsilonFamily};
use crate::error::{Error, Result};
use crate::exactmat::{
    int, linear_combination, ComplexMatrix, ComplexRational, Rational, RationalMatrix,
};
use crate::hurwitz::TableValue;
use crate::liepairs::{
    build_rho1_witness, build_rho2_witness, make_pair, odd_sl_impossibility, p_basis, CartanKind,
};
use crate::pencil::{
    check_complex_span, check_span, family_dim, field_matrix, refute_search, PencilMethod,
    PencilVerdict,
};

/// Generators `Ãᵢ = ι(Aᵢ)` of a linear action on `ℝ^N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearAction {
    pub dim: usize,
    pub generators: Vec<RationalMatrix>,
    /// Catalog pair the generators come from, for table cross-checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<CartanKind>,
}

impl LinearAction {
    pub fn new(generators: Vec<RationalMatrix>) -> Result<Self> {
        let dim = family_dim(&generators)?;
        Ok(LinearAction {
            dim,
            generators,
            pair: None,
        })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    fn validate(&self) -> Result<()> {
        if family_dim(&self.generators)? != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "generators do not act on dimension {}",
                self.dim
            )));
        }
        Ok(())
    }
}

/// Generators for a catalog pair: a witness family realizing the tabulated
/// value, followed by a basis of `ι(𝔭)` when that has at most 32 elements.
/// Duplicates are dropped.
pub fn catalog_action(kind: CartanKind) -> Result<LinearAction> {
    let pair = make_pair(kind)?;
    let bounds = kind.bounds();
    let mut generators = Vec::new();
    if bounds.rho1 > 0 {
        generators.extend(build_rho1_witness(&pair, bounds.rho1 as usize)?.matrices);
    } else if bounds.rho2 > 0 {
        generators.extend(build_rho2_witness(&pair, bounds.rho2 as usize)?.matrices);
    }
    let basis = p_basis(&pair);
    if basis.len() <= 32 {
        for b in basis {
            if !generators.contains(&b) {
                generators.push(b);
            }
        }
    }
    if generators.is_empty() {
        generators.push(RationalMatrix::zeros(pair.rep_dim, pair.rep_dim));
    }
    Ok(LinearAction {
        dim: pair.rep_dim,
        generators,
        pair: Some(kind),
    })
}

/// `X_{Aᵢ}(x) = Ãᵢx` for the 1-based generator index `i`.
pub fn fundamental_field_at(
    action: &LinearAction,
    i: usize,
    x: &[Rational],
) -> Result<Vec<Rational>> {
    let a = generator(action, i)?;
    if x.iter().all(Zero::is_zero) {
        return Err(Error::OriginPoint);
    }
    a.mul_vec(x)
}

fn generator(action: &LinearAction, i: usize) -> Result<&RationalMatrix> {
    if i == 0 || i > action.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: action.len(),
        });
    }
    Ok(&action.generators[i - 1])
}

/// A sampled point where the fields are dependent, with the coefficients
/// `t` read off the kernel of `[Ã₁x | … | Ãₙx]`, so `(Σ tᵢÃᵢ)x = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependentPoint {
    #[serde(with = "crate::json::rational_vec")]
    pub point: Vec<Rational>,
    #[serde(with = "crate::json::rational_vec")]
    pub coefficients: Vec<Rational>,
    /// `det(Σ tᵢÃᵢ) = 0`, checked exactly.
    pub singular_combination: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSampleReport {
    #[serde(serialize_with = "points_ser", deserialize_with = "points_de")]
    pub points: Vec<Vec<Rational>>,
    pub ranks: Vec<usize>,
    pub independent_everywhere_sampled: bool,
    pub first_dependent: Option<DependentPoint>,
}

fn points_ser<S: serde::Serializer>(
    p: &[Vec<Rational>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let text: Vec<Vec<String>> = p
        .iter()
        .map(|v| v.iter().map(crate::exactmat::format_rational).collect())
        .collect();
    text.serialize(s)
}

fn points_de<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
    Vec::<Vec<String>>::deserialize(d)?
        .iter()
        .map(|v| {
            v.iter()
                .map(|t| crate::exactmat::parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        })
        .collect()
}

// Range of the random integer coordinates of sample points.
const POINT_RANGE: i64 = 10_000;

/// Exact ranks of `[Ã₁x | … | Ãₙx]` at sample points.
///
/// The points are, in order: the standard basis vectors, rational points
/// near the kernels of the most singular combinations found by
/// [`refute_search`] (run with the same seed and `points` float samples),
/// and seeded random integer points, up to `points` in total (the basis
/// vectors are always included).
pub fn sample_pointwise_independence(
    action: &LinearAction,
    points: usize,
    seed: u64,
) -> Result<FieldSampleReport> {
    action.validate()?;
    let (dim, n) = (action.dim, action.len());
    if n > dim {
        return Err(Error::DimensionMismatch(format!(
            "{n} fields cannot be independent in dimension {dim}"
        )));
    }
    let mut sample: Vec<Vec<Rational>> = (0..dim)
        .map(|k| {
            (0..dim)
                .map(|i| if i == k { int(1) } else { int(0) })
                .collect()
        })
        .collect();
    let harvest = refute_search(&action.generators, seed, points)?.harvest;
    for x in harvest {
        if !x.iter().all(Zero::is_zero) && !sample.contains(&x) {
            sample.push(x);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_9017);
    while sample.len() < points {
        let x: Vec<Rational> = (0..dim)
            .map(|_| int(rng.random_range(-POINT_RANGE..=POINT_RANGE)))
            .collect();
        if !x.iter().all(Zero::is_zero) {
            sample.push(x);
        }
    }
    let mut ranks = Vec::with_capacity(sample.len());
    let mut first_dependent = None;
    for x in &sample {
        let cols = field_matrix(&action.generators, x)?;
        let rank = cols.rank();
        if rank < n && first_dependent.is_none() {
            let t = cols.kernel().into_iter().next().expect("rank deficit");
            let singular = linear_combination(&t, &action.generators)?.det()?.is_zero();
            first_dependent = Some(DependentPoint {
                point: x.clone(),
                coefficients: t,
                singular_combination: singular,
            });
        }
        ranks.push(rank);
    }
    Ok(FieldSampleReport {
        independent_everywhere_sampled: ranks.iter().all(|&r| r == n),
        points: sample,
        ranks,
        first_dependent,
    })
}

/// `∇X_{Aᵢ}` for the standard flat connection: in coordinates
/// `∇_{∂ₗ} X_A = Σₖ ã_{kl} ∂ₖ`, the constant endomorphism `Ãᵢ` itself.
pub fn flat_connection_operator(action: &LinearAction, i: usize) -> Result<RationalMatrix> {
    Ok(generator(action, i)?.clone())
}

/// Estimated generalized Hurwitz–Radon number with its evidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoEstimate {
    pub mode: String,
    pub value: usize,
    /// Largest size backed by an exact proof.
    pub certified_value: usize,
    pub certificate: String,
    pub witnesses: Vec<RationalMatrix>,
    pub verdicts: Vec<PencilVerdict>,
    pub table: Option<TableValue>,
    pub table_agrees: Option<bool>,
    /// A search cap was hit; the value is only a lower bound.
    pub lower_bound_only: bool,
    pub subsets_checked: usize,
}

// Recombinations are tried only for this many generators or fewer.
const RECOMBINE_LIMIT: usize = 24;
// Nodes visited by the clique search before giving up.
const CLIQUE_NODE_CAP: usize = 200_000;
// Subsets examined per level of the span search.
const LEVEL_CAP: usize = 256;

fn sqrt_rational(c: &Rational) -> Option<Rational> {
    let root = |n: &num_bigint::BigInt| {
        let r = n.sqrt();
        (&r * &r == *n).then_some(r)
    };
    if c.is_negative() {
        return None;
    }
    Some(Rational::new(root(c.numer())?, root(c.denom())?))
}

/// Elements of the span (generators, and pairwise sums and differences
/// when there are few generators) whose square is a positive multiple of
/// `εI` by a rational square, rescaled so the square is exactly `εI`.
/// With `skew_for`, only elements `T` with `TᵀM + MT = 0` are kept.
fn clifford_candidates(
    action: &LinearAction,
    eps: Epsilon,
    skew_for: Option<&RationalMatrix>,
) -> Vec<RationalMatrix> {
    let gens = &action.generators;
    let mut pool: Vec<RationalMatrix> = gens.clone();
    if gens.len() <= RECOMBINE_LIMIT {
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                pool.push(&gens[i] + &gens[j]);
                pool.push(&gens[i] - &gens[j]);
            }
        }
    }
    let sign = int(eps.sign());
    let mut out: Vec<RationalMatrix> = Vec::new();
    for a in pool {
        if a.is_zero() {
            continue;
        }
        if let Some(m) = skew_for {
            if !(&(&a.transpose() * m) + &(m * &a)).is_zero() {
                continue;
            }
        }
        let Some(c) = (&a * &a).scalar_multiple_of_identity() else {
            continue;
        };
        let Some(root) = sqrt_rational(&(c * &sign)) else {
            continue;
        };
        if root.is_zero() {
            continue;
        }
        let scaled = a.scale(&root.recip());
        let negated = -&scaled;
        if !out.contains(&scaled) && !out.contains(&negated) {
            out.push(scaled);
        }
    }
    out
}

/// Largest mutually anticommuting subset, by exhaustive search with a node
/// cap. Returns the clique and whether the cap was hit.
fn anticommuting_clique(candidates: &[RationalMatrix]) -> (Vec<RationalMatrix>, bool) {
    let n = candidates.len();
    let mut adjacent = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let ok = candidates[i]
                .anticommutator(&candidates[j])
                .map(|m| m.is_zero())
                .unwrap_or(false);
            adjacent[i][j] = ok;
            adjacent[j][i] = ok;
        }
    }
    let mut best: Vec<usize> = Vec::new();
    let mut nodes = 0usize;
    fn grow(
        adjacent: &[Vec<bool>],
        current: &mut Vec<usize>,
        allowed: Vec<usize>,
        best: &mut Vec<usize>,
        nodes: &mut usize,
    ) {
        *nodes += 1;
        if current.len() > best.len() {
            *best = current.clone();
        }
        if *nodes > CLIQUE_NODE_CAP || current.len() + allowed.len() <= best.len() {
            return;
        }
        for (k, &v) in allowed.iter().enumerate() {
            if current.len() + allowed.len() - k <= best.len() {
                return;
            }
            let next: Vec<usize> = allowed[k + 1..]
                .iter()
                .copied()
                .filter(|&w| adjacent[v][w])
                .collect();
            current.push(v);
            grow(adjacent, current, next, best, nodes);
            current.pop();
        }
    }
    grow(
        &adjacent,
        &mut Vec::new(),
        (0..n).collect(),
        &mut best,
        &mut nodes,
    );
    (
        best.into_iter().map(|i| candidates[i].clone()).collect(),
        nodes > CLIQUE_NODE_CAP,
    )
}

fn table_check(
    action: &LinearAction,
    value: impl Fn(&TableValue) -> u64,
    found: usize,
) -> (Option<TableValue>, Option<bool>) {
    match action.pair {
        Some(kind) => {
            let t = kind.bounds();
            let agrees = found as u64 == value(&t);
            (Some(t), Some(agrees))
        }
        None => (None, None),
    }
}

/// `ρ⁻`: the largest family in the span of the generators with
/// `TᵢTⱼ + TⱼTᵢ = 2δᵢⱼI`, searched over generators and their pairwise
/// recombinations. For odd `sl(M,ℝ)` the value 0 is certified by the
/// eigenvalue-parity argument.
pub fn estimate_rho_minus(action: &LinearAction) -> Result<RhoEstimate> {
    action.validate()?;
    let candidates = clifford_candidates(action, Epsilon::Plus, None);
    let (clique, capped) = anticommuting_clique(&candidates);
    let mut certificate = if clique.is_empty() {
        "none"
    } else {
        "clifford_relation"
    }
    .to_string();
    let mut certified_value = clique.len();
    if let Some(CartanKind::SlReal(m)) = action.pair {
        if m % 2 == 1 && m >= 3 && clique.is_empty() && odd_sl_impossibility(m, 0, 64)?.impossible {
            certificate = "odd_sl_impossibility".into();
            certified_value = 0;
        }
    }
    let (table, table_agrees) = table_check(action, |t| t.rho1, clique.len());
    Ok(RhoEstimate {
        mode: "minus".into(),
        value: clique.len(),
        certified_value,
        certificate,
        witnesses: clique,
        verdicts: Vec::new(),
        table,
        table_agrees,
        lower_bound_only: capped,
        subsets_checked: candidates.len(),
    })
}

/// `ρ⁺` with a constant metric: the largest family in the span with
/// `TᵢTⱼ + TⱼTᵢ = −2δᵢⱼI` and every `Tᵢ` metric-skew.
pub fn estimate_rho_plus(action: &LinearAction, metric: &RationalMatrix) -> Result<RhoEstimate> {
    action.validate()?;
    require_metric(metric, action.dim)?;
    let candidates = clifford_candidates(action, Epsilon::Minus, Some(metric));
    let (clique, capped) = anticommuting_clique(&candidates);
    Ok(RhoEstimate {
        mode: "plus".into(),
        value: clique.len(),
        certified_value: clique.len(),
        certificate: if clique.is_empty() {
            "none"
        } else {
            "clifford_relation"
        }
        .into(),
        witnesses: clique,
        verdicts: Vec::new(),
        table: None,
        table_agrees: None,
        lower_bound_only: capped,
        subsets_checked: candidates.len(),
    })
}

struct SpanSearch {
    value: usize,
    certified_value: usize,
    best: Vec<usize>,
    best_verdict: Option<PencilVerdict>,
    best_certified: Vec<usize>,
    checked: usize,
    capped: bool,
}

/// Level-wise search for the largest subset of `0..count` whose span
/// passes `check`. A subset is examined only if every subset one smaller
/// passed, since a span containing a singular combination makes every
/// larger span fail too.
fn span_search(
    count: usize,
    mut check: impl FnMut(&[usize]) -> Result<PencilVerdict>,
) -> Result<SpanSearch> {
    let mut out = SpanSearch {
        value: 0,
        certified_value: 0,
        best: Vec::new(),
        best_verdict: None,
        best_certified: Vec::new(),
        checked: 0,
        capped: false,
    };
    let mut level: Vec<Vec<usize>> = (0..count).map(|i| vec![i]).collect();
    while !level.is_empty() {
        if level.len() > LEVEL_CAP {
            level.truncate(LEVEL_CAP);
            out.capped = true;
        }
        let mut survivors = Vec::new();
        for subset in level {
            let verdict = check(&subset)?;
            out.checked += 1;
            if verdict.is_refuted() {
                continue;
            }
            if subset.len() > out.value {
                out.value = subset.len();
                out.best = subset.clone();
                out.best_verdict = Some(verdict.clone());
            }
            if verdict.is_proven() && subset.len() > out.certified_value {
                out.certified_value = subset.len();
                out.best_certified = subset.clone();
                if out.value == subset.len() {
                    out.best = subset.clone();
                    out.best_verdict = Some(verdict.clone());
                }
            }
            survivors.push(subset);
        }
        let alive: HashSet<Vec<usize>> = survivors.iter().cloned().collect();
        let mut next = Vec::new();
        for s in &survivors {
            let last = *s.last().expect("nonempty");
            for j in last + 1..count {
                let mut grown = s.clone();
                grown.push(j);
                let hereditary = (0..grown.len() - 1).all(|drop| {
                    let mut sub = grown.clone();
                    sub.remove(drop);
                    alive.contains(&sub)
                });
                if hereditary {
                    next.push(grown);
                }
            }
        }
        level = next;
    }
    Ok(out)
}

/// `ρ_{G,𝔰}`: the largest `k` such that some `k` generators span a space
/// of invertible matrices (every nonzero combination invertible), which is
/// the condition for `k` pointwise independent fundamental fields.
///
/// Subsets of generators are checked level by level with [`check_span`];
/// a Clifford family found in the span (including recombinations) gives a
/// certified lower bound as well. The reported certificate is the method
/// of the best subset's verdict; `certified_value` counts only proven
/// verdicts.
pub fn estimate_rho_g(action: &LinearAction, budget: usize, seed: u64) -> Result<RhoEstimate> {
    action.validate()?;
    let gens = &action.generators;
    let search = span_search(gens.len(), |subset| {
        let family: Vec<RationalMatrix> = subset.iter().map(|&i| gens[i].clone()).collect();
        check_span(&family, budget, seed)
    })?;
    let mut clique = Vec::new();
    for eps in [Epsilon::Plus, Epsilon::Minus] {
        let (c, _) = anticommuting_clique(&clifford_candidates(action, eps, None));
        if c.len() > clique.len() {
            clique = c;
        }
    }
    let (mut value, mut certified_value) = (search.value, search.certified_value);
    let (mut witnesses, mut verdicts, mut certificate): (
        Vec<RationalMatrix>,
        Vec<PencilVerdict>,
        String,
    );
    witnesses = search.best.iter().map(|&i| gens[i].clone()).collect();
    verdicts = search.best_verdict.clone().into_iter().collect();
    certificate = search
        .best_verdict
        .as_ref()
        .map(|v| v.method.as_str().to_string())
        .unwrap_or_else(|| "none".into());
    if clique.len() > certified_value {
        certified_value = clique.len();
        if clique.len() >= value {
            value = clique.len();
            verdicts = vec![check_span(&clique, budget, seed)?];
            witnesses = clique;
            certificate = PencilMethod::CliffordCertificate.as_str().into();
        }
    }
    let (table, table_agrees) = table_check(action, |t| t.rho2, value);
    Ok(RhoEstimate {
        mode: "g".into(),
        value,
        certified_value,
        certificate,
        witnesses,
        verdicts,
        table,
        table_agrees,
        lower_bound_only: search.capped,
        subsets_checked: search.checked,
    })
}

fn require_metric(metric: &RationalMatrix, dim: usize) -> Result<()> {
    if metric.rows() != dim || metric.cols() != dim {
        return Err(Error::InvalidMetric(format!(
            "expected {dim}x{dim}, got {}x{}",
            metric.rows(),
            metric.cols()
        )));
    }
    if !metric.is_symmetric() {
        return Err(Error::InvalidMetric("not symmetric".into()));
    }
    // Sylvester: all leading principal minors positive
    for k in 1..=dim {
        if !metric.block(0, 0, k, k).det()?.is_positive() {
            return Err(Error::InvalidMetric("not positive definite".into()));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KillingReport {
    pub ok: bool,
    /// 1-based indices of generators with `ÃᵀM + MÃ ≠ 0`.
    pub failures: Vec<usize>,
}

/// Checks `ÃᵢᵀM + MÃᵢ = 0` for every generator: the fields are Killing for
/// the constant metric `M`, equivalently `∇X` is `M`-skew.
pub fn killing_skew_check(action: &LinearAction, metric: &RationalMatrix) -> Result<KillingReport> {
    action.validate()?;
    require_metric(metric, action.dim)?;
    let failures: Vec<usize> = action
        .generators
        .iter()
        .enumerate()
        .filter(|(_, a)| !(&(&a.transpose() * metric) + &(metric * *a)).is_zero())
        .map(|(i, _)| i + 1)
        .collect();
    Ok(KillingReport {
        ok: failures.is_empty(),
        failures,
    })
}

/// A rank-`n` Clifford structure on the trivial bundle `E = M × ℝⁿ`: the
/// orthonormal frame `s₁..sₙ` of `E` is sent to the constant fields
/// `frame_images`, each metric-skew with `TᵢTⱼ + TⱼTᵢ = −2δᵢⱼI`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordStructureWitness {
    pub rank: usize,
    pub metric: RationalMatrix,
    pub frame_images: Vec<RationalMatrix>,
}

/// Evidence that a frame extends to an algebra homomorphism
/// `Cl(0,n) → End(TM)` sending `E` into skew endomorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadBack {
    pub blade_pairs_checked: usize,
    pub multiplicative: bool,
    pub unit_preserved: bool,
    pub skew_images: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordStructureReport {
    pub ok: bool,
    pub requested_rank: usize,
    pub witness: Option<CliffordStructureWitness>,
    pub read_back: Option<ReadBack>,
    /// Largest qualifying family found when the request could not be met.
    pub best_partial: Vec<RationalMatrix>,
    pub reason: Option<String>,
}

/// Builds a rank-`n` Clifford structure from `n` elements of the span with
/// `TᵢTⱼ + TⱼTᵢ = −2δᵢⱼI` and `TᵢᵀM + MTᵢ = 0`, then reads the algebra
/// homomorphism back off the frame and checks it on every pair of blades.
pub fn assemble_clifford_structure(
    action: &LinearAction,
    metric: &RationalMatrix,
    n: usize,
) -> Result<CliffordStructureReport> {
    action.validate()?;
    require_metric(metric, action.dim)?;
    let candidates = clifford_candidates(action, Epsilon::Minus, Some(metric));
    let (clique, _) = anticommuting_clique(&candidates);
    if clique.len() < n || n == 0 {
        let reason = if n == 0 {
            "rank must be positive".to_string()
        } else if candidates.is_empty() {
            "no metric-skew element of the span squares to a negative multiple of I".to_string()
        } else {
            format!("largest qualifying family has {} elements", clique.len())
        };
        return Ok(CliffordStructureReport {
            ok: false,
            requested_rank: n,
            witness: None,
            read_back: None,
            best_partial: clique,
            reason: Some(reason),
        });
    }
    let frame: Vec<RationalMatrix> = clique.into_iter().take(n).collect();
    let witness = CliffordStructureWitness {
        rank: n,
        metric: metric.clone(),
        frame_images: frame,
    };
    let read_back = read_back(&witness)?;
    let ok = read_back.multiplicative && read_back.unit_preserved && read_back.skew_images;
    Ok(CliffordStructureReport {
        ok,
        requested_rank: n,
        witness: Some(witness),
        read_back: Some(read_back),
        best_partial: Vec::new(),
        reason: (!ok).then(|| "read-back failed".to_string()),
    })
}

/// Extends the frame to `Cl(0,n)` and checks `H(xy) = H(x)H(y)` on all
/// pairs of basis blades, `H(1) = I`, and skewness of `H(eᵢ)`.
pub fn read_back(witness: &CliffordStructureWitness) -> Result<ReadBack> {
    let fam = EpsilonFamily::new(
        Epsilon::Minus,
        witness.metric.rows(),
        witness.frame_images.clone(),
    )?;
    let hom = extend_to_algebra_hom(&fam)?;
    let sig = hom.signature();
    let blades: Vec<CliffordElement> = (0..sig.dimension() as u32)
        .map(|b| CliffordElement::from_blade(sig, Blade(b), Rational::one()))
        .collect();
    let images = blades
        .iter()
        .map(|b| hom.apply(b))
        .collect::<Result<Vec<_>>>()?;
    let mut multiplicative = true;
    let mut checked = 0;
    for (x, hx) in blades.iter().zip(&images) {
        for (y, hy) in blades.iter().zip(&images) {
            checked += 1;
            multiplicative &= hom.apply(&(x * y))? == hx * hy;
        }
    }
    let m = &witness.metric;
    let skew_images = (1..=sig.generators()).all(|i| {
        let e = CliffordElement::generator(sig, i).expect("in range");
        let t = hom.apply(&e).expect("signature matches");
        (&(&t.transpose() * m) + &(m * &t)).is_zero()
    });
    Ok(ReadBack {
        blade_pairs_checked: checked,
        multiplicative,
        unit_preserved: images[0] == RationalMatrix::identity(witness.metric.rows()),
        skew_images,
    })
}

/// A complex linear action on `ℂ^N`, generators `A + iB` over the Gaussian
/// rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexAction {
    pub dim: usize,
    pub generators: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct ComplexPart {
    re: RationalMatrix,
    im: RationalMatrix,
}

#[derive(Serialize, Deserialize)]
struct ComplexActionRepr {
    dim: usize,
    generators: Vec<ComplexPart>,
}

impl Serialize for ComplexAction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexActionRepr {
            dim: self.dim,
            generators: self
                .generators
                .iter()
                .map(|g| ComplexPart {
                    re: g.real_part(),
                    im: g.imag_part(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexAction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ComplexActionRepr::deserialize(d)?;
        let pairs: Vec<(RationalMatrix, RationalMatrix)> =
            repr.generators.into_iter().map(|p| (p.re, p.im)).collect();
        let action = ComplexAction::from_parts(&pairs).map_err(serde::de::Error::custom)?;
        if action.dim != repr.dim {
            return Err(serde::de::Error::custom("generators do not match dim"));
        }
        Ok(action)
    }
}

impl ComplexAction {
    pub fn new(generators: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = family_dim(&generators)?;
        Ok(ComplexAction { dim, generators })
    }

    /// From real and imaginary parts; the parts must share a shape.
    pub fn from_parts(parts: &[(RationalMatrix, RationalMatrix)]) -> Result<Self> {
        let generators = parts
            .iter()
            .map(|(a, b)| {
                if !a.same_shape(b) {
                    return Err(Error::DimensionMismatch(format!(
                        "real part {}x{} vs imaginary part {}x{}",
                        a.rows(),
                        a.cols(),
                        b.rows(),
                        b.cols()
                    )));
                }
                ComplexMatrix::from_parts(a, b)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(generators)
    }
}

/// `η(A + iB) = [[A, −B], [B, A]]` applied to every generator; the action
/// on `ℂ^N` becomes an action on `ℝ^{2N}` through `x + iy ↦ (x; y)`.
pub fn realify(action: &ComplexAction) -> Result<LinearAction> {
    LinearAction::new(
        action
            .generators
            .iter()
            .map(ComplexMatrix::realify)
            .collect(),
    )
}

/// `x + iy ↦ (x; y)`.
pub fn realify_point(z: &[ComplexRational]) -> Vec<Rational> {
    z.iter()
        .map(|c| c.re.clone())
        .chain(z.iter().map(|c| c.im.clone()))
        .collect()
}

/// Rank over ℝ of the fields `A₁z, …, Aₙz` at a point of `ℂ^N`, computed
/// in Gaussian-rational arithmetic.
pub fn complex_field_rank(action: &ComplexAction, z: &[ComplexRational]) -> Result<usize> {
    if z.iter().all(Zero::is_zero) {
        return Err(Error::OriginPoint);
    }
    let columns = action
        .generators
        .iter()
        .map(|g| g.mul_vec(z))
        .collect::<Result<Vec<_>>>()?;
    let n = action.dim;
    // real coordinates of each column: real parts, then imaginary parts
    let real = RationalMatrix::from_fn(2 * n, columns.len(), |r, c| {
        let entry = &columns[c][r % n];
        if r < n {
            entry.re.clone()
        } else {
            entry.im.clone()
        }
    });
    Ok(real.rank())
}

/// [`estimate_rho_g`] for a complex action, with every span checked by
/// [`check_complex_span`] over the Gaussian rationals.
pub fn estimate_rho_g_complex(
    action: &ComplexAction,
    budget: usize,
    seed: u64,
) -> Result<RhoEstimate> {
    let gens = &action.generators;
    family_dim(gens)?;
    let search = span_search(gens.len(), |subset| {
        let family: Vec<ComplexMatrix> = subset.iter().map(|&i| gens[i].clone()).collect();
        check_complex_span(&family, budget, seed)
    })?;
    let certificate = search
        .best_verdict
        .as_ref()
        .map(|v| v.method.as_str().to_string())
        .unwrap_or_else(|| "none".into());
    Ok(RhoEstimate {
        mode: "g".into(),
        value: search.value,
        certified_value: search.certified_value,
        certificate,
        witnesses: search.best.iter().map(|&i| gens[i].realify()).collect(),
        verdicts: search.best_verdict.into_iter().collect(),
        table: None,
        table_agrees: None,
        lower_bound_only: search.capped,
        subsets_checked: search.checked,
    })
}

/// Same level-wise subset search as [`estimate_rho_g`] without the
/// recombination clique, so the result is directly comparable with
/// [`estimate_rho_g_complex`] on the realified generators.
pub fn estimate_rho_g_subsets(
    action: &LinearAction,
    budget: usize,
    seed: u64,
) -> Result<RhoEstimate> {
    action.validate()?;
    let gens = &action.generators;
    let search = span_search(gens.len(), |subset| {
        let family: Vec<RationalMatrix> = subset.iter().map(|&i| gens[i].clone()).collect();
        check_span(&family, budget, seed)
    })?;
    let certificate = search
        .best_verdict
        .as_ref()
        .map(|v| v.method.as_str().to_string())
        .unwrap_or_else(|| "none".into());
    Ok(RhoEstimate {
        mode: "g".into(),
        value: search.value,
        certified_value: search.certified_value,
        certificate,
        witnesses: search.best.iter().map(|&i| gens[i].clone()).collect(),
        verdicts: search.best_verdict.into_iter().collect(),
        table: None,
        table_agrees: None,
        lower_bound_only: search.capped,
        subsets_checked: search.checked,
    })
}
