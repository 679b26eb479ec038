//! Nonsingularity of matrix spans: is every nonzero combination `Σ tᵢ Aᵢ`
//! invertible?
//!
//! One and two matrices are decided exactly. Families satisfying a Clifford
//! relation are certified directly. Anything else is probed by a seeded
//! search whose float candidates must be confirmed in exact arithmetic
//! before they refute.

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmat::{
    approximate_f64, int, linear_combination, ComplexMatrix, ComplexRational, Matrix, Polynomial,
    Rational, RationalMatrix, RealRoot, Scalar,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PencilStatus {
    ProvenNonsingular,
    Refuted,
    SampledClean,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PencilMethod {
    CliffordCertificate,
    ExactN1,
    ExactN2Sturm,
    Sampling,
}

impl PencilMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            PencilMethod::CliffordCertificate => "clifford_certificate",
            PencilMethod::ExactN1 => "exact_n1",
            PencilMethod::ExactN2Sturm => "exact_n2_sturm",
            PencilMethod::Sampling => "sampling",
        }
    }
}

/// `det(A₁ + s·A₂)` takes opposite nonzero signs at `s = lo` and `s = hi`,
/// so it vanishes somewhere in between.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalCertificate {
    #[serde(with = "crate::json::rational_str")]
    pub lo: Rational,
    #[serde(with = "crate::json::rational_str")]
    pub hi: Rational,
    pub sign_lo: i8,
    pub sign_hi: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PencilVerdict {
    pub status: PencilStatus,
    pub method: PencilMethod,
    /// Exact `t` with `det(Σ tᵢ Aᵢ) = 0`.
    #[serde(with = "crate::json::opt_rational_vec")]
    pub counterexample: Option<Vec<Rational>>,
    /// Present when a two-matrix pencil has only irrational singular
    /// directions.
    pub interval_certificate: Option<IntervalCertificate>,
    pub samples: usize,
    pub min_sigma_observed: Option<f64>,
}

impl PencilVerdict {
    fn proven(method: PencilMethod) -> Self {
        PencilVerdict {
            status: PencilStatus::ProvenNonsingular,
            method,
            counterexample: None,
            interval_certificate: None,
            samples: 0,
            min_sigma_observed: None,
        }
    }

    fn refuted(method: PencilMethod, t: Vec<Rational>) -> Self {
        PencilVerdict {
            status: PencilStatus::Refuted,
            method,
            counterexample: Some(t),
            interval_certificate: None,
            samples: 0,
            min_sigma_observed: None,
        }
    }

    pub fn is_proven(&self) -> bool {
        self.status == PencilStatus::ProvenNonsingular
    }

    pub fn is_refuted(&self) -> bool {
        self.status == PencilStatus::Refuted
    }
}

/// Checks that the family is nonempty and made of equally sized square
/// matrices; returns that size.
pub fn family_dim<T: Scalar>(matrices: &[Matrix<T>]) -> Result<usize> {
    let first = matrices.first().ok_or(Error::EmptyFamily)?;
    if !first.is_square() {
        return Err(Error::NotSquare {
            rows: first.rows(),
            cols: first.cols(),
        });
    }
    let n = first.rows();
    if let Some(m) = matrices.iter().find(|m| m.rows() != n || m.cols() != n) {
        return Err(Error::DimensionMismatch(format!(
            "expected {n}x{n}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(n)
}

/// If `AᵢAⱼ + AⱼAᵢ = 2δᵢⱼ cᵢ I` with every `cᵢ` of one strict sign, returns
/// the `cᵢ`. Then `(Σ tᵢAᵢ)² = (Σ cᵢtᵢ²) I` is a nonzero multiple of `I`
/// for `t ≠ 0`.
pub fn clifford_certificate(matrices: &[RationalMatrix]) -> Option<Vec<Rational>> {
    let mut squares = Vec::with_capacity(matrices.len());
    for (i, a) in matrices.iter().enumerate() {
        let c = a.try_mul(a).ok()?.scalar_multiple_of_identity()?;
        if c.is_zero()
            || squares
                .first()
                .is_some_and(|f: &Rational| f.is_positive() != c.is_positive())
        {
            return None;
        }
        for b in &matrices[..i] {
            if !a.anticommutator(b).ok()?.is_zero() {
                return None;
            }
        }
        squares.push(c);
    }
    Some(squares)
}

/// Decides or probes whether every nonzero combination of `matrices` is
/// invertible. `budget` bounds the float samples used when no exact
/// procedure applies.
pub fn check_span(matrices: &[RationalMatrix], budget: usize, seed: u64) -> Result<PencilVerdict> {
    family_dim(matrices)?;
    if clifford_certificate(matrices).is_some() {
        return Ok(PencilVerdict::proven(PencilMethod::CliffordCertificate));
    }
    match matrices.len() {
        1 => Ok(if matrices[0].det()?.is_zero() {
            PencilVerdict::refuted(PencilMethod::ExactN1, vec![int(1)])
        } else {
            PencilVerdict::proven(PencilMethod::ExactN1)
        }),
        2 => decide_pair(&matrices[0], &matrices[1]),
        _ => {
            let report = refute_search(matrices, seed, budget)?;
            Ok(PencilVerdict {
                status: if report.counterexample.is_some() {
                    PencilStatus::Refuted
                } else {
                    PencilStatus::SampledClean
                },
                method: PencilMethod::Sampling,
                counterexample: report.counterexample,
                interval_certificate: None,
                samples: report.samples,
                min_sigma_observed: report.min_sigma_observed,
            })
        }
    }
}

/// `det(A + sB)` as an exact polynomial in `s`, by interpolation at
/// `s = 0, 1, ..., N`.
pub fn pencil_polynomial(a: &RationalMatrix, b: &RationalMatrix) -> Result<Polynomial> {
    let n = family_dim(&[a.clone(), b.clone()])?;
    let points = (0..=n as i64)
        .map(|s| {
            let m = a.try_add(&b.scale(&int(s)))?;
            Ok((int(s), m.det()?))
        })
        .collect::<Result<Vec<_>>>()?;
    Polynomial::interpolate(&points)
}

fn decide_pair(a: &RationalMatrix, b: &RationalMatrix) -> Result<PencilVerdict> {
    let method = PencilMethod::ExactN2Sturm;
    if a.det()?.is_zero() {
        return Ok(PencilVerdict::refuted(method, vec![int(1), int(0)]));
    }
    if b.det()?.is_zero() {
        return Ok(PencilVerdict::refuted(method, vec![int(0), int(1)]));
    }
    // every direction other than (0, 1) is proportional to (1, s)
    let p = pencil_polynomial(a, b)?;
    let roots = p.real_roots(96)?;
    if roots.is_empty() {
        return Ok(PencilVerdict::proven(method));
    }
    for root in &roots {
        if let RealRoot::Exact { value } = root {
            let m = a.try_add(&b.scale(value))?;
            if m.det()?.is_zero() {
                return Ok(PencilVerdict::refuted(method, vec![int(1), value.clone()]));
            }
        }
    }
    let RealRoot::Bracket { lo, hi } = &roots[0] else {
        unreachable!("exact roots were confirmed above");
    };
    let sign = |s: &Rational| -> Result<i8> {
        let d = a.try_add(&b.scale(s))?.det()?;
        Ok(if d.is_positive() { 1 } else { -1 })
    };
    Ok(PencilVerdict {
        interval_certificate: Some(IntervalCertificate {
            lo: lo.clone(),
            hi: hi.clone(),
            sign_lo: sign(lo)?,
            sign_hi: sign(hi)?,
        }),
        counterexample: None,
        ..PencilVerdict::refuted(method, Vec::new())
    })
}

/// Re-checks an interval certificate from scratch.
pub fn verify_interval_certificate(
    a: &RationalMatrix,
    b: &RationalMatrix,
    cert: &IntervalCertificate,
) -> Result<bool> {
    let det_at = |s: &Rational| -> Result<Rational> { a.try_add(&b.scale(s))?.det() };
    let (dl, dh) = (det_at(&cert.lo)?, det_at(&cert.hi)?);
    Ok(cert.lo < cert.hi && !dl.is_zero() && !dh.is_zero() && dl.is_positive() != dh.is_positive())
}

/// Re-checks a counterexample from scratch.
pub fn is_singular_combination(matrices: &[RationalMatrix], t: &[Rational]) -> Result<bool> {
    if t.iter().all(Zero::is_zero) {
        return Ok(false);
    }
    Ok(linear_combination(t, matrices)?.det()?.is_zero())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RefuteReport {
    /// Exact `t ≠ 0` with `det(Σ tᵢ Aᵢ) = 0`.
    pub counterexample: Option<Vec<Rational>>,
    /// A nonzero rational `x` with `(Σ tᵢ Aᵢ) x = 0` for the counterexample.
    pub kernel_vector: Option<Vec<Rational>>,
    pub samples: usize,
    pub min_sigma_observed: Option<f64>,
    /// Rational points near the kernels of the best candidate combinations,
    /// for reuse as adversarial sample points.
    pub harvest: Vec<Vec<Rational>>,
}

// Cap on exact determinants spent on small integer directions.
const INTEGER_DIRECTION_CAP: usize = 500;
// Float candidates kept for local refinement.
const REFINE_CANDIDATES: usize = 6;
// Relative σ_min below which a float candidate is worth an exact check.
const NEAR_SINGULAR: f64 = 1e-7;

/// Searches for an exact singular combination.
///
/// Exact stages first: singular members, linear dependence among the
/// matrices, dependence of `[A₁eₖ | … | Aₙeₖ]` at basis vectors, and small
/// integer directions. Two matrices are then settled by the exact pencil
/// polynomial, which finds every rational singular direction. Then `budget` seeded directions drawn uniformly from
/// the sphere (normalized Gaussians from ChaCha8 seeded with `seed`) are
/// scored by the smallest singular value of `Σ tᵢ Aᵢ`; the best few are
/// refined by pattern search, and near-singular ones are rationalized and
/// confirmed exactly, either directly or through a rationalized null vector.
pub fn refute_search(
    matrices: &[RationalMatrix],
    seed: u64,
    budget: usize,
) -> Result<RefuteReport> {
    let dim = family_dim(matrices)?;
    let n = matrices.len();
    let mut report = RefuteReport::default();
    let found = |t: Vec<Rational>, report: &mut RefuteReport| -> Result<()> {
        let m = linear_combination(&t, matrices)?;
        let x = m
            .kernel()
            .into_iter()
            .next()
            .expect("singular matrix has a kernel");
        report.harvest.push(x.clone());
        report.kernel_vector = Some(x);
        report.counterexample = Some(t);
        Ok(())
    };

    for (i, m) in matrices.iter().enumerate() {
        if m.det()?.is_zero() {
            let mut t = vec![Rational::zero(); n];
            t[i] = Rational::one();
            found(t, &mut report)?;
            return Ok(report);
        }
    }
    if n > 1 {
        let stacked =
            RationalMatrix::from_fn(dim * dim, n, |r, c| matrices[c].entries()[r].clone());
        if let Some(t) = stacked.kernel().into_iter().next() {
            found(t, &mut report)?;
            return Ok(report);
        }
    }
    for k in 0..dim {
        if let Some(t) = dependence_at(matrices, &basis_vector(dim, k))? {
            found(t, &mut report)?;
            return Ok(report);
        }
    }
    if n == 2 {
        if let Some(t) = decide_pair(&matrices[0], &matrices[1])?.counterexample {
            found(t, &mut report)?;
        }
        return Ok(report);
    }
    for t in integer_directions(n, INTEGER_DIRECTION_CAP) {
        if linear_combination(&t, matrices)?.det()?.is_zero() {
            found(t, &mut report)?;
            return Ok(report);
        }
    }

    let floats: Vec<DMatrix<f64>> = matrices.iter().map(RationalMatrix::to_nalgebra).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut min_sigma = f64::INFINITY;
    for _ in 0..budget {
        let t = random_direction(&mut rng, n);
        let sigma = relative_sigma_min(&floats, &t);
        report.samples += 1;
        min_sigma = min_sigma.min(sigma);
        best.push((sigma, t));
        if best.len() > 4 * REFINE_CANDIDATES {
            keep_best(&mut best);
        }
    }
    keep_best(&mut best);
    for (_, start) in best {
        let (sigma, t) = refine(&floats, start);
        min_sigma = min_sigma.min(sigma);
        let x = near_null_vector(&floats, &t);
        if let Some(xr) = rationalize_vector(&x, 1000) {
            if let Some(tr) = dependence_at(matrices, &xr)? {
                found(tr, &mut report)?;
                report.min_sigma_observed = Some(0.0);
                return Ok(report);
            }
            report.harvest.push(xr);
        }
        if sigma > NEAR_SINGULAR {
            continue;
        }
        for max_den in [10, 100, 1000, 100_000] {
            if let Some(tr) = rationalize_vector(&t, max_den) {
                if linear_combination(&tr, matrices)?.det()?.is_zero() {
                    found(tr, &mut report)?;
                    report.min_sigma_observed = Some(0.0);
                    return Ok(report);
                }
            }
            if let Some(xr) = rationalize_vector(&x, max_den) {
                if let Some(tr) = dependence_at(matrices, &xr)? {
                    found(tr, &mut report)?;
                    report.min_sigma_observed = Some(0.0);
                    return Ok(report);
                }
            }
        }
    }
    report.min_sigma_observed = if report.samples > 0 {
        Some(min_sigma)
    } else {
        None
    };
    Ok(report)
}

/// A nonzero `t` with `Σ tᵢ Aᵢ x = 0`, i.e. a kernel vector of the
/// `N × n` matrix `[A₁x | … | Aₙx]`.
pub fn dependence_at(matrices: &[RationalMatrix], x: &[Rational]) -> Result<Option<Vec<Rational>>> {
    Ok(field_matrix(matrices, x)?.kernel().into_iter().next())
}

/// `[A₁x | … | Aₙx]`.
pub fn field_matrix(matrices: &[RationalMatrix], x: &[Rational]) -> Result<RationalMatrix> {
    let columns = matrices
        .iter()
        .map(|m| m.mul_vec(x))
        .collect::<Result<Vec<_>>>()?;
    let rows = x.len();
    Ok(RationalMatrix::from_fn(rows, columns.len(), |r, c| {
        columns[c][r].clone()
    }))
}

fn basis_vector(dim: usize, k: usize) -> Vec<Rational> {
    (0..dim)
        .map(|i| {
            if i == k {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

// Integer vectors with entries in [-r, r] whose first nonzero entry is
// positive, by increasing max-norm, at most `cap` of them.
fn integer_directions(n: usize, cap: usize) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    for r in 1..=2i64 {
        let side = (2 * r + 1) as usize;
        let total = side.checked_pow(n as u32).unwrap_or(usize::MAX);
        for mut code in 0..total {
            let mut v = Vec::with_capacity(n);
            for _ in 0..n {
                v.push((code % side) as i64 - r);
                code /= side;
            }
            let max = v.iter().map(|x| x.abs()).max().unwrap_or(0);
            let lead = v.iter().find(|&&x| x != 0).copied().unwrap_or(0);
            if max == r && lead > 0 {
                out.push(v.into_iter().map(int).collect());
                if out.len() >= cap {
                    return out;
                }
            }
        }
    }
    out
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn combine(floats: &[DMatrix<f64>], t: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(floats[0].nrows(), floats[0].ncols());
    for (a, &ti) in floats.iter().zip(t) {
        m += a * ti;
    }
    m
}

// σ_min / σ_max of Σ tᵢ Aᵢ, or 0 when the combination vanishes.
fn relative_sigma_min(floats: &[DMatrix<f64>], t: &[f64]) -> f64 {
    let sv = combine(floats, t).singular_values();
    let max = sv.max();
    if max <= 0.0 {
        0.0
    } else {
        sv.min() / max
    }
}

fn keep_best(best: &mut Vec<(f64, Vec<f64>)>) {
    best.sort_by(|a, b| a.0.total_cmp(&b.0));
    best.truncate(REFINE_CANDIDATES);
}

// Pattern search on the sphere.
fn refine(floats: &[DMatrix<f64>], mut t: Vec<f64>) -> (f64, Vec<f64>) {
    let mut value = relative_sigma_min(floats, &t);
    let mut step = 0.05;
    let mut evaluations = 0;
    while step > 1e-13 && evaluations < 1500 && value > 0.0 {
        let mut improved = false;
        for j in 0..t.len() {
            for dir in [1.0, -1.0] {
                let mut trial = t.clone();
                trial[j] += dir * step;
                let norm = trial.iter().map(|x| x * x).sum::<f64>().sqrt();
                trial.iter_mut().for_each(|x| *x /= norm);
                let v = relative_sigma_min(floats, &trial);
                evaluations += 1;
                if v < value {
                    value = v;
                    t = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (value, t)
}

fn near_null_vector(floats: &[DMatrix<f64>], t: &[f64]) -> Vec<f64> {
    let svd = combine(floats, t).svd(false, true);
    let k = svd.singular_values.imin();
    let v_t = svd.v_t.expect("requested V");
    v_t.row(k).iter().copied().collect()
}

// Scales so the largest entry is ±1, then approximates each entry.
fn rationalize_vector(v: &[f64], max_den: u64) -> Option<Vec<Rational>> {
    let scale = v
        .iter()
        .copied()
        .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let out = v
        .iter()
        .map(|x| approximate_f64(x / scale, max_den))
        .collect::<Option<Vec<_>>>()?;
    if out.iter().all(Zero::is_zero) {
        None
    } else {
        Some(out)
    }
}

/// [`check_span`] for complex matrices `Aᵢ` and real coefficients `tᵢ`,
/// computed over the Gaussian rationals without realifying.
///
/// For two matrices, `det(A₁ + sA₂)` is split into real and imaginary
/// parts; its real roots are those of `gcd(Re, Im)`, counted by Sturm
/// sequences. An interval certificate then records the sign change of that
/// gcd. Larger families use a Clifford certificate (`AᵢAⱼ + AⱼAᵢ = 2δᵢⱼcᵢI`
/// with real `cᵢ` of one sign) or exact small-integer directions followed
/// by seeded sampling of the complex smallest singular value.
pub fn check_complex_span(
    matrices: &[ComplexMatrix],
    budget: usize,
    seed: u64,
) -> Result<PencilVerdict> {
    let dim = family_dim(matrices)?;
    let n = matrices.len();
    if complex_clifford_certificate(matrices) {
        return Ok(PencilVerdict::proven(PencilMethod::CliffordCertificate));
    }
    let singular = |t: &[Rational]| -> Result<bool> {
        let tc: Vec<ComplexRational> = t
            .iter()
            .map(|x| ComplexRational::new(x.clone(), Rational::zero()))
            .collect();
        Ok(linear_combination(&tc, matrices)?.det()?.is_zero())
    };
    if n == 1 {
        return Ok(if singular(&[int(1)])? {
            PencilVerdict::refuted(PencilMethod::ExactN1, vec![int(1)])
        } else {
            PencilVerdict::proven(PencilMethod::ExactN1)
        });
    }
    if n == 2 {
        let method = PencilMethod::ExactN2Sturm;
        if singular(&[int(1), int(0)])? {
            return Ok(PencilVerdict::refuted(method, vec![int(1), int(0)]));
        }
        if singular(&[int(0), int(1)])? {
            return Ok(PencilVerdict::refuted(method, vec![int(0), int(1)]));
        }
        let (mut re, mut im) = (Vec::new(), Vec::new());
        for s in 0..=dim as i64 {
            let d = matrices[0]
                .try_add(&matrices[1].scale(&ComplexRational::new(int(s), Rational::zero())))?
                .det()?;
            re.push((int(s), d.re));
            im.push((int(s), d.im));
        }
        let (re, im) = (Polynomial::interpolate(&re)?, Polynomial::interpolate(&im)?);
        let g = re.gcd(&im);
        if g.degree() == Some(0) {
            return Ok(PencilVerdict::proven(method));
        }
        let roots = g.real_roots(96)?;
        if roots.is_empty() {
            return Ok(PencilVerdict::proven(method));
        }
        for root in &roots {
            if let RealRoot::Exact { value } = root {
                if singular(&[int(1), value.clone()])? {
                    return Ok(PencilVerdict::refuted(method, vec![int(1), value.clone()]));
                }
            }
        }
        let RealRoot::Bracket { lo, hi } = &roots[0] else {
            unreachable!("exact roots were confirmed above");
        };
        let sign = |x: &Rational| if g.eval(x).is_positive() { 1 } else { -1 };
        return Ok(PencilVerdict {
            interval_certificate: Some(IntervalCertificate {
                sign_lo: sign(lo),
                sign_hi: sign(hi),
                lo: lo.clone(),
                hi: hi.clone(),
            }),
            counterexample: None,
            ..PencilVerdict::refuted(method, Vec::new())
        });
    }

    let mut verdict = PencilVerdict {
        status: PencilStatus::SampledClean,
        method: PencilMethod::Sampling,
        counterexample: None,
        interval_certificate: None,
        samples: 0,
        min_sigma_observed: None,
    };
    let refute = |t: Vec<Rational>, verdict: &mut PencilVerdict| {
        verdict.status = PencilStatus::Refuted;
        verdict.counterexample = Some(t);
    };
    for i in 0..n {
        let mut t = vec![Rational::zero(); n];
        t[i] = Rational::one();
        if singular(&t)? {
            refute(t, &mut verdict);
            return Ok(verdict);
        }
    }
    // real-linear dependence: stack real and imaginary parts
    let stacked = RationalMatrix::from_fn(2 * dim * dim, n, |r, c| {
        let z = &matrices[c].entries()[r / 2];
        if r % 2 == 0 {
            z.re.clone()
        } else {
            z.im.clone()
        }
    });
    if let Some(t) = stacked.kernel().into_iter().next() {
        refute(t, &mut verdict);
        return Ok(verdict);
    }
    for t in integer_directions(n, INTEGER_DIRECTION_CAP) {
        if singular(&t)? {
            refute(t, &mut verdict);
            return Ok(verdict);
        }
    }
    let floats: Vec<DMatrix<nalgebra::Complex<f64>>> =
        matrices.iter().map(ComplexMatrix::to_nalgebra).collect();
    let score = |t: &[f64]| {
        let mut m = DMatrix::zeros(dim, dim);
        for (a, &ti) in floats.iter().zip(t) {
            m += a * nalgebra::Complex::new(ti, 0.0);
        }
        let sv = m.singular_values();
        let max = sv.max();
        if max <= 0.0 {
            0.0
        } else {
            sv.min() / max
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_sigma = f64::INFINITY;
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..budget {
        let t = random_direction(&mut rng, n);
        let sigma = score(&t);
        verdict.samples += 1;
        min_sigma = min_sigma.min(sigma);
        best.push((sigma, t));
        if best.len() > 4 * REFINE_CANDIDATES {
            keep_best(&mut best);
        }
    }
    keep_best(&mut best);
    for (sigma, t) in best {
        if sigma > NEAR_SINGULAR {
            continue;
        }
        for max_den in [10, 100, 1000, 100_000] {
            if let Some(tr) = rationalize_vector(&t, max_den) {
                if singular(&tr)? {
                    refute(tr, &mut verdict);
                    verdict.min_sigma_observed = Some(0.0);
                    return Ok(verdict);
                }
            }
        }
    }
    verdict.min_sigma_observed = if verdict.samples > 0 {
        Some(min_sigma)
    } else {
        None
    };
    Ok(verdict)
}

fn complex_clifford_certificate(matrices: &[ComplexMatrix]) -> bool {
    let mut sign = None;
    for (i, a) in matrices.iter().enumerate() {
        let Some(c) = a
            .try_mul(a)
            .ok()
            .and_then(|sq| sq.scalar_multiple_of_identity())
        else {
            return false;
        };
        if !c.im.is_zero() || c.re.is_zero() {
            return false;
        }
        if *sign.get_or_insert(c.re.is_positive()) != c.re.is_positive() {
            return false;
        }
        if matrices[..i]
            .iter()
            .any(|b| !a.anticommutator(b).map(|m| m.is_zero()).unwrap_or(false))
        {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{build_epsilon_family, Epsilon};
    use crate::exactmat::frac;
    use rand::Rng;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64(rows)
    }

    #[test]
    fn identity_is_proven_by_certificate_or_n1() {
        let v = check_span(&[RationalMatrix::identity(3)], 10, 0).unwrap();
        assert!(v.is_proven());
        let v = check_span(&[m(&[&[2, 1], &[1, 1]])], 10, 0).unwrap();
        assert_eq!(
            (v.status, v.method),
            (PencilStatus::ProvenNonsingular, PencilMethod::ExactN1)
        );
    }

    #[test]
    fn singular_single_matrix() {
        let v = check_span(&[m(&[&[1, 0], &[0, 0]])], 10, 0).unwrap();
        assert!(v.is_refuted());
        assert_eq!(v.counterexample, Some(vec![int(1)]));
    }

    #[test]
    fn identity_and_rotation_have_no_real_root() {
        let family = [RationalMatrix::identity(2), m(&[&[0, 1], &[-1, 0]])];
        // skip the certificate to exercise the polynomial path
        let v = decide_pair(&family[0], &family[1]).unwrap();
        assert!(v.is_proven());
        let p = pencil_polynomial(&family[0], &family[1]).unwrap();
        assert_eq!(p, Polynomial::from_i64(&[1, 0, 1]));
    }

    #[test]
    fn pair_with_rational_root_is_refuted_exactly() {
        // det(diag(1,2) + s·diag(3,1)) = (1+3s)(2+s)
        let v = check_span(&[m(&[&[1, 0], &[0, 2]]), m(&[&[3, 0], &[0, 1]])], 10, 0).unwrap();
        assert_eq!(v.method, PencilMethod::ExactN2Sturm);
        let t = v.counterexample.unwrap();
        assert!(t == vec![int(1), frac(-1, 3)] || t == vec![int(1), int(-2)]);
    }

    #[test]
    fn pair_with_irrational_root_gets_interval_certificate() {
        // det(I + s·[[1,1],[1,0]]) = 1 + s − s², roots (1 ± √5)/2
        let a = RationalMatrix::identity(2);
        let b = m(&[&[1, 1], &[1, 0]]);
        let v = check_span(&[a.clone(), b.clone()], 10, 0).unwrap();
        assert!(v.is_refuted());
        assert!(v.counterexample.is_none());
        let cert = v.interval_certificate.unwrap();
        assert!(verify_interval_certificate(&a, &b, &cert).unwrap());
    }

    #[test]
    fn pair_with_singular_member() {
        let v = check_span(
            &[RationalMatrix::identity(2), m(&[&[1, 0], &[0, 0]])],
            10,
            0,
        )
        .unwrap();
        assert_eq!(v.counterexample, Some(vec![int(0), int(1)]));
    }

    #[test]
    fn witness_family_is_proven_by_certificate() {
        let fam = build_epsilon_family(7, Epsilon::Plus).into_matrices();
        let v = check_span(&fam, 100, 1).unwrap();
        assert_eq!(v.method, PencilMethod::CliffordCertificate);
        // negative squares of one sign also certify
        let fam = build_epsilon_family(3, Epsilon::Minus).into_matrices();
        assert!(check_span(&fam, 100, 1).unwrap().is_proven());
        // mixed signs do not
        let mixed = [RationalMatrix::identity(2), m(&[&[0, 1], &[-1, 0]])];
        assert!(clifford_certificate(&mixed).is_none());
    }

    #[test]
    fn refute_examples() {
        let r = refute_search(&[m(&[&[1, 0], &[0, 0]]), m(&[&[0, 0], &[0, 1]])], 0, 10).unwrap();
        assert_eq!(r.counterexample, Some(vec![int(1), int(0)]));
        let a = m(&[&[2, 1, 0], &[0, 1, 3], &[1, 0, 1]]);
        let r = refute_search(&[a.clone(), -&a], 0, 10).unwrap();
        assert_eq!(r.counterexample, Some(vec![int(1), int(1)]));
        let x = r.kernel_vector.unwrap();
        assert!(x.iter().any(|v| !v.is_zero()));
    }

    #[test]
    fn refute_finds_nothing_on_clifford_families() {
        let fam = build_epsilon_family(4, Epsilon::Plus).into_matrices();
        let r = refute_search(&fam, 3, 300).unwrap();
        assert!(r.counterexample.is_none());
        assert_eq!(r.samples, 300);
        assert!(r.min_sigma_observed.unwrap() > 0.5);
    }

    #[test]
    fn sampling_reaches_a_singular_plane_through_its_kernel_vector() {
        // Aᵢ = P (aᵢ ⊕ Qᵢ) P⁻¹ with Q = {I, T₁, T₂} nonsingular: the
        // singular directions form the plane 7t₁ + 11t₂ + 13t₃ = 0, which
        // avoids the small integer grid, and all share the kernel P·e₁
        let p = m(&[
            &[1, 0, 0, 0, 0],
            &[3, 1, 0, 0, 0],
            &[-4, 2, 1, 0, 0],
            &[0, 0, 0, 1, 0],
            &[0, 1, 0, 0, 1],
        ]);
        let p_inv = p.inverse().unwrap().unwrap();
        let skew = build_epsilon_family(2, Epsilon::Minus).into_matrices();
        let q = [
            RationalMatrix::identity(4),
            skew[0].clone(),
            skew[1].clone(),
        ];
        let family: Vec<RationalMatrix> = [7, 11, 13]
            .iter()
            .zip(&q)
            .map(|(&a, qi)| {
                let z = RationalMatrix::zeros(1, 4);
                let block = RationalMatrix::from_fn(5, 5, |i, j| match (i, j) {
                    (0, 0) => int(a),
                    (0, _) => z.get(0, j - 1).clone(),
                    (_, 0) => Rational::zero(),
                    _ => qi.get(i - 1, j - 1).clone(),
                });
                &(&p * &block) * &p_inv
            })
            .collect();
        let v = check_span(&family, 300, 5).unwrap();
        assert!(v.is_refuted(), "{v:?}");
        let t = v.counterexample.unwrap();
        assert!(is_singular_combination(&family, &t).unwrap());
        let plane = int(7) * &t[0] + int(11) * &t[1] + int(13) * &t[2];
        assert!(plane.is_zero());
    }

    #[test]
    fn verdict_is_deterministic_for_a_seed() {
        let family = [
            m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 2]]),
            m(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, 2]]),
            m(&[&[0, 1, 1], &[1, 0, 0], &[1, 0, 3]]),
        ];
        let a = check_span(&family, 200, 9).unwrap();
        let b = check_span(&family, 200, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(check_span(&[], 1, 0), Err(Error::EmptyFamily)));
        let bad = [RationalMatrix::identity(2), RationalMatrix::identity(3)];
        assert!(matches!(
            check_span(&bad, 1, 0),
            Err(Error::DimensionMismatch(_))
        ));
    }

    // float grid over half the circle of directions (cos θ, sin θ)
    fn grid_sees_root(a: &RationalMatrix, b: &RationalMatrix) -> bool {
        let (fa, fb) = (a.to_nalgebra(), b.to_nalgebra());
        let steps = 10_000;
        let det = |k: usize| {
            let th = std::f64::consts::PI * k as f64 / steps as f64;
            (&fa * th.cos() + &fb * th.sin()).determinant()
        };
        let mut prev = det(0);
        for k in 1..=steps {
            let d = det(k);
            if d.abs() < 1e-9 || (d > 0.0) != (prev > 0.0) {
                return true;
            }
            prev = d;
        }
        false
    }

    #[test]
    fn exact_pair_decision_agrees_with_float_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..40 {
            let mut rand = || {
                m(&(0..4)
                    .map(|_| {
                        (0..4)
                            .map(|_| rng.random_range(-3..=3))
                            .collect::<Vec<i64>>()
                    })
                    .collect::<Vec<_>>()
                    .iter()
                    .map(|r| r.as_slice())
                    .collect::<Vec<_>>())
            };
            let (a, b) = (rand(), rand());
            let exact = check_span(&[a.clone(), b.clone()], 0, 0).unwrap();
            if grid_sees_root(&a, &b) {
                assert!(exact.is_refuted(), "grid root missed by exact method");
            }
        }
    }

    #[test]
    fn homogeneity_under_scaling() {
        let a = m(&[&[1, 2], &[0, 1]]);
        let b = m(&[&[0, 1], &[1, 1]]);
        let base = check_span(&[a.clone(), b.clone()], 0, 0).unwrap().status;
        for c in [frac(1, 3), int(-2), frac(7, 5)] {
            let scaled = check_span(&[a.scale(&c), b.clone()], 0, 0).unwrap().status;
            assert_eq!(scaled, base);
        }
    }

    fn cm(re: &RationalMatrix, im: &RationalMatrix) -> ComplexMatrix {
        ComplexMatrix::from_parts(re, im).unwrap()
    }

    #[test]
    fn complex_pairs_over_gaussian_rationals() {
        let id = RationalMatrix::identity(2);
        let zero = RationalMatrix::zeros(2, 2);
        // det(I + s·iI) = (1 + is)² never vanishes for real s
        let v = check_complex_span(&[cm(&id, &zero), cm(&zero, &id)], 0, 0).unwrap();
        assert_eq!(
            (v.status, v.method),
            (PencilStatus::ProvenNonsingular, PencilMethod::ExactN2Sturm)
        );
        // det(diag(1, i) + s·I) = (1 + s)(i + s) vanishes at s = −1
        let a = cm(&m(&[&[1, 0], &[0, 0]]), &m(&[&[0, 0], &[0, 1]]));
        let v = check_complex_span(&[a, cm(&id, &zero)], 0, 0).unwrap();
        assert_eq!(v.counterexample, Some(vec![int(1), int(-1)]));
        // real matrices agree with the real decision
        let b = m(&[&[1, 1], &[1, 0]]);
        let v = check_complex_span(&[cm(&id, &zero), cm(&b, &zero)], 0, 0).unwrap();
        assert!(v.is_refuted() && v.interval_certificate.is_some());
    }

    #[test]
    fn complex_families_of_three() {
        let zero = RationalMatrix::zeros(2, 2);
        let x = m(&[&[0, 1], &[1, 0]]);
        let y_im = m(&[&[0, -1], &[1, 0]]);
        let z = m(&[&[1, 0], &[0, -1]]);
        let pauli = [cm(&x, &zero), cm(&zero, &y_im), cm(&z, &zero)];
        let v = check_complex_span(&pauli, 10, 0).unwrap();
        assert_eq!(v.method, PencilMethod::CliffordCertificate);
        let id = RationalMatrix::identity(2);
        let dependent = [cm(&id, &zero), cm(&zero, &id), cm(&id, &id)];
        let v = check_complex_span(&dependent, 10, 0).unwrap();
        assert_eq!(v.counterexample, Some(vec![int(-1), int(-1), int(1)]));
    }
}
