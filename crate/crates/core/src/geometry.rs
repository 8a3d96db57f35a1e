//! Sequence-space geometry: exponents, biorthogonal systems, the bilinear
//! pairing, Fourier coefficients, B-condition and A_p constants, R-bounds.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, lp_norm_ascent, quadrature::integrate, vector_p_norm, C64, CMatrix, CVector,
};
use crate::random::{gaussian_vector, seeded};

const BIORTHOGONALITY_TOL: f64 = 1e-10;

/// A Hölder exponent `p ∈ (1, ∞)` together with its conjugate `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ExponentContext {
    p: f64,
    q: f64,
}

impl ExponentContext {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        let q = p / (p - 1.0);
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The context with `p` and `q` exchanged.
    pub fn dual(&self) -> Self {
        Self {
            p: self.q,
            q: self.p,
        }
    }

    pub fn is_hilbert(&self) -> bool {
        self.p == 2.0
    }
}

impl TryFrom<f64> for ExponentContext {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<ExponentContext> for f64 {
    fn from(c: ExponentContext) -> f64 {
        c.p
    }
}

/// Bilinear pairing `<u, f> = Σ u_j f_j` (no conjugation).
pub fn pairing(u: &[C64], f: &[C64]) -> Result<C64> {
    if u.len() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: f.len(),
        });
    }
    Ok(u.iter().zip(f).map(|(a, b)| a * b).sum())
}

/// A finite biorthogonal system. Primal vectors are the columns of `e`,
/// dual functionals are the rows of `f`, so `f · e = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiorthogonalSystem {
    e: CMatrix,
    f: CMatrix,
    context: ExponentContext,
}

impl BiorthogonalSystem {
    /// Strict constructor: biorthogonal and biorthonormal to `1e-10`.
    pub fn new(e: CMatrix, f: CMatrix, context: ExponentContext) -> Result<Self> {
        let system = Self::unchecked(e, f, context)?;
        system.check_biorthogonal()?;
        let dev = system.normalization_deviation();
        if dev > BIORTHOGONALITY_TOL {
            return Err(Error::NotNormalized { deviation: dev });
        }
        Ok(system)
    }

    /// Builds the system from primal vectors (columns of `e`), normalizing
    /// each in `ℓ_p` and taking the dual functionals from `e^{-1}`. Only the
    /// primal vectors are unit; dual norms are whatever biorthogonality forces.
    pub fn from_primal(e: CMatrix, context: ExponentContext) -> Result<Self> {
        let n = e.nrows();
        if e.ncols() != n || n == 0 {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: e.ncols(),
            });
        }
        let mut e = e;
        for j in 0..n {
            let norm = vector_p_norm(e.column(j).as_slice(), context.p());
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::DegenerateSystem);
            }
            e.column_mut(j).scale_mut(1.0 / norm);
        }
        let s = linalg::singular_values(&e);
        if s[n - 1] <= 1e-13 * s[0] {
            return Err(Error::DegenerateSystem);
        }
        let f = linalg::inverse(&e, "primal matrix of biorthogonal system")
            .map_err(|_| Error::DegenerateSystem)?;
        let system = Self { e, f, context };
        system.check_biorthogonal()?;
        Ok(system)
    }

    /// Accepts any pair with `f · e = I` to `1e-10`, without norm constraints.
    pub fn unnormalized(e: CMatrix, f: CMatrix, context: ExponentContext) -> Result<Self> {
        let system = Self::unchecked(e, f, context)?;
        system.check_biorthogonal()?;
        Ok(system)
    }

    fn unchecked(e: CMatrix, f: CMatrix, context: ExponentContext) -> Result<Self> {
        let n = e.nrows();
        if n == 0 {
            return Err(Error::InvalidArgument("empty system".into()));
        }
        for (r, c) in [e.shape(), f.shape()] {
            if r != n || c != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if r != n { r } else { c },
                });
            }
        }
        Ok(Self { e, f, context })
    }

    fn check_biorthogonal(&self) -> Result<()> {
        let dev = self.biorthogonality_deviation();
        if dev > BIORTHOGONALITY_TOL || !dev.is_finite() {
            return Err(Error::NotBiorthogonal { deviation: dev });
        }
        Ok(())
    }

    pub fn canonical(n: usize, context: ExponentContext) -> Self {
        Self {
            e: CMatrix::identity(n, n),
            f: CMatrix::identity(n, n),
            context,
        }
    }

    /// Canonical vectors reordered: `e_j = δ_{perm[j]}`.
    pub fn permuted(perm: &[usize], context: ExponentContext) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        let mut e = CMatrix::zeros(n, n);
        for (j, &k) in perm.iter().enumerate() {
            if k >= n || seen[k] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[k] = true;
            e[(k, j)] = C64::new(1.0, 0.0);
        }
        let f = e.transpose();
        Self::new(e, f, context)
    }

    /// Image of the canonical system under a unitary `U`: `e_j = U δ_j`,
    /// `f_i = conj(U δ_i)`; biorthonormal at `p = 2`.
    pub fn unitary_image(u: &CMatrix, context: ExponentContext) -> Result<Self> {
        let f = u.adjoint();
        Self::unnormalized(u.clone(), f, context)
    }

    /// The system on the dual space: primal vectors `f_i`, functionals `e_j`,
    /// exponent context `(q, p)`.
    pub fn dual_system(&self) -> Self {
        Self {
            e: self.f.transpose(),
            f: self.e.transpose(),
            context: self.context.dual(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.e.nrows()
    }

    pub fn context(&self) -> ExponentContext {
        self.context
    }

    pub fn with_context(&self, context: ExponentContext) -> Self {
        Self {
            context,
            ..self.clone()
        }
    }

    pub fn primal_matrix(&self) -> &CMatrix {
        &self.e
    }

    pub fn dual_matrix(&self) -> &CMatrix {
        &self.f
    }

    pub fn primal(&self, j: usize) -> CVector {
        self.e.column(j).into_owned()
    }

    pub fn dual(&self, i: usize) -> CVector {
        self.f.row(i).transpose()
    }

    /// `max_{i,j} |<e_j, f_i> − δ_ij|`.
    pub fn biorthogonality_deviation(&self) -> f64 {
        let g = &self.f * &self.e;
        let n = self.dimension();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((g[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        dev
    }

    /// Largest deviation of `‖e_j‖_p` and `‖f_i‖_q` from 1.
    pub fn normalization_deviation(&self) -> f64 {
        let n = self.dimension();
        let (p, q) = (self.context.p(), self.context.q());
        let mut dev: f64 = 0.0;
        for j in 0..n {
            dev = dev.max((vector_p_norm(self.e.column(j).as_slice(), p) - 1.0).abs());
            let fi: Vec<C64> = self.f.row(j).iter().copied().collect();
            dev = dev.max((vector_p_norm(&fi, q) - 1.0).abs());
        }
        dev
    }
}

/// `α_j = <u, f_j>`.
pub fn fourier_coefficients(u: &CVector, system: &BiorthogonalSystem) -> Result<CVector> {
    check_len(u.len(), system.dimension())?;
    Ok(system.dual_matrix() * u)
}

/// `Σ α_j e_j`.
pub fn synthesize(alpha: &CVector, system: &BiorthogonalSystem) -> Result<CVector> {
    check_len(alpha.len(), system.dimension())?;
    Ok(system.primal_matrix() * alpha)
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Estimated smallest `C` with `‖u‖_p^p ≤ C Σ|α_j|^p`. Since `u = Eα`, this is
/// `‖E‖_{p→p}^p`, probed by random directions, coordinate extremes and local
/// ascent from the best candidates.
pub fn b_condition_constant(
    system: &BiorthogonalSystem,
    sample_count: usize,
    seed: u64,
) -> Result<f64> {
    if sample_count < 100 {
        return Err(Error::InvalidArgument(format!(
            "b-condition needs at least 100 samples, got {sample_count}"
        )));
    }
    let n = system.dimension();
    let p = system.context().p();
    let f = system.dual_matrix();
    let e = system.primal_matrix();
    let s = linalg::singular_values(e);
    if s[n - 1] <= 1e-13 * s[0] {
        return Err(Error::DegenerateSystem);
    }
    let ratio = |u: &CVector| -> f64 {
        let alpha = f * u;
        let num = vector_p_norm(u.as_slice(), p);
        let den = vector_p_norm(alpha.as_slice(), p);
        (num / den).powf(p)
    };
    let mut rng = seeded(seed);
    let mut candidates: Vec<(f64, CVector)> = Vec::with_capacity(sample_count + 2 * n);
    for k in 0..n {
        let mut u = CVector::zeros(n);
        u[k] = C64::new(1.0, 0.0);
        candidates.push((ratio(&u), u));
        let ej = system.primal(k);
        candidates.push((ratio(&ej), ej));
    }
    for _ in 0..sample_count {
        let u = gaussian_vector(n, &mut rng);
        candidates.push((ratio(&u), u));
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = candidates[0].0;
    for (_, u) in candidates.iter().take(4) {
        let alpha = f * u;
        let (value, _) = lp_norm_ascent(e, p, &alpha, 200);
        best = best.max(value.powf(p));
    }
    Ok(best)
}

/// Power weight `x^γ` on `(0, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerWeight {
    pub gamma: f64,
    pub b: f64,
}

impl PowerWeight {
    pub fn new(gamma: f64, b: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > -1.0) {
            return Err(Error::InvalidArgument(format!(
                "weight exponent must exceed -1, got {gamma}"
            )));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weight interval length must be positive, got {b}"
            )));
        }
        Ok(Self { gamma, b })
    }

    pub fn value(&self, x: f64) -> f64 {
        x.powf(self.gamma)
    }

    /// Whether `x^γ` is an A_p weight: `−1 < γ < p − 1`.
    pub fn is_ap(&self, context: ExponentContext) -> bool {
        self.gamma > -1.0 && self.gamma < context.p() - 1.0
    }
}

/// `∫_0^c x^a dx` truncated to `levels` dyadic shells `(c 2^{-l-1}, c 2^{-l})`.
/// Converges as `levels → ∞` iff `a > −1`; grows without bound otherwise.
fn graded_prefix_integral(a: f64, c: f64, levels: usize) -> f64 {
    let shell = integrate(|t| t.powf(a), 0.5, 1.0, 1e-12);
    let ratio = 0.5f64.powf(a + 1.0);
    let geometric = if (ratio - 1.0).abs() < 1e-15 {
        levels as f64
    } else {
        (1.0 - ratio.powi(levels as i32)) / (1.0 - ratio)
    };
    c.powf(a + 1.0) * shell * geometric
}

/// A_p characteristic `sup_Q (avg_Q w)(avg_Q w^{-1/(p-1)})^{p-1}` over the
/// dyadic intervals of `(0, b)` down to level `refinement` and the prefixes
/// `(0, 2^{-j} b)`. Prefix integrals use `2^refinement` dyadic shells, so the
/// estimate grows without saturation when `γ ≥ p − 1`.
pub fn ap_constant(weight: &PowerWeight, context: ExponentContext, refinement: u32) -> Result<f64> {
    if refinement < 4 {
        return Err(Error::InvalidArgument(format!(
            "refinement must be at least 4, got {refinement}"
        )));
    }
    if refinement > 24 {
        return Err(Error::InvalidArgument(format!(
            "refinement {refinement} exceeds the supported maximum 24"
        )));
    }
    if weight.gamma == 0.0 {
        return Ok(1.0);
    }
    let p = context.p();
    let g = weight.gamma;
    let dual = -g / (p - 1.0);
    let b = weight.b;
    let mut best: f64 = 0.0;

    let levels = 1usize << refinement;
    for j in 0..=refinement {
        let c = b * 0.5f64.powi(j as i32);
        let w = graded_prefix_integral(g, c, levels) / c;
        let v = graded_prefix_integral(dual, c, levels) / c;
        best = best.max(w * v.powf(p - 1.0));
    }

    for j in 1..=refinement {
        let h = b * 0.5f64.powi(j as i32);
        for k in 1..(1usize << j) {
            let lo = k as f64 * h;
            let hi = lo + h;
            let w = integrate(|x| x.powf(g), lo, hi, 1e-10) / h;
            let v = integrate(|x| x.powf(dual), lo, hi, 1e-10) / h;
            best = best.max(w * v.powf(p - 1.0));
        }
    }
    Ok(best)
}

/// A finite family of operators indexed by sector parameters `ξ`.
#[derive(Debug, Clone)]
pub struct OperatorFamily {
    samples: Vec<C64>,
    matrices: Vec<CMatrix>,
}

impl OperatorFamily {
    pub fn new(samples: Vec<C64>, matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidArgument("operator family is empty".into()));
        }
        if samples.len() != matrices.len() {
            return Err(Error::DimensionMismatch {
                expected: matrices.len(),
                found: samples.len(),
            });
        }
        let n = matrices[0].nrows();
        for m in &matrices {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if m.nrows() != n { m.nrows() } else { m.ncols() },
                });
            }
        }
        Ok(Self { samples, matrices })
    }

    /// Family of plain matrices with parameters `0, 1, 2, …`.
    pub fn from_matrices(matrices: Vec<CMatrix>) -> Result<Self> {
        let samples = (0..matrices.len()).map(|k| C64::new(k as f64, 0.0)).collect();
        Self::new(samples, matrices)
    }

    /// `{A (A + ξ)^{-1} : ξ ∈ samples}`.
    pub fn resolvent_family(a: &CMatrix, samples: &[C64]) -> Result<Self> {
        let n = a.nrows();
        let mut mats = Vec::with_capacity(samples.len());
        for &xi in samples {
            let shifted = a + CMatrix::identity(n, n) * xi;
            let inv = linalg::inverse(&shifted, "A + ξ in resolvent family")?;
            mats.push(a * inv);
        }
        Self::new(samples.to_vec(), mats)
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn dimension(&self) -> usize {
        self.matrices[0].nrows()
    }
}

/// One probe of the Rademacher inequality: operators `T_{indices[j]}` applied
/// to vectors `u_j`, with the ratio of sign-averaged norms.
#[derive(Debug, Clone)]
pub struct RBoundTrial {
    pub indices: Vec<usize>,
    pub vectors: Vec<CVector>,
    pub ratio: f64,
}

const R_BOUND_RANDOM_TRIALS: usize = 48;
const R_BOUND_MAX_TERMS: usize = 4;

/// All trials behind [`r_bound_estimate`], in generation order.
pub fn r_bound_trials(
    family: &OperatorFamily,
    context: ExponentContext,
    sign_samples: usize,
    seed: u64,
) -> Result<Vec<RBoundTrial>> {
    if sign_samples < 64 {
        return Err(Error::InvalidArgument(format!(
            "r-bound needs at least 64 sign samples, got {sign_samples}"
        )));
    }
    let p = context.p();
    let n = family.dimension();
    let mut rng = seeded(seed);
    let mut trials = Vec::new();

    // Single-operator probes at a norm-maximizing vector; signs are irrelevant.
    for (k, t) in family.matrices().iter().enumerate() {
        let mut best = (0.0, CVector::zeros(n));
        for start in 0..n.min(4) + 2 {
            let u = if start < n.min(4) {
                let col = (0..n)
                    .max_by(|&a, &b| {
                        let ca: f64 = t.column(a).iter().map(|z| z.norm()).sum();
                        let cb: f64 = t.column(b).iter().map(|z| z.norm()).sum();
                        ca.total_cmp(&cb).then(b.cmp(&a))
                    })
                    .unwrap_or(0);
                let mut u = CVector::zeros(n);
                u[(col + start) % n] = C64::new(1.0, 0.0);
                u
            } else {
                gaussian_vector(n, &mut rng)
            };
            let (value, x) = lp_norm_ascent(t, p, &u, 100);
            if value > best.0 {
                best = (value, x);
            }
        }
        trials.push(RBoundTrial {
            indices: vec![k],
            vectors: vec![best.1],
            ratio: best.0,
        });
    }

    let count = family.matrices().len();
    for _ in 0..R_BOUND_RANDOM_TRIALS {
        let m = rng.random_range(1..=R_BOUND_MAX_TERMS);
        let indices: Vec<usize> = (0..m).map(|_| rng.random_range(0..count)).collect();
        let vectors: Vec<CVector> = (0..m).map(|_| gaussian_vector(n, &mut rng)).collect();
        let images: Vec<CVector> = indices
            .iter()
            .zip(&vectors)
            .map(|(&k, u)| &family.matrices()[k] * u)
            .collect();
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        // Few terms: average over every sign vector, which is the exact expectation.
        let exhaustive = (1usize << m) <= sign_samples;
        let rounds = if exhaustive { 1usize << m } else { sign_samples };
        for round in 0..rounds {
            let signs: Vec<f64> = (0..m)
                .map(|j| {
                    let plus = if exhaustive { (round >> j) & 1 == 0 } else { rng.random_bool(0.5) };
                    if plus { 1.0 } else { -1.0 }
                })
                .collect();
            let mut a = CVector::zeros(n);
            let mut b = CVector::zeros(n);
            for j in 0..m {
                a.axpy(C64::from(signs[j]), &images[j], C64::new(1.0, 0.0));
                b.axpy(C64::from(signs[j]), &vectors[j], C64::new(1.0, 0.0));
            }
            lhs += vector_p_norm(a.as_slice(), p);
            rhs += vector_p_norm(b.as_slice(), p);
        }
        let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
        trials.push(RBoundTrial {
            indices,
            vectors,
            ratio,
        });
    }
    Ok(trials)
}

/// Monte-Carlo estimate of the R-bound: the largest ratio
/// `E‖Σ r_j T_j u_j‖_p / E‖Σ r_j u_j‖_p` over the probes.
pub fn r_bound_estimate(
    family: &OperatorFamily,
    context: ExponentContext,
    sign_samples: usize,
    seed: u64,
) -> Result<f64> {
    let trials = r_bound_trials(family, context, sign_samples, seed)?;
    Ok(trials.iter().map(|t| t.ratio).fold(0.0, f64::max))
}
