//! Bilinear trace of operator pairs, its symmetry and Hölder bound, the
//! spectral trace identity and the trace of quasi-nilpotent operators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pairing, BiorthogonalSystem};
use crate::linalg::{self, C64, CMatrix};
use crate::schatten::{sigma_norm, sigma_p_norm, OperatorMatrix};

/// Polynomial `F(z) = Σ_{k=1}^K c_k z^k` with no constant term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticFunctionSpec {
    coeffs: Vec<C64>,
}

impl AnalyticFunctionSpec {
    /// `coeffs[0]` multiplies `z`, `coeffs[1]` multiplies `z²`, and so on.
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "function needs at least one coefficient".into(),
            ));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn identity() -> Self {
        Self {
            coeffs: vec![C64::new(1.0, 0.0)],
        }
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("monomial degree must be positive".into()));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); k];
        coeffs[k - 1] = C64::new(1.0, 0.0);
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = (acc + c) * z;
        }
        acc
    }

    /// Horner evaluation `A (c_1 + A (c_2 + …))`.
    pub fn apply_matrix(&self, a: &CMatrix) -> CMatrix {
        let n = a.nrows();
        let id = CMatrix::identity(n, n);
        let mut acc = CMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = a * (acc + &id * *c);
        }
        acc
    }
}

pub fn apply_function(f: &AnalyticFunctionSpec, a: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.with_entries(f.apply_matrix(a.entries()))
}

/// `Tr(A, B) = Σ_i <A e_i, B^T f_i>`.
pub fn trace_pair(
    a: &OperatorMatrix,
    b: &OperatorMatrix,
    system: &BiorthogonalSystem,
) -> Result<C64> {
    trace_of(a.entries(), b.entries(), system)
}

fn trace_of(a: &CMatrix, b: &CMatrix, system: &BiorthogonalSystem) -> Result<C64> {
    let n = system.dimension();
    for m in [a, b] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.nrows(),
            });
        }
    }
    let images = a * system.primal_matrix();
    let functionals = b.transpose() * system.dual_matrix().transpose();
    let mut total = C64::new(0.0, 0.0);
    for i in 0..n {
        total += pairing(images.column(i).as_slice(), functionals.column(i).as_slice())?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub forward: C64,
    pub backward: C64,
    pub delta: f64,
}

pub fn trace_symmetry_check(
    a: &OperatorMatrix,
    b: &OperatorMatrix,
    system: &BiorthogonalSystem,
) -> Result<SymmetryReport> {
    let forward = trace_pair(a, b, system)?;
    let backward = trace_pair(b, a, system)?;
    Ok(SymmetryReport {
        forward,
        backward,
        delta: (forward - backward).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `|Tr(A,B)| ≤ ‖A‖_{σ_p} ‖B^T‖_{σ_q}`, the second norm taken in the dual
/// system.
pub fn trace_holder_check(
    a: &OperatorMatrix,
    b: &OperatorMatrix,
    system: &BiorthogonalSystem,
) -> Result<HolderReport> {
    let lhs = trace_pair(a, b, system)?.norm();
    let ctx = a.context();
    let na = sigma_norm(a.entries(), system, ctx.p())?;
    let nb = sigma_norm(&b.entries().transpose(), &system.dual_system(), ctx.q())?;
    let rhs = na * nb;
    Ok(HolderReport {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralTraceReport {
    pub trace_side: C64,
    pub eigen_side: C64,
    pub delta: f64,
    pub holds: bool,
}

/// `Tr(F(A), g(A))` against `Σ F(λ_i) g(λ_i)`.
pub fn spectral_trace_check(
    a: &OperatorMatrix,
    f: &AnalyticFunctionSpec,
    g: &AnalyticFunctionSpec,
    system: &BiorthogonalSystem,
) -> Result<SpectralTraceReport> {
    let fa = apply_function(f, a)?;
    let ga = apply_function(g, a)?;
    let trace_side = trace_pair(&fa, &ga, system)?;
    let eig = linalg::schur::eigenvalues(a.entries())?;
    let eigen_side: C64 = eig.iter().map(|&l| f.eval(l) * g.eval(l)).sum();
    let delta = (trace_side - eigen_side).norm();
    Ok(SpectralTraceReport {
        trace_side,
        eigen_side,
        delta,
        holds: delta <= 1e-8 * (1.0 + eigen_side.norm()),
    })
}

/// Spectral radius and relative nilpotency residual `‖N^n‖/‖N‖^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiNilpotency {
    pub spectral_radius: f64,
    pub residual: f64,
    pub accepted: bool,
}

const QUASI_NILPOTENT_TOL: f64 = 1e-8;

/// A matrix counts as quasi-nilpotent when its computed spectral radius is at
/// most `1e-8 (1 + ‖N‖)`, or when `N^n` vanishes relative to `‖N‖^n`. The
/// second test is needed because eigenvalues of a defective nilpotent matrix
/// are only computable to about `ε^{1/n}`.
pub fn quasi_nilpotency(n: &CMatrix) -> Result<QuasiNilpotency> {
    let eig = linalg::schur::eigenvalues(n)?;
    let spectral_radius = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let norm = linalg::frobenius(n);
    let residual = linalg::nilpotency_residual(n);
    let accepted = spectral_radius <= QUASI_NILPOTENT_TOL * (1.0 + norm)
        || residual <= QUASI_NILPOTENT_TOL;
    Ok(QuasiNilpotency {
        spectral_radius,
        residual,
        accepted,
    })
}

pub fn require_quasi_nilpotent(n: &CMatrix) -> Result<QuasiNilpotency> {
    let q = quasi_nilpotency(n)?;
    if !q.accepted {
        return Err(Error::NotQuasiNilpotent {
            spectral_radius: q.spectral_radius,
            residual: q.residual,
        });
    }
    Ok(q)
}

/// `Tr(N, N)` for quasi-nilpotent `N`; errors if the value is not negligible
/// against `‖N‖_{σ_p}²`.
pub fn quasinilpotent_trace(n: &OperatorMatrix, system: &BiorthogonalSystem) -> Result<C64> {
    require_quasi_nilpotent(n.entries())?;
    let tr = trace_pair(n, n, system)?;
    let norm = sigma_p_norm(n, system)?;
    if tr.norm() > 1e-10 * norm * norm {
        return Err(Error::InvariantViolated(format!(
            "trace of quasi-nilpotent operator is {} (σ_p norm {norm})",
            tr.norm()
        )));
    }
    Ok(tr)
}
