//! Singular numbers of the embedding `W²(0,1; E(A), E) → L_{2,γ}(0,1; E)` for
//! the diagonal model `A = κ diag(j^{1/ν})` on `E = ℂ^d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ExponentContext;
use crate::linalg::{self, fit_line, C64, CMatrix, LineFit};

/// Scale `κ = (nπ)² / d^{1/ν}` making the largest diagonal entry of
/// `κ diag(j^{1/ν})` match the largest resolved Dirichlet eigenvalue `(nπ)²`,
/// so neither factor of the tensor structure truncates the spectrum early.
pub fn balanced_diag_scale(n: usize, d: usize, nu: f64) -> f64 {
    let top = n as f64 * std::f64::consts::PI;
    top * top / (d as f64).powf(1.0 / nu)
}

/// Orthonormal sine transform `S_{ik} = √(2/(n+1)) sin(ikπ/(n+1))`.
fn sine_transform(n: usize) -> CMatrix {
    let c = (2.0 / (n + 1) as f64).sqrt();
    CMatrix::from_fn(n, n, |i, k| {
        C64::from(c * (((i + 1) * (k + 1)) as f64 * std::f64::consts::PI / (n + 1) as f64).sin())
    })
}

/// Dirichlet second derivative on `n` interior nodes of `(0,1)`, exact on the
/// first `n` sine modes: `S diag(−(kπ)²) S`.
pub fn spectral_second_derivative(n: usize) -> CMatrix {
    let s = sine_transform(n);
    let diag = CMatrix::from_diagonal(&linalg::CVector::from_fn(n, |k, _| {
        let w = (k + 1) as f64 * std::f64::consts::PI;
        C64::from(-w * w)
    }));
    &s * diag * &s
}

/// Log-log fit of `s_j` against `j` over the middle third of the indices.
pub fn fit_middle_third(s: &[f64]) -> LineFit {
    let k = s.len();
    let lo = k / 3;
    let hi = (2 * k / 3).max(lo + 2).min(k);
    let xs: Vec<f64> = (lo..hi).map(|j| ((j + 1) as f64).ln()).collect();
    let ys: Vec<f64> = (lo..hi).map(|j| s[j].max(f64::MIN_POSITIVE).ln()).collect();
    fit_line(&xs, &ys)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub dim: usize,
    pub n: usize,
    pub nu: f64,
    pub scale: f64,
    pub s: Vec<f64>,
    pub fitted_exponent: f64,
    pub expected_exponent: f64,
    pub r_squared: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    pub n: usize,
    /// Weight exponent `γ` of `x^γ`.
    pub gamma: f64,
    /// Number of leading singular numbers kept; `None` keeps all `n d`.
    pub k_max: Option<usize>,
}

/// `s_j` of the embedding with source norm `(‖A u‖² + ‖u''‖²)^{1/2}` and
/// target norm `‖u‖`, all in the weighted discrete `L_2`. Each component of
/// the diagonal model decouples; the per-component map is `W^{1/2} R^{-1}`
/// where `R` is the triangular factor of `[a_j W^{1/2}; W^{1/2} D²]`.
pub fn embedding_snumbers(
    d: usize,
    nu: f64,
    context: ExponentContext,
    params: &EmbeddingParams,
) -> Result<EmbeddingReport> {
    if !context.is_hilbert() {
        return Err(Error::Unsupported(
            "embedding singular numbers are computed exactly only for p = 2".into(),
        ));
    }
    if d < 64 {
        return Err(Error::InvalidArgument(format!(
            "slope fitting needs d ≥ 64, got {d}"
        )));
    }
    if !(nu > 0.0) {
        return Err(Error::InvalidArgument(format!("ν must be positive, got {nu}")));
    }
    let n = params.n;
    if n < 8 {
        return Err(Error::InvalidArgument(format!("grid needs at least 8 nodes, got {n}")));
    }
    let h = 1.0 / (n + 1) as f64;
    let sqrt_w: Vec<f64> = (1..=n)
        .map(|i| (h * (i as f64 * h).powf(params.gamma)).sqrt())
        .collect();
    let d2 = spectral_second_derivative(n);
    let mut weighted_d2 = d2.clone();
    for (i, w) in sqrt_w.iter().enumerate() {
        weighted_d2.row_mut(i).scale_mut(*w);
    }
    let scale = balanced_diag_scale(n, d, nu);
    let mut all = Vec::with_capacity(n * d);
    for j in 1..=d {
        let aj = scale * (j as f64).powf(1.0 / nu);
        let mut stacked = CMatrix::zeros(2 * n, n);
        for i in 0..n {
            stacked[(i, i)] = C64::from(aj * sqrt_w[i]);
        }
        stacked.view_mut((n, 0), (n, n)).copy_from(&weighted_d2);
        let r = stacked.qr().r();
        let r_inv = linalg::inverse(&r, "graph-norm factor")?;
        let mut map = r_inv;
        for (i, w) in sqrt_w.iter().enumerate() {
            map.row_mut(i).scale_mut(*w);
        }
        all.extend(linalg::singular_values(&map));
    }
    all.sort_by(|a, b| b.total_cmp(a));
    if let Some(k) = params.k_max {
        if k < 6 || k > all.len() {
            return Err(Error::InvalidArgument(format!(
                "k_max must lie in 6..={}, got {k}",
                all.len()
            )));
        }
        all.truncate(k);
    }
    let fit = fit_middle_third(&all);
    let expected = -2.0 / (2.0 * nu + 1.0);
    Ok(EmbeddingReport {
        dim: d,
        n,
        nu,
        scale,
        fitted_exponent: fit.slope,
        expected_exponent: expected,
        r_squared: fit.r_squared,
        holds: (fit.slope - expected).abs() <= 0.1,
        s: all,
    })
}
