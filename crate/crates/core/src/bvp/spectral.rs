//! Spectrum, resolvent singular numbers and root-function completeness of
//! the assembled operator `Q_h`.

use serde::{Deserialize, Serialize};

use super::discretize::DiscretizedOperator;
use super::embedding::fit_middle_third;
use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMatrix};
use crate::resolvent::ArcConfiguration;
use crate::rootspace::{completeness_verdict_with, decompose, CompletenessReport, VerdictOptions};
use crate::schatten::OperatorMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    /// Order `ν` in `s_j(I(E(A), E)) ~ j^{-1/ν}` for the coefficient model.
    pub nu: f64,
    /// Summability exponent; must exceed `ν + 1/2`.
    pub q: f64,
    /// Sector half-angle `φ` of the spectral parameter, checked against `π/(2q)`.
    pub phi: f64,
    /// Shift `λ > 0` in `(Q_h + λ)^{-1}`.
    pub shift: f64,
    pub sample_count: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SpectralParams {
    fn default() -> Self {
        Self {
            nu: 1.0,
            q: 2.0,
            phi: std::f64::consts::FRAC_PI_4,
            shift: 1.0,
            sample_count: 8,
            seed: 11,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub value: C64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvpSpectralReport {
    /// Eigenvalues of `Q_h` sorted by modulus.
    pub eigenvalues: Vec<C64>,
    /// Eigenvalue clusters with algebraic multiplicities.
    pub spectrum: Vec<SpectrumPoint>,
    pub min_separation: f64,
    pub mean_separation: f64,
    pub max_abs_imag: f64,
    pub phi_within_bound: bool,
    pub resolvent_snumbers: Vec<f64>,
    pub snumber_slope: f64,
    pub expected_slope: f64,
    pub slope_within_tolerance: bool,
    pub completeness: CompletenessReport,
    pub max_root_distance: f64,
}

fn separation_stats(sorted: &[C64]) -> (f64, f64) {
    if sorted.len() < 2 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let mut min = f64::INFINITY;
    let mut sum = 0.0;
    for (k, a) in sorted.iter().enumerate() {
        let nearest = sorted
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, b)| (a - b).norm())
            .fold(f64::INFINITY, f64::min);
        min = min.min(nearest);
        sum += nearest;
    }
    (min, sum / sorted.len() as f64)
}

/// Singular values of `(Q_h + λ)^{-1}` in the weighted discrete `L_2`,
/// i.e. of `W^{1/2} (Q_h + λ)^{-1} W^{-1/2}`.
pub fn resolvent_snumbers(op: &DiscretizedOperator, shift: C64) -> Result<Vec<f64>> {
    let size = op.size();
    let sqrt_w: Vec<f64> = op.unknown_weights().iter().map(|w| w.sqrt()).collect();
    let r = linalg::inverse(&(&op.q + CMatrix::identity(size, size) * shift), "Q_h + λ")?;
    let scaled = CMatrix::from_fn(size, size, |i, j| r[(i, j)] * (sqrt_w[i] / sqrt_w[j]));
    Ok(linalg::singular_values(&scaled))
}

pub fn bvp_spectral_report(
    op: &DiscretizedOperator,
    arcs: &ArcConfiguration,
    params: &SpectralParams,
) -> Result<BvpSpectralReport> {
    if !(params.q > params.nu + 0.5) {
        return Err(Error::InvalidArgument(format!(
            "q = {} must exceed ν + 1/2 = {}",
            params.q,
            params.nu + 0.5
        )));
    }
    if !(params.shift > 0.0) {
        return Err(Error::InvalidArgument("resolvent shift must be positive".into()));
    }
    let matrix = OperatorMatrix::new(op.q.clone(), op.context)?;
    let decomp = decompose(&op.q, params.tol)?;

    let mut eigenvalues: Vec<C64> = Vec::with_capacity(op.size());
    let mut spectrum = Vec::with_capacity(decomp.clusters().len());
    for c in decomp.clusters() {
        spectrum.push(SpectrumPoint {
            value: c.eigenvalue,
            multiplicity: c.multiplicity,
        });
        eigenvalues.extend(std::iter::repeat(c.eigenvalue).take(c.multiplicity));
    }
    eigenvalues.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    spectrum.sort_by(|a, b| {
        a.value
            .norm()
            .total_cmp(&b.value.norm())
            .then(a.value.arg().total_cmp(&b.value.arg()))
    });
    let cluster_values: Vec<C64> = spectrum.iter().map(|s| s.value).collect();
    let (min_separation, mean_separation) = separation_stats(&cluster_values);
    let max_abs_imag = eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);

    let s = resolvent_snumbers(op, C64::from(params.shift))?;
    let fit = fit_middle_third(&s);
    let expected_slope = -2.0 / (2.0 * params.nu + 1.0);

    let options = VerdictOptions {
        weights: Some(op.unknown_weights()),
        tol: params.tol,
        ..VerdictOptions::default()
    };
    let completeness = completeness_verdict_with(
        &matrix,
        &decomp,
        0,
        arcs,
        params.sample_count,
        params.seed,
        &options,
    )?;
    Ok(BvpSpectralReport {
        eigenvalues,
        spectrum,
        min_separation,
        mean_separation,
        max_abs_imag,
        phi_within_bound: params.phi <= std::f64::consts::PI / (2.0 * params.q),
        resolvent_snumbers: s,
        snumber_slope: fit.slope,
        expected_slope,
        slope_within_tolerance: (fit.slope - expected_slope).abs() <= 0.1,
        max_root_distance: completeness.max_relative_distance,
        completeness,
    })
}
