//! Sampled verification of the structural hypotheses on the coefficients:
//! positivity and R-positivity of `A(x)`, continuity of `A(x) A^{-1}(x̄)`,
//! boundedness of `B A^{-(1/2 − μ)}`, the sector of `−a`, and `η ≠ 0`.

use serde::{Deserialize, Serialize};

use super::characteristic::characteristic_data;
use super::problem::BvpProblem;
use crate::error::{Error, Result};
use crate::geometry::{r_bound_estimate, OperatorFamily};
use crate::linalg::{self, complex_powf, Schur, C64, CMatrix};
use crate::schatten::norm_bounds;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition1Params {
    pub x_samples: usize,
    pub xi_samples: usize,
    /// Sector half-angle for positivity of `A`.
    pub phi: f64,
    /// Sector half-angle containing `−a`.
    pub phi1: f64,
    /// Sector half-angle of the spectral parameter.
    pub phi2: f64,
    pub mu: f64,
    pub x_bar: f64,
    pub continuity_tol: f64,
    pub sign_samples: usize,
    pub seed: u64,
}

impl Default for Condition1Params {
    fn default() -> Self {
        Self {
            x_samples: 9,
            xi_samples: 8,
            phi: std::f64::consts::FRAC_PI_2,
            phi1: 0.0,
            phi2: std::f64::consts::FRAC_PI_4,
            mu: 0.25,
            x_bar: 0.5,
            continuity_tol: 0.1,
            sign_samples: 128,
            seed: 7,
        }
    }
}

/// Sample points of the closed sector `|arg λ| ≤ φ`: the origin plus `count`
/// log-spaced moduli in `[1e-2, 1e4]` on the rays `arg λ ∈ {0, ±φ/2, ±φ}`.
pub fn sector_samples(phi: f64, count: usize) -> Vec<C64> {
    let mut angles = vec![0.0];
    if phi > 0.0 {
        angles.extend([-phi, -phi / 2.0, phi / 2.0, phi]);
    }
    let mut out = vec![C64::new(0.0, 0.0)];
    for r in linalg::log_space(1e-2, 1e4, count.max(2)) {
        for &t in &angles {
            out.push(C64::from_polar(r, t));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition1Report {
    /// Smallest `M` with `‖(A(x) + λ)^{-1}‖ ≤ M / (1 + |λ|)` over the samples.
    pub positivity_m: f64,
    pub positivity_holds: bool,
    /// Largest R-bound estimate of `{A(A + ξ)^{-1}}` over sampled `x`.
    pub r_bound: f64,
    pub r_bound_holds: bool,
    /// Largest `‖A(x_k) A^{-1}(x̄) − A(x_{k+1}) A^{-1}(x̄)‖` between neighbours.
    pub continuity_jump: f64,
    pub continuity_holds: bool,
    pub mu: f64,
    /// `sup_x ‖B(x) A(x)^{-(1/2 − μ)}‖`.
    pub b_fractional_norm: f64,
    pub b_fractional_holds: bool,
    pub sector_holds: bool,
    pub min_abs_eta: f64,
    pub eta_holds: bool,
    /// `φ_1 + φ_2 < φ`.
    pub angle_sum_holds: bool,
    pub all_hold: bool,
}

/// `A^{-s}` by eigendecomposition with the principal branch.
fn negative_fractional_power(a: &CMatrix, s: f64) -> Result<CMatrix> {
    let n = a.nrows();
    let schur = Schur::new(a)?;
    let values = schur.eigenvalues();
    if values.iter().any(|v| v.norm() == 0.0) {
        return Err(Error::Singular {
            context: "A(x) in fractional power".into(),
        });
    }
    let mut v = CMatrix::zeros(n, n);
    for k in 0..n {
        v.set_column(k, &schur.eigenvector(k));
    }
    let v_inv = linalg::inverse(&v, "eigenvector matrix of A(x)")?;
    let diag = CMatrix::from_diagonal(&linalg::CVector::from_fn(n, |k, _| {
        complex_powf(values[k], -s)
    }));
    Ok(&v * diag * v_inv)
}

fn sample_positions(problem: &BvpProblem, count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count)
        .map(|k| problem.length * k as f64 / (count - 1) as f64)
        .collect()
}

pub fn condition1_check(problem: &BvpProblem, params: &Condition1Params) -> Result<Condition1Report> {
    let ctx = problem.context()?;
    let p = ctx.p();
    let d = problem.dim;
    if !(params.mu > 0.0 && params.mu < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "μ must lie in (0, 1/2), got {}",
            params.mu
        )));
    }
    let xs = sample_positions(problem, params.x_samples);
    let lambdas = sector_samples(params.phi, params.xi_samples);
    let id = CMatrix::identity(d, d);

    let mut positivity_m: f64 = 0.0;
    let mut r_bound: f64 = 0.0;
    let mut b_fractional: f64 = 0.0;
    let mut positivity_ok = true;
    for (k, &x) in xs.iter().enumerate() {
        let a = problem.a_op.eval(x, d);
        for &lambda in &lambdas {
            match linalg::inverse(&(&a + &id * lambda), "A(x) + λ") {
                Ok(r) => {
                    let bound = norm_bounds(&r, p).upper;
                    positivity_m = positivity_m.max((1.0 + lambda.norm()) * bound);
                }
                Err(_) => positivity_ok = false,
            }
        }
        match OperatorFamily::resolvent_family(&a, &lambdas) {
            Ok(family) => {
                let est = r_bound_estimate(&family, ctx, params.sign_samples, params.seed + k as u64)?;
                r_bound = r_bound.max(est);
            }
            Err(_) => positivity_ok = false,
        }
        let b = problem.b_op.eval(x, d);
        if !problem.b_op.is_zero() {
            let frac = negative_fractional_power(&a, 0.5 - params.mu)?;
            b_fractional = b_fractional.max(norm_bounds(&(b * frac), p).upper);
        }
    }

    let a_bar = problem.a_op.eval(params.x_bar * problem.length, d);
    let a_bar_inv = linalg::inverse(&a_bar, "A(x̄)")?;
    let mut continuity_jump: f64 = 0.0;
    for w in xs.windows(2) {
        let left = problem.a_op.eval(w[0], d) * &a_bar_inv;
        let right = problem.a_op.eval(w[1], d) * &a_bar_inv;
        continuity_jump = continuity_jump.max(norm_bounds(&(left - right), p).upper);
    }

    let mut sector_holds = true;
    let mut min_abs_eta = f64::INFINITY;
    for &x in &xs {
        let a = problem.a.eval(x);
        let minus_a = -a;
        let on_negative_axis = minus_a.im == 0.0 && minus_a.re <= 0.0;
        if a.norm() == 0.0 || on_negative_axis || minus_a.arg().abs() > params.phi1 + 1e-15 {
            sector_holds = false;
        }
        if a.norm() > 0.0 {
            min_abs_eta = min_abs_eta.min(characteristic_data(problem, x)?.eta.norm());
        }
    }

    let positivity_holds = positivity_ok && positivity_m.is_finite();
    let r_bound_holds = positivity_ok && r_bound.is_finite();
    let continuity_holds = continuity_jump <= params.continuity_tol;
    let b_fractional_holds = b_fractional.is_finite();
    let eta_holds = min_abs_eta > 1e-12;
    let angle_sum_holds = params.phi1 + params.phi2 < params.phi;
    let all_hold = positivity_holds
        && r_bound_holds
        && continuity_holds
        && b_fractional_holds
        && sector_holds
        && eta_holds
        && angle_sum_holds;
    Ok(Condition1Report {
        positivity_m,
        positivity_holds,
        r_bound,
        r_bound_holds,
        continuity_jump,
        continuity_holds,
        mu: params.mu,
        b_fractional_norm: b_fractional,
        b_fractional_holds,
        sector_holds,
        min_abs_eta,
        eta_holds,
        angle_sum_holds,
        all_hold,
    })
}
