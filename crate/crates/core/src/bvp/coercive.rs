//! Observed constant in the coercive estimate
//! `Σ_i |λ|^{1−i/2} ‖u^{(i)}‖ + ‖Au‖ ≤ M ‖f‖` for `(Q_h + λ) u = f`.

use serde::{Deserialize, Serialize};

use super::discretize::DiscretizedOperator;
use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMatrix, CVector};
use crate::random::{gaussian_vector, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoerciveSample {
    pub lambda: C64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoerciveReport {
    pub samples: Vec<CoerciveSample>,
    pub m_observed: f64,
    /// Largest ratio among samples with `|λ|` in the top decade.
    pub top_decade_max: f64,
    /// Largest ratio in the decade below it.
    pub second_decade_max: f64,
    /// `max / min` of the two decade maxima.
    pub stability: f64,
    pub stable: bool,
    /// `top_decade_max / m_observed`.
    pub top_to_overall: f64,
}

const STABILITY_TOL: f64 = 1.1;

/// Solves `(Q_h + λ) u = f` for one seeded white-noise `f` at every `λ`
/// and records the coercive ratio in the discrete weighted norm.
pub fn coercive_estimate_report(
    op: &DiscretizedOperator,
    lambdas: &[C64],
    seed: u64,
) -> Result<CoerciveReport> {
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("no λ samples supplied".into()));
    }
    let size = op.size();
    let mut rng = seeded(seed);
    let f = gaussian_vector(size, &mut rng);
    let f_norm = op.norm(&f);
    let id = CMatrix::identity(size, size);
    let mut samples = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if lambda == C64::new(0.0, 0.0) {
            return Err(Error::InvalidArgument("λ = 0 is excluded".into()));
        }
        let system = &op.q + &id * lambda;
        let rhs = CMatrix::from_column_slice(size, 1, f.as_slice());
        let u: CVector = linalg::solve(&system, &rhs, "Q_h + λ")?.column(0).into_owned();
        let m = lambda.norm();
        let total = m * op.norm(&u)
            + m.sqrt() * op.norm(&op.first_derivative(&u))
            + op.norm(&op.second_derivative(&u))
            + op.norm(&op.apply_a(&u));
        samples.push(CoerciveSample {
            lambda,
            ratio: total / f_norm,
        });
    }
    let m_observed = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let top = samples.iter().map(|s| s.lambda.norm()).fold(0.0, f64::max);
    let decade_max = |lo: f64, hi: f64| {
        samples
            .iter()
            .filter(|s| {
                let r = s.lambda.norm();
                r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12)
            })
            .map(|s| s.ratio)
            .fold(f64::NAN, f64::max)
    };
    let top_decade_max = decade_max(top / 10.0, top);
    let second_decade_max = decade_max(top / 100.0, top / 10.0);
    let stability = if second_decade_max.is_nan() {
        1.0
    } else {
        top_decade_max.max(second_decade_max) / top_decade_max.min(second_decade_max)
    };
    Ok(CoerciveReport {
        samples,
        m_observed,
        top_decade_max,
        second_decade_max,
        stability,
        stable: stability <= STABILITY_TOL,
        top_to_overall: top_decade_max / m_observed,
    })
}
