//! Regularization of the degenerate problem with derivative `x^γ d/dx` by the
//! substitution `y = ∫_0^x z^{−γ} dz`, which maps `(0, 1)` onto `(0, b)`,
//! `b = 1/(1 − γ)`, and turns `x^γ d/dx` into `d/dy`.

use serde::{Deserialize, Serialize};

use super::problem::{
    degenerate_inverse_map, degenerate_map, BvpProblem, InteriorTerm, MatrixFunction,
    ScalarFunction, WeightSpec,
};
use crate::error::{Error, Result};

/// How the transformed weight `x(y)^γ` is written as a power of `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightConvention {
    /// `x(y)^γ = [(1−γ) y]^{γ/(1−γ)}`, consistent with the chain rule.
    #[default]
    ChainRule,
    /// `[(1−γ) y]^{1/(1−γ)}`, the coordinate map itself used as the weight.
    AsPrinted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateTransform {
    pub gamma: f64,
    pub b: f64,
    pub convention: WeightConvention,
    pub regular: BvpProblem,
    /// Whether the transformed weight exponent lies in the `A_p` range
    /// `(−1, p − 1)`.
    pub weight_in_ap: bool,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "degenerate exponent must lie in (0, 1), got {gamma}"
        )))
    }
}

/// Transforms a problem on `(0, 1)` whose weight exponent `γ` is also the
/// degeneracy exponent. Coefficients are composed with `x(y)`, interior
/// points are mapped by `y(x)`, and boundary coefficients carry over because
/// `u^{[1]} = x^γ u'` becomes `du/dy`.
pub fn degenerate_transform(
    problem: &BvpProblem,
    convention: WeightConvention,
) -> Result<DegenerateTransform> {
    let gamma = problem.weight.exponent;
    check_gamma(gamma)?;
    if (problem.length - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(
            "degenerate problems are posed on (0, 1)".into(),
        ));
    }
    let ctx = problem.context()?;
    let b = 1.0 / (1.0 - gamma);
    let exponent = match convention {
        WeightConvention::ChainRule => gamma / (1.0 - gamma),
        WeightConvention::AsPrinted => 1.0 / (1.0 - gamma),
    };
    let weight = WeightSpec {
        exponent,
        scale: problem.weight.scale * (1.0 - gamma).powf(exponent),
    };
    let map_matrix = |m: &MatrixFunction| match m {
        MatrixFunction::Zero => MatrixFunction::Zero,
        other => MatrixFunction::Mapped {
            base: Box::new(other.clone()),
            gamma,
        },
    };
    let mut boundary = problem.boundary.clone();
    for l in boundary.iter_mut() {
        l.interior = l
            .interior
            .iter()
            .map(|t| InteriorTerm {
                point: degenerate_map(t.point, gamma),
                coeffs: t.coeffs.clone(),
            })
            .collect();
    }
    let regular = BvpProblem {
        dim: problem.dim,
        length: b,
        a: ScalarFunction::Mapped {
            base: Box::new(problem.a.clone()),
            gamma,
        },
        a_op: map_matrix(&problem.a_op),
        b_op: map_matrix(&problem.b_op),
        boundary,
        weight,
        p: problem.p,
    };
    Ok(DegenerateTransform {
        gamma,
        b,
        convention,
        regular,
        weight_in_ap: exponent > -1.0 && exponent < ctx.p() - 1.0,
    })
}

impl DegenerateTransform {
    /// Weight of the regular problem at `y`.
    pub fn weight_at(&self, y: f64) -> f64 {
        self.regular.weight.eval(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainRuleReport {
    pub gamma: f64,
    /// `max |x^γ u'(x) − (d/dy) u(x(y))|` over the grid.
    pub max_error: f64,
    /// `max |x(y(x_i)) − x_i|` over the grid.
    pub round_trip_error: f64,
    pub holds: bool,
}

const CHAIN_RULE_TOL: f64 = 1e-8;
const ROUND_TRIP_TOL: f64 = 1e-9;

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn poly_derivative(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, c)| acc * x + k as f64 * c)
}

/// Compares `x^γ u'(x)` for the polynomial `u = Σ c_k x^k` with a
/// Richardson-extrapolated central difference of `y ↦ u(x(y))` at
/// `grid` points of `[0.05, 0.95]`.
pub fn chain_rule_check(gamma: f64, coeffs: &[f64], grid: usize) -> Result<ChainRuleReport> {
    check_gamma(gamma)?;
    if coeffs.is_empty() || grid < 2 {
        return Err(Error::InvalidArgument(
            "need a nonempty polynomial and at least two grid points".into(),
        ));
    }
    let v = |y: f64| poly(coeffs, degenerate_inverse_map(y, gamma));
    let central = |y: f64, h: f64| (v(y + h) - v(y - h)) / (2.0 * h);
    let mut max_error: f64 = 0.0;
    let mut round_trip: f64 = 0.0;
    for i in 0..grid {
        let x = 0.05 + 0.9 * i as f64 / (grid - 1) as f64;
        let y = degenerate_map(x, gamma);
        round_trip = round_trip.max((degenerate_inverse_map(y, gamma) - x).abs());
        let h = 0.01 * y;
        let (d1, d2, d4) = (central(y, h), central(y, h / 2.0), central(y, h / 4.0));
        let r1 = (4.0 * d2 - d1) / 3.0;
        let r2 = (4.0 * d4 - d2) / 3.0;
        let numeric = (16.0 * r2 - r1) / 15.0;
        let exact = x.powf(gamma) * poly_derivative(coeffs, x);
        max_error = max_error.max((numeric - exact).abs());
    }
    Ok(ChainRuleReport {
        gamma,
        max_error,
        round_trip_error: round_trip,
        holds: max_error <= CHAIN_RULE_TOL && round_trip <= ROUND_TRIP_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_substitution() {
        let mut problem = BvpProblem::dirichlet_scalar(1.0, 3.0);
        problem.weight = WeightSpec::power(0.5);
        let t = degenerate_transform(&problem, WeightConvention::ChainRule).unwrap();
        assert!((t.b - 2.0).abs() < 1e-15);
        assert!((degenerate_map(0.25, 0.5) - 1.0).abs() < 1e-15);
        // x(y)^γ at y = 1 is (1/4)^{1/2}.
        assert!((t.weight_at(1.0) - 0.5).abs() < 1e-14);
        assert!(t.weight_in_ap);
        problem.p = 2.0;
        let t = degenerate_transform(&problem, WeightConvention::AsPrinted).unwrap();
        assert!(!t.weight_in_ap);
    }

    #[test]
    fn chain_rule_on_square() {
        let r = chain_rule_check(0.5, &[0.0, 0.0, 1.0], 50).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(chain_rule_check(1.0, &[1.0], 10).is_err());
    }
}
