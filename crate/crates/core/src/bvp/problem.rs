//! Problem data: coefficient functions, boundary functionals and weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ExponentContext;
use crate::linalg::{C64, CMatrix};

/// `x(y) = ((1 − γ) y)^{1/(1−γ)}`, inverse of `y(x) = x^{1−γ} / (1 − γ)`.
pub fn degenerate_inverse_map(y: f64, gamma: f64) -> f64 {
    ((1.0 - gamma) * y).max(0.0).powf(1.0 / (1.0 - gamma))
}

/// `y(x) = ∫_0^x z^{−γ} dz = x^{1−γ} / (1 − γ)`.
pub fn degenerate_map(x: f64, gamma: f64) -> f64 {
    x.max(0.0).powf(1.0 - gamma) / (1.0 - gamma)
}

fn interpolate<T: Clone>(nodes: &[f64], values: &[T], x: f64, lerp: impl Fn(&T, &T, f64) -> T) -> T {
    if x <= nodes[0] {
        return values[0].clone();
    }
    let last = nodes.len() - 1;
    if x >= nodes[last] {
        return values[last].clone();
    }
    let k = nodes.partition_point(|&t| t <= x) - 1;
    let t = (x - nodes[k]) / (nodes[k + 1] - nodes[k]);
    lerp(&values[k], &values[k + 1], t)
}

fn check_table(nodes: &[f64], count: usize) -> Result<()> {
    if nodes.len() < 2 || nodes.len() != count {
        return Err(Error::InvalidArgument(
            "tabulated function needs at least two nodes with one value each".into(),
        ));
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("tabulation nodes must increase".into()));
    }
    Ok(())
}

/// Complex coefficient `a(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFunction {
    Constant { value: C64 },
    /// `value + slope · x`.
    Affine { value: C64, slope: C64 },
    /// Piecewise-linear interpolation, constant beyond the end nodes.
    Tabulated { nodes: Vec<f64>, values: Vec<C64> },
    /// `base(x(y))` under the degenerate change of variable with exponent `gamma`.
    Mapped { base: Box<ScalarFunction>, gamma: f64 },
}

impl ScalarFunction {
    pub fn constant(re: f64) -> Self {
        Self::Constant {
            value: C64::new(re, 0.0),
        }
    }

    pub fn eval(&self, x: f64) -> C64 {
        match self {
            Self::Constant { value } => *value,
            Self::Affine { value, slope } => value + slope * x,
            Self::Tabulated { nodes, values } => {
                interpolate(nodes, values, x, |a, b, t| a * (1.0 - t) + b * t)
            }
            Self::Mapped { base, gamma } => base.eval(degenerate_inverse_map(x, *gamma)),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Tabulated { nodes, values } => check_table(nodes, values.len()),
            Self::Mapped { base, gamma } => {
                if !(*gamma > 0.0 && *gamma < 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "mapped coefficient needs 0 < γ < 1, got {gamma}"
                    )));
                }
                base.validate()
            }
            _ => Ok(()),
        }
    }
}

/// `d × d` matrix coefficient `A(x)` or `B(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixFunction {
    Zero,
    /// `value · I`.
    Scalar { value: C64 },
    Diagonal { entries: Vec<C64> },
    /// Row-major `d × d` entries.
    Dense { entries: Vec<C64> },
    /// `base + x · slope`.
    Affine {
        base: Box<MatrixFunction>,
        slope: Box<MatrixFunction>,
    },
    /// `scale · diag(1^e, 2^e, …, d^e)`.
    DiagPower { scale: f64, exponent: f64 },
    /// Diagonal entries tabulated at nodes, interpolated linearly.
    Tabulated {
        nodes: Vec<f64>,
        diagonals: Vec<Vec<C64>>,
    },
    Mapped {
        base: Box<MatrixFunction>,
        gamma: f64,
    },
}

impl MatrixFunction {
    pub fn scalar(re: f64) -> Self {
        Self::Scalar {
            value: C64::new(re, 0.0),
        }
    }

    pub fn eval(&self, x: f64, d: usize) -> CMatrix {
        match self {
            Self::Zero => CMatrix::zeros(d, d),
            Self::Scalar { value } => CMatrix::identity(d, d) * *value,
            Self::Diagonal { entries } => {
                CMatrix::from_diagonal(&crate::linalg::to_cvector(entries))
            }
            Self::Dense { entries } => CMatrix::from_row_slice(d, d, entries),
            Self::Affine { base, slope } => base.eval(x, d) + slope.eval(x, d) * C64::from(x),
            Self::DiagPower { scale, exponent } => CMatrix::from_diagonal(
                &crate::linalg::CVector::from_fn(d, |j, _| {
                    C64::from(scale * ((j + 1) as f64).powf(*exponent))
                }),
            ),
            Self::Tabulated { nodes, diagonals } => {
                let diag = interpolate(nodes, diagonals, x, |a, b, t| {
                    a.iter().zip(b).map(|(u, v)| u * (1.0 - t) + v * t).collect()
                });
                CMatrix::from_diagonal(&crate::linalg::to_cvector(&diag))
            }
            Self::Mapped { base, gamma } => base.eval(degenerate_inverse_map(x, *gamma), d),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    fn validate(&self, d: usize) -> Result<()> {
        let mismatch = |found: usize| Error::DimensionMismatch { expected: d, found };
        match self {
            Self::Diagonal { entries } if entries.len() != d => Err(mismatch(entries.len())),
            Self::Dense { entries } if entries.len() != d * d => Err(mismatch(entries.len())),
            Self::Affine { base, slope } => {
                base.validate(d)?;
                slope.validate(d)
            }
            Self::Tabulated { nodes, diagonals } => {
                check_table(nodes, diagonals.len())?;
                match diagonals.iter().find(|v| v.len() != d) {
                    Some(v) => Err(mismatch(v.len())),
                    None => Ok(()),
                }
            }
            Self::Mapped { base, gamma } => {
                if !(*gamma > 0.0 && *gamma < 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "mapped coefficient needs 0 < γ < 1, got {gamma}"
                    )));
                }
                base.validate(d)
            }
            _ => Ok(()),
        }
    }
}

/// Value or derivative at an interior point `x_kj` with coefficients
/// `δ_kj0, …, δ_kjm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteriorTerm {
    pub point: f64,
    pub coeffs: Vec<C64>,
}

/// `L u = Σ_{i≤m} [α_i u^{(i)}(0) + β_i u^{(i)}(ℓ) + Σ_j δ_ji u^{(i)}(x_j)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFunctional {
    pub order: usize,
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
    #[serde(default)]
    pub interior: Vec<InteriorTerm>,
}

impl BoundaryFunctional {
    /// `u(0) = 0`.
    pub fn dirichlet_left() -> Self {
        Self::endpoint(0, true)
    }

    /// `u(ℓ) = 0`.
    pub fn dirichlet_right() -> Self {
        Self::endpoint(0, false)
    }

    /// `u'(0) = 0` or `u'(ℓ) = 0`.
    pub fn neumann(left: bool) -> Self {
        Self::endpoint(1, left)
    }

    fn endpoint(order: usize, left: bool) -> Self {
        let mut alpha = vec![C64::new(0.0, 0.0); order + 1];
        let mut beta = alpha.clone();
        if left {
            alpha[order] = C64::new(1.0, 0.0);
        } else {
            beta[order] = C64::new(1.0, 0.0);
        }
        Self {
            order,
            alpha,
            beta,
            interior: Vec::new(),
        }
    }

    /// Leading coefficients `(α_k, β_k) = (α_{k m_k}, β_{k m_k})`.
    pub fn leading(&self) -> (C64, C64) {
        (self.alpha[self.order], self.beta[self.order])
    }

    fn validate(&self, length: f64) -> Result<()> {
        if self.order > 1 {
            return Err(Error::InvalidArgument(format!(
                "boundary order must be 0 or 1, got {}",
                self.order
            )));
        }
        let len = self.order + 1;
        if self.alpha.len() != len || self.beta.len() != len {
            return Err(Error::InvalidArgument(format!(
                "boundary functional of order {} needs {len} endpoint coefficients",
                self.order
            )));
        }
        for t in &self.interior {
            if !(t.point > 0.0 && t.point < length) {
                return Err(Error::InvalidArgument(format!(
                    "interior point {} is not strictly inside (0, {length})",
                    t.point
                )));
            }
            if t.coeffs.len() != len {
                return Err(Error::InvalidArgument(
                    "interior term needs one coefficient per derivative order".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Node weight `scale · x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub exponent: f64,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl WeightSpec {
    pub fn power(exponent: f64) -> Self {
        Self {
            exponent,
            scale: 1.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.exponent == 0.0 {
            self.scale
        } else {
            self.scale * x.powf(self.exponent)
        }
    }
}

/// `(Q + λ) u = a u'' + B u' + (A + λ) u = f` on `(0, ℓ)` with values in `ℂ^d`
/// and two boundary functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvpProblem {
    pub dim: usize,
    #[serde(default = "one")]
    pub length: f64,
    pub a: ScalarFunction,
    #[serde(rename = "A")]
    pub a_op: MatrixFunction,
    #[serde(rename = "B", default = "zero_matrix")]
    pub b_op: MatrixFunction,
    pub boundary: [BoundaryFunctional; 2],
    pub weight: WeightSpec,
    pub p: f64,
}

fn zero_matrix() -> MatrixFunction {
    MatrixFunction::Zero
}

const SAMPLE_POINTS: usize = 33;

impl BvpProblem {
    /// Scalar model `−u'' + c u` with Dirichlet conditions.
    pub fn dirichlet_scalar(c: f64, p: f64) -> Self {
        Self {
            dim: 1,
            length: 1.0,
            a: ScalarFunction::constant(-1.0),
            a_op: MatrixFunction::scalar(c),
            b_op: MatrixFunction::Zero,
            boundary: [
                BoundaryFunctional::dirichlet_left(),
                BoundaryFunctional::dirichlet_right(),
            ],
            weight: WeightSpec::power(0.0),
            p,
        }
    }

    pub fn context(&self) -> Result<ExponentContext> {
        ExponentContext::new(self.p)
    }

    /// Sample points `0, ℓ/32, …, ℓ`.
    pub fn sample_points(&self) -> Vec<f64> {
        (0..SAMPLE_POINTS)
            .map(|k| self.length * k as f64 / (SAMPLE_POINTS - 1) as f64)
            .collect()
    }

    /// Checks structural data and, at sampled points, that `a ≠ 0`, `−a`
    /// avoids the negative real axis and `η ≠ 0`. With `strict_weight` the
    /// weight exponent must satisfy `0 ≤ γ < p − 1`.
    pub fn validate(&self, strict_weight: bool) -> Result<()> {
        let ctx = self.context()?;
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::InvalidArgument("interval length must be positive".into()));
        }
        self.a.validate()?;
        self.a_op.validate(self.dim)?;
        self.b_op.validate(self.dim)?;
        for l in &self.boundary {
            l.validate(self.length)?;
        }
        if strict_weight {
            let g = self.weight.exponent;
            if !(g >= 0.0 && g < ctx.p() - 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "weight exponent {g} outside [0, p − 1)"
                )));
            }
        }
        if !(self.weight.scale > 0.0) {
            return Err(Error::InvalidArgument("weight scale must be positive".into()));
        }
        for x in self.sample_points() {
            let a = self.a.eval(x);
            let minus_a = -a;
            if a.norm() == 0.0 {
                return Err(Error::InvalidArgument(format!("a vanishes at x = {x}")));
            }
            if minus_a.im == 0.0 && minus_a.re < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "−a({x}) lies on the negative real axis"
                )));
            }
            let data = super::characteristic::characteristic_from(a, &self.boundary)?;
            if data.eta.norm() <= 1e-12 {
                return Err(Error::SingularBoundary { eta: data.eta });
            }
        }
        Ok(())
    }
}
