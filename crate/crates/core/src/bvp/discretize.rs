//! Finite-difference assembly of `Q_h = a D² + B D + A` on interior nodes,
//! with the boundary functionals eliminated.

use super::characteristic::characteristic_data;
use super::problem::{BoundaryFunctional, BvpProblem};
use crate::error::{Error, Result};
use crate::geometry::ExponentContext;
use crate::linalg::{self, C64, CMatrix, CVector};

#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub n: usize,
    pub dim: usize,
    pub h: f64,
    /// Interior nodes `x_1 … x_n`.
    pub nodes: Vec<f64>,
    /// Assembled `(n d) × (n d)` operator, node-major ordering.
    pub q: CMatrix,
    /// Scalar first/second difference matrices on interior unknowns with
    /// boundary values eliminated.
    pub d1: CMatrix,
    pub d2: CMatrix,
    pub a_values: Vec<C64>,
    pub a_blocks: Vec<CMatrix>,
    pub b_blocks: Vec<CMatrix>,
    /// `w(x_i)` at interior nodes.
    pub weights: Vec<f64>,
    /// Rows giving `u_0` and `u_{n+1}` as combinations of interior values.
    pub boundary_map: CMatrix,
    pub context: ExponentContext,
}

/// Linear form over node values `u_0 … u_{n+1}`.
type NodeForm = Vec<C64>;

fn derivative_form(i: usize, n: usize, h: f64) -> NodeForm {
    let mut f = vec![C64::new(0.0, 0.0); n + 2];
    let s = 1.0 / (2.0 * h);
    if i == 0 {
        f[0] = C64::from(-3.0 * s);
        f[1] = C64::from(4.0 * s);
        f[2] = C64::from(-s);
    } else if i == n + 1 {
        f[n - 1] = C64::from(s);
        f[n] = C64::from(-4.0 * s);
        f[n + 1] = C64::from(3.0 * s);
    } else {
        f[i - 1] = C64::from(-s);
        f[i + 1] = C64::from(s);
    }
    f
}

fn value_form(i: usize, n: usize) -> NodeForm {
    let mut f = vec![C64::new(0.0, 0.0); n + 2];
    f[i] = C64::new(1.0, 0.0);
    f
}

/// Linear interpolation weights `(k, t)` of a point between nodes `k, k+1`.
fn locate(x: f64, n: usize, h: f64) -> (usize, f64) {
    let s = x / h;
    let k = (s.floor() as usize).min(n);
    (k, s - k as f64)
}

fn add_scaled(target: &mut NodeForm, form: &NodeForm, c: C64) {
    for (t, f) in target.iter_mut().zip(form) {
        *t += f * c;
    }
}

fn functional_form(l: &BoundaryFunctional, n: usize, h: f64) -> NodeForm {
    let mut form = vec![C64::new(0.0, 0.0); n + 2];
    for i in 0..=l.order {
        let (left, right) = if i == 0 {
            (value_form(0, n), value_form(n + 1, n))
        } else {
            (derivative_form(0, n, h), derivative_form(n + 1, n, h))
        };
        add_scaled(&mut form, &left, l.alpha[i]);
        add_scaled(&mut form, &right, l.beta[i]);
        for term in &l.interior {
            let (k, t) = locate(term.point, n, h);
            let (lo, hi) = if i == 0 {
                (value_form(k, n), value_form(k + 1, n))
            } else {
                (derivative_form(k, n, h), derivative_form(k + 1, n, h))
            };
            add_scaled(&mut form, &lo, term.coeffs[i] * (1.0 - t));
            add_scaled(&mut form, &hi, term.coeffs[i] * t);
        }
    }
    form
}

pub fn discretize(problem: &BvpProblem, n: usize) -> Result<DiscretizedOperator> {
    discretize_with(problem, n, true)
}

/// Assembly without the strict weight-exponent check (used for transformed
/// problems whose weights leave the A_p range).
pub fn discretize_with(problem: &BvpProblem, n: usize, strict_weight: bool) -> Result<DiscretizedOperator> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!("grid needs at least 8 nodes, got {n}")));
    }
    problem.validate(strict_weight)?;
    let context = problem.context()?;
    let d = problem.dim;
    let h = problem.length / (n + 1) as f64;
    let nodes: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();

    let forms: Vec<NodeForm> = problem
        .boundary
        .iter()
        .map(|l| functional_form(l, n, h))
        .collect();
    let g = CMatrix::from_row_slice(
        2,
        2,
        &[forms[0][0], forms[0][n + 1], forms[1][0], forms[1][n + 1]],
    );
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    let scale = linalg::frobenius(&g).powi(2).max(f64::MIN_POSITIVE);
    if det.norm() <= 1e-12 * scale {
        let eta = characteristic_data(problem, 0.0)?.eta;
        return Err(Error::SingularBoundary { eta });
    }
    let interior = CMatrix::from_fn(2, n, |k, j| forms[k][j + 1]);
    let boundary_map = -linalg::solve(&g, &interior, "boundary elimination")?;

    let mut d1 = CMatrix::zeros(n, n);
    let mut d2 = CMatrix::zeros(n, n);
    let inv_h2 = 1.0 / (h * h);
    let inv_2h = 1.0 / (2.0 * h);
    for r in 0..n {
        // Full stencils over nodes r, r+1, r+2 (node index = unknown + 1).
        let full1 = [(r, -inv_2h), (r + 2, inv_2h)];
        let full2 = [(r, inv_h2), (r + 1, -2.0 * inv_h2), (r + 2, inv_h2)];
        for (target, stencil) in [(&mut d1, &full1[..]), (&mut d2, &full2[..])] {
            for &(node, c) in stencil {
                if node == 0 {
                    for j in 0..n {
                        target[(r, j)] += boundary_map[(0, j)] * c;
                    }
                } else if node == n + 1 {
                    for j in 0..n {
                        target[(r, j)] += boundary_map[(1, j)] * c;
                    }
                } else {
                    target[(r, node - 1)] += C64::from(c);
                }
            }
        }
    }

    let a_values: Vec<C64> = nodes.iter().map(|&x| problem.a.eval(x)).collect();
    let a_blocks: Vec<CMatrix> = nodes.iter().map(|&x| problem.a_op.eval(x, d)).collect();
    let b_blocks: Vec<CMatrix> = nodes.iter().map(|&x| problem.b_op.eval(x, d)).collect();
    let weights: Vec<f64> = nodes.iter().map(|&x| problem.weight.eval(x)).collect();

    let size = n * d;
    let mut q = CMatrix::zeros(size, size);
    let has_b = !problem.b_op.is_zero();
    for r in 0..n {
        for s in 0..n {
            let c2 = a_values[r] * d2[(r, s)];
            let c1 = d1[(r, s)];
            for i in 0..d {
                q[(r * d + i, s * d + i)] += c2;
                if has_b && c1 != C64::new(0.0, 0.0) {
                    for j in 0..d {
                        q[(r * d + i, s * d + j)] += b_blocks[r][(i, j)] * c1;
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                q[(r * d + i, r * d + j)] += a_blocks[r][(i, j)];
            }
        }
    }

    Ok(DiscretizedOperator {
        n,
        dim: d,
        h,
        nodes,
        q,
        d1,
        d2,
        a_values,
        a_blocks,
        b_blocks,
        weights,
        boundary_map,
        context,
    })
}

impl DiscretizedOperator {
    pub fn size(&self) -> usize {
        self.n * self.dim
    }

    /// Quadrature weights `h w(x_i)` repeated for each component.
    pub fn unknown_weights(&self) -> Vec<f64> {
        self.weights
            .iter()
            .flat_map(|&w| std::iter::repeat(self.h * w).take(self.dim))
            .collect()
    }

    /// Discrete `L_{p,γ}` norm `(Σ_i h w_i ‖v_i‖_p^p)^{1/p}`.
    pub fn norm(&self, v: &CVector) -> f64 {
        let p = self.context.p();
        let mut total = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            let block = &v.as_slice()[i * self.dim..(i + 1) * self.dim];
            total += self.h * w * linalg::vector_p_norm(block, p).powf(p);
        }
        total.powf(1.0 / p)
    }

    fn apply_scalar(&self, m: &CMatrix, v: &CVector) -> CVector {
        let d = self.dim;
        let mut out = CVector::zeros(v.len());
        for r in 0..self.n {
            for s in 0..self.n {
                let c = m[(r, s)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..d {
                    out[r * d + i] += c * v[s * d + i];
                }
            }
        }
        out
    }

    pub fn first_derivative(&self, v: &CVector) -> CVector {
        self.apply_scalar(&self.d1, v)
    }

    pub fn second_derivative(&self, v: &CVector) -> CVector {
        self.apply_scalar(&self.d2, v)
    }

    /// Nodewise `A(x_i) v_i`.
    pub fn apply_a(&self, v: &CVector) -> CVector {
        let d = self.dim;
        let mut out = CVector::zeros(v.len());
        for (r, a) in self.a_blocks.iter().enumerate() {
            let block = CVector::from_column_slice(&v.as_slice()[r * d..(r + 1) * d]);
            out.rows_mut(r * d, d).copy_from(&(a * block));
        }
        out
    }
}
