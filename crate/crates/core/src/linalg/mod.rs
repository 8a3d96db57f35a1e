//! Dense complex linear-algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub mod quadrature;
pub mod schur;

pub use schur::Schur;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `ℓ_p` norm of a complex vector, scaled to avoid overflow.
pub fn vector_p_norm(v: &[C64], p: f64) -> f64 {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 || !max.is_finite() {
        return max;
    }
    let sum: f64 = v.iter().map(|z| (z.norm() / max).powf(p)).sum();
    max * sum.powf(1.0 / p)
}

/// Weighted norm `(Σ w_i |v_i|^p)^{1/p}`.
pub fn weighted_p_norm(v: &[C64], weights: &[f64], p: f64) -> f64 {
    debug_assert_eq!(v.len(), weights.len());
    let sum: f64 = v
        .iter()
        .zip(weights)
        .map(|(z, w)| w * z.norm().powf(p))
        .sum();
    sum.powf(1.0 / p)
}

/// Exact `ℓ_1 → ℓ_1` norm: largest column sum of moduli.
pub fn max_column_sum(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Exact `ℓ_∞ → ℓ_∞` norm: largest row sum of moduli.
pub fn max_row_sum(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Thin SVD with singular values in descending order.
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v_adjoint: CMatrix,
}

/// Thin SVD. The LAPACK-style bidiagonal routine is fast but occasionally
/// returns factors that do not reproduce `m` for rank-deficient complex input,
/// so its result is checked and replaced by one-sided Jacobi when it fails.
pub fn svd(m: &CMatrix) -> Svd {
    let scale = frobenius(m);
    let s = m.clone().svd(true, true);
    if let (Some(u), Some(v_adjoint)) = (s.u, s.v_t) {
        let singular_values: Vec<f64> = s.singular_values.iter().copied().collect();
        let candidate = Svd {
            u,
            singular_values,
            v_adjoint,
        };
        if candidate.reconstruction_error(m) <= SVD_CHECK_TOL * scale.max(f64::MIN_POSITIVE)
            && candidate.singular_values.iter().all(|v| v.is_finite())
        {
            return candidate;
        }
    }
    jacobi_svd(m)
}

const SVD_CHECK_TOL: f64 = 1e-11;

impl Svd {
    fn reconstruction_error(&self, m: &CMatrix) -> f64 {
        let mut us = self.u.clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        frobenius(&(us * &self.v_adjoint - m))
    }
}

/// One-sided (Hestenes) Jacobi SVD.
fn jacobi_svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = jacobi_svd(&m.adjoint());
        return Svd {
            u: t.v_adjoint.adjoint(),
            singular_values: t.singular_values,
            v_adjoint: t.u.adjoint(),
        };
    }
    let mut a = m.clone();
    let mut v = CMatrix::identity(cols, cols);
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let x = mat[(i, p)];
                        let y = mat[(i, q)] * phase.conj();
                        mat[(i, p)] = x * c - y * s;
                        mat[(i, q)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(usize, f64)> = (0..cols).map(|j| (j, a.column(j).norm())).collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1));
    let mut u = CMatrix::zeros(rows, cols);
    let mut v_sorted = CMatrix::zeros(cols, cols);
    let mut singular_values = Vec::with_capacity(cols);
    let smax = order.first().map(|o| o.1).unwrap_or(0.0);
    for (k, &(j, sigma)) in order.iter().enumerate() {
        singular_values.push(sigma);
        v_sorted.set_column(k, &v.column(j));
        if sigma > f64::EPSILON * smax && sigma > 0.0 {
            u.set_column(k, &(a.column(j) / C64::from(sigma)));
        }
    }
    // Complete columns belonging to zero singular values to an orthonormal set.
    for k in 0..cols {
        if u.column(k).norm() > 0.0 {
            continue;
        }
        for e in 0..rows {
            let mut w = CVector::zeros(rows);
            w[e] = C64::new(1.0, 0.0);
            for _ in 0..2 {
                for j in 0..cols {
                    if j != k && u.column(j).norm() > 0.0 {
                        let c = u.column(j).dotc(&w);
                        w -= u.column(j) * c;
                    }
                }
            }
            let nw = w.norm();
            if nw > 1e-8 {
                u.set_column(k, &(w / C64::from(nw)));
                break;
            }
        }
    }
    Svd {
        u,
        singular_values,
        v_adjoint: v_sorted.adjoint(),
    }
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    svd(m).singular_values
}

/// Largest singular value from the Hermitian eigenvalues of the smaller Gram
/// matrix. Squaring costs nothing in accuracy at the top of the spectrum.
/// Falls back to the checked SVD if the eigenvalues fail the trace identity.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = if m.nrows() >= m.ncols() {
        m.adjoint() * m
    } else {
        m * m.adjoint()
    };
    let frob2 = frobenius(m).powi(2);
    let eig = gram.symmetric_eigenvalues();
    let top = eig.iter().copied().fold(0.0, f64::max);
    let sum: f64 = eig.iter().sum();
    let r = gram.nrows() as f64;
    let consistent = top.is_finite()
        && (sum - frob2).abs() <= 1e-10 * frob2
        && top <= frob2 * (1.0 + 1e-12)
        && top * r >= frob2 * (1.0 - 1e-12);
    if consistent {
        top.sqrt()
    } else {
        singular_values(m).first().copied().unwrap_or(0.0)
    }
}

pub fn inverse(m: &CMatrix, context: &str) -> Result<CMatrix> {
    let inv = m.clone().lu().try_inverse().ok_or_else(|| Error::Singular {
        context: context.to_string(),
    })?;
    if inv.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular {
            context: context.to_string(),
        });
    }
    Ok(inv)
}

pub fn solve(m: &CMatrix, b: &CMatrix, context: &str) -> Result<CMatrix> {
    let x = m.clone().lu().solve(b).ok_or_else(|| Error::Singular {
        context: context.to_string(),
    })?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular {
            context: context.to_string(),
        });
    }
    Ok(x)
}

pub fn matrix_power(m: &CMatrix, k: u32) -> CMatrix {
    let mut result = CMatrix::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// `‖N^n‖_F / ‖N‖_F^n`; zero exactly for nilpotent matrices in exact arithmetic.
pub fn nilpotency_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let norm = frobenius(m);
    if norm == 0.0 {
        return 0.0;
    }
    let scaled = m / C64::from(norm);
    frobenius(&matrix_power(&scaled, n as u32))
}

/// Orthonormal basis of the column space, dropping directions whose singular
/// value falls below `rel_tol · σ_max`.
pub fn orthonormal_columns(m: &CMatrix, rel_tol: f64) -> CMatrix {
    if m.ncols() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let s = svd(m);
    let smax = s.singular_values.first().copied().unwrap_or(0.0);
    let keep = s
        .singular_values
        .iter()
        .take_while(|&&v| v > rel_tol * smax && v > 0.0)
        .count();
    s.u.columns(0, keep).into_owned()
}

/// The `k` right singular vectors belonging to the smallest singular values of
/// a square matrix, as columns.
pub fn smallest_right_singular_vectors(m: &CMatrix, k: usize) -> CMatrix {
    let n = m.ncols();
    let s = svd(m);
    let v = s.v_adjoint.adjoint();
    v.columns(n - k, k).into_owned()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn column_vec(v: &CVector) -> Vec<C64> {
    v.iter().copied().collect()
}

pub fn to_cvector(v: &[C64]) -> CVector {
    DVector::from_column_slice(v)
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    DMatrix::from_row_slice(rows, cols, data).map(C64::from)
}

/// Least-squares line through `(x_i, y_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    LineFit {
        slope,
        intercept,
        r_squared,
    }
}

/// `n` points log-spaced from `a` to `b` inclusive.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Principal complex power `z^s` for real `s`.
pub fn complex_powf(z: C64, s: f64) -> C64 {
    if z == C64::new(0.0, 0.0) {
        return z;
    }
    C64::from_polar(z.norm().powf(s), z.arg() * s)
}

/// Duality map: the unit `ℓ_q` vector `z` with `Σ conj(z_i) y_i = ‖y‖_p`.
pub fn duality_vector(y: &CVector, p: f64) -> CVector {
    let norm = vector_p_norm(y.as_slice(), p);
    if norm == 0.0 {
        return CVector::zeros(y.len());
    }
    y.map(|v| {
        let r = v.norm();
        if r == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            (v / r) * (r / norm).powf(p - 1.0)
        }
    })
}

/// Local ascent for `max ‖Ax‖_p / ‖x‖_p` (complex p-norm power method).
/// Returns the best ratio seen together with its unit maximizer.
pub fn lp_norm_ascent(a: &CMatrix, p: f64, start: &CVector, iterations: usize) -> (f64, CVector) {
    let q = p / (p - 1.0);
    let start_norm = vector_p_norm(start.as_slice(), p);
    if start_norm == 0.0 {
        return (0.0, start.clone());
    }
    let mut x = start / C64::from(start_norm);
    let mut best = vector_p_norm((a * &x).as_slice(), p);
    let adj = a.adjoint();
    for _ in 0..iterations {
        let y = a * &x;
        let z = &adj * duality_vector(&y, p);
        if z.iter().all(|v| v.norm() == 0.0) {
            break;
        }
        let next = duality_vector(&z, q);
        let value = vector_p_norm((a * &next).as_slice(), p);
        if value <= best * (1.0 + 1e-13) {
            if value > best {
                best = value;
                x = next;
            }
            break;
        }
        best = value;
        x = next;
    }
    (best, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{gaussian_matrix, seeded};

    #[test]
    fn spectral_norm_matches_largest_singular_value() {
        let mut rng = crate::random::seeded(12);
        for (r, c) in [(5, 5), (7, 3), (3, 7), (1, 4)] {
            let m = crate::random::gaussian_matrix(r, c, &mut rng);
            let s = jacobi_svd(&m).singular_values[0];
            assert!((spectral_norm(&m) - s).abs() <= 1e-13 * s);
        }
        assert_eq!(spectral_norm(&CMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn jacobi_svd_factors_rank_deficient_and_wide_matrices() {
        let mut rng = seeded(3);
        for (rows, rank, cols) in [(4, 1, 2), (5, 2, 5), (3, 3, 6), (6, 2, 4)] {
            let m = gaussian_matrix(rows, rank, &mut rng) * gaussian_matrix(rank, cols, &mut rng);
            let s = jacobi_svd(&m);
            let k = rows.min(cols);
            assert_eq!(s.u.shape(), (rows, k));
            assert_eq!(s.v_adjoint.shape(), (k, cols));
            assert!(s.reconstruction_error(&m) < 1e-12 * frobenius(&m));
            assert!((s.u.adjoint() * &s.u - CMatrix::identity(k, k)).norm() < 1e-12);
            assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
            assert_eq!(s.singular_values.iter().filter(|&&v| v > 1e-10).count(), rank);
        }
    }

    #[test]
    fn p_norm_of_simple_vector() {
        let v = [c64(3.0, 0.0), c64(0.0, 4.0)];
        assert!((vector_p_norm(&v, 2.0) - 5.0).abs() < 1e-14);
        assert!((vector_p_norm(&v, 1.0) - 7.0).abs() < 1e-14);
        assert_eq!(vector_p_norm(&[], 2.0), 0.0);
    }

    #[test]
    fn matrix_power_matches_repeated_product() {
        let m = real_matrix(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let p3 = &m * &m * &m;
        assert!(frobenius(&(matrix_power(&m, 3) - p3)) < 1e-12);
        assert_eq!(matrix_power(&m, 0), identity(2));
    }

    #[test]
    fn nilpotent_residual_vanishes_on_jordan_block() {
        let j = real_matrix(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(nilpotency_residual(&j), 0.0);
        assert!(nilpotency_residual(&identity(3)) > 0.1);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let fit = fit_line(&xs, &ys);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept + 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }
}
