//! Complex Schur decomposition `A = Q T Q^H` by Householder reduction to
//! Hessenberg form followed by implicitly shifted single-shift QR.

use num_complex::Complex64 as C64;

use super::{CMatrix, CVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Schur {
    /// Unitary Schur vectors.
    pub q: CMatrix,
    /// Upper-triangular factor; eigenvalues on the diagonal.
    pub t: CMatrix,
}

fn givens(f: C64, g: C64) -> (f64, C64) {
    if g.norm() == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if f.norm() == 0.0 {
        return (0.0, g.conj() / g.norm());
    }
    let rho = f.norm().hypot(g.norm());
    let c = f.norm() / rho;
    let s = (f / f.norm()) * g.conj() / rho;
    (c, s)
}

fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let xnorm = (0..len)
            .map(|i| h[(k + 1 + i, k)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<C64> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for col in k..n {
            let s: C64 = (0..len).map(|i| v[i].conj() * h[(k + 1 + i, col)]).sum();
            let f = s * (2.0 / vnorm2);
            for i in 0..len {
                h[(k + 1 + i, col)] -= f * v[i];
            }
        }
        for row in 0..n {
            let s: C64 = (0..len).map(|i| h[(row, k + 1 + i)] * v[i]).sum();
            let f = s * (2.0 / vnorm2);
            for i in 0..len {
                h[(row, k + 1 + i)] -= f * v[i].conj();
            }
            let s: C64 = (0..len).map(|i| q[(row, k + 1 + i)] * v[i]).sum();
            let f = s * (2.0 / vnorm2);
            for i in 0..len {
                q[(row, k + 1 + i)] -= f * v[i].conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let e1 = mean + disc;
    let e2 = mean - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

impl Schur {
    pub fn new(a: &CMatrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.ncols(),
            });
        }
        if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        let (mut h, mut q) = hessenberg(a);
        if n <= 1 {
            return Ok(Schur { q, t: h });
        }
        let eps = f64::EPSILON;
        let scale = super::frobenius(&h).max(f64::MIN_POSITIVE);
        let tiny = f64::MIN_POSITIVE * n as f64 / eps;
        let mut hi = n - 1;
        let mut iter = 0usize;
        let mut total = 0usize;
        let max_total = 100 * n.max(10);
        while hi > 0 {
            let mut l = hi;
            while l > 0 {
                let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
                if s == 0.0 {
                    s = scale;
                }
                let sub = h[(l, l - 1)].norm();
                if sub <= eps * s || sub <= tiny {
                    h[(l, l - 1)] = C64::new(0.0, 0.0);
                    break;
                }
                l -= 1;
            }
            if l == hi {
                hi -= 1;
                iter = 0;
                continue;
            }
            iter += 1;
            total += 1;
            if total > max_total {
                return Err(Error::NoConvergence {
                    what: "complex Schur QR iteration",
                    iterations: total,
                });
            }
            let mu = if iter % 10 == 0 {
                h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
            } else {
                wilkinson_shift(
                    h[(hi - 1, hi - 1)],
                    h[(hi - 1, hi)],
                    h[(hi, hi - 1)],
                    h[(hi, hi)],
                )
            };
            let mut x = h[(l, l)] - mu;
            let mut y = h[(l + 1, l)];
            for k in l..hi {
                let (c, s) = givens(x, y);
                let col_start = if k > l { k - 1 } else { l };
                for j in col_start..n {
                    let t1 = h[(k, j)];
                    let t2 = h[(k + 1, j)];
                    h[(k, j)] = t1 * c + s * t2;
                    h[(k + 1, j)] = -s.conj() * t1 + t2 * c;
                }
                let row_end = (k + 2).min(hi);
                for i in 0..=row_end {
                    let t1 = h[(i, k)];
                    let t2 = h[(i, k + 1)];
                    h[(i, k)] = t1 * c + s.conj() * t2;
                    h[(i, k + 1)] = -s * t1 + t2 * c;
                }
                for i in 0..n {
                    let t1 = q[(i, k)];
                    let t2 = q[(i, k + 1)];
                    q[(i, k)] = t1 * c + s.conj() * t2;
                    q[(i, k + 1)] = -s * t1 + t2 * c;
                }
                if k > l {
                    h[(k + 1, k - 1)] = C64::new(0.0, 0.0);
                }
                if k + 1 < hi {
                    x = h[(k + 1, k)];
                    y = h[(k + 2, k)];
                }
            }
        }
        for j in 0..n {
            for i in j + 1..n {
                h[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        Ok(Schur { q, t: h })
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.nrows()).map(|i| self.t[(i, i)]).collect()
    }

    /// Unit eigenvector for the eigenvalue `T[k,k]`, by back substitution in
    /// the triangular factor. Reliable when that eigenvalue is simple.
    pub fn eigenvector(&self, k: usize) -> CVector {
        let n = self.t.nrows();
        let t = &self.t;
        let lambda = t[(k, k)];
        let smin = (f64::EPSILON * super::frobenius(t)).max(f64::MIN_POSITIVE);
        let mut y = CVector::zeros(n);
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: C64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = C64::new(smin, 0.0);
            }
            y[i] = -s / d;
        }
        let v = &self.q * y;
        let norm = v.norm();
        v / C64::from(norm)
    }
}

/// Eigenvalues of a square matrix.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<C64>> {
    Ok(Schur::new(a)?.eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, real_matrix};

    fn check(a: &CMatrix) {
        let s = Schur::new(a).unwrap();
        let n = a.nrows();
        let recon = &s.q * &s.t * s.q.adjoint();
        assert!(frobenius(&(recon - a)) <= 1e-12 * (1.0 + frobenius(a)));
        let qq = s.q.adjoint() * &s.q;
        assert!(frobenius(&(qq - CMatrix::identity(n, n))) < 1e-12);
        for j in 0..n {
            for i in j + 1..n {
                assert_eq!(s.t[(i, j)], C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn decomposes_rotation_and_companion() {
        let rot = real_matrix(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        check(&rot);
        let mut ev = eigenvalues(&rot).unwrap();
        ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((ev[0] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - C64::new(0.0, 1.0)).norm() < 1e-14);

        // Companion matrix of (x-1)(x-2)(x-3)(x-4).
        let comp = real_matrix(
            4,
            4,
            &[
                10.0, -35.0, 50.0, -24.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0,
            ],
        );
        check(&comp);
        let mut ev: Vec<f64> = eigenvalues(&comp).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (i, e) in ev.iter().enumerate() {
            assert!((e - (i + 1) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenvectors_satisfy_equation() {
        let a = real_matrix(3, 3, &[2.0, 1.0, 0.0, 0.5, -1.0, 3.0, 0.0, 1.0, 4.0]);
        let s = Schur::new(&a).unwrap();
        for k in 0..3 {
            let v = s.eigenvector(k);
            let r = &a * &v - &v * s.t[(k, k)];
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn handles_trivial_sizes() {
        check(&CMatrix::zeros(0, 0));
        check(&real_matrix(1, 1, &[5.0]));
        check(&CMatrix::zeros(4, 4));
    }
}
