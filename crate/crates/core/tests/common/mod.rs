#![allow(dead_code)]

use proptest::prelude::*;
use rootspan_core::linalg::{C64, CMatrix, CVector};

pub fn complex() -> impl Strategy<Value = C64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| C64::new(re, im))
}

pub fn matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec(complex(), n * n).prop_map(move |v| CMatrix::from_row_slice(n, n, &v))
}

pub fn vector(n: usize) -> impl Strategy<Value = CVector> {
    proptest::collection::vec(complex(), n).prop_map(|v| CVector::from_vec(v))
}

/// Naive `tr(M)`.
pub fn trace(m: &CMatrix) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Brute-force `max_{x ≠ 0} ‖Ax‖_p / ‖x‖_p` lower bound by dense sampling of
/// real sign/phase vectors; used only as an independent lower estimate.
pub fn sampled_lp_norm(a: &CMatrix, p: f64, samples: usize, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = a.ncols();
    let pn = |v: &CVector| v.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p);
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let x = CVector::from_fn(n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        best = best.max(pn(&(a * &x)) / pn(&x));
    }
    best
}
