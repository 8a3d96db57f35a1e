mod common;

use proptest::prelude::*;
use rootspan_core::geometry::{BiorthogonalSystem, ExponentContext};
use rootspan_core::linalg::{c64, C64, CMatrix, CVector};
use rootspan_core::random::{gaussian_matrix, gaussian_vector, random_unitary, seeded, strictly_upper};
use rootspan_core::schatten::OperatorMatrix;
use rootspan_core::trace::{
    quasi_nilpotency, quasinilpotent_trace, require_quasi_nilpotent, spectral_trace_check,
    trace_holder_check, trace_pair, trace_symmetry_check, AnalyticFunctionSpec,
};
use rootspan_core::Error;

fn ctx(p: f64) -> ExponentContext {
    ExponentContext::new(p).unwrap()
}

fn op(m: CMatrix, p: f64) -> OperatorMatrix {
    OperatorMatrix::new(m, ctx(p)).unwrap()
}

fn system(n: usize, p: f64, seed: u64) -> BiorthogonalSystem {
    let mut rng = seeded(seed);
    let e = gaussian_matrix(n, n, &mut rng) + CMatrix::identity(n, n) * c64(3.0, 0.0);
    BiorthogonalSystem::from_primal(e, ctx(p)).unwrap()
}

#[test]
fn trace_pair_is_the_matrix_trace_of_the_product() {
    let mut rng = seeded(1);
    for n in [2, 4, 7] {
        let a = gaussian_matrix(n, n, &mut rng);
        let b = gaussian_matrix(n, n, &mut rng);
        let expect = common::trace(&(&b * &a));
        for s in [BiorthogonalSystem::canonical(n, ctx(3.0)), system(n, 3.0, n as u64)] {
            let got = trace_pair(&op(a.clone(), 3.0), &op(b.clone(), 3.0), &s).unwrap();
            assert!((got - expect).norm() < 1e-10 * (1.0 + expect.norm()));
        }
    }
}

#[test]
fn symmetry_and_holder_on_random_pairs() {
    let mut rng = seeded(2);
    for k in 0..200 {
        let n = 2 + k % 6;
        let a = op(gaussian_matrix(n, n, &mut rng), 3.0);
        let b = op(gaussian_matrix(n, n, &mut rng), 3.0);
        let s = system(n, 3.0, 1000 + k as u64);
        let sym = trace_symmetry_check(&a, &b, &s).unwrap();
        assert!(sym.delta <= 1e-10, "{sym:?}");
        let h = trace_holder_check(&a, &b, &s).unwrap();
        assert!(h.holds, "{h:?}");
    }
}

#[test]
fn spectral_trace_matches_known_eigenvalues() {
    let mut rng = seeded(3);
    let f = AnalyticFunctionSpec::new(vec![c64(1.0, 0.0), c64(0.0, 0.5), c64(-0.25, 0.0)]).unwrap();
    let g = AnalyticFunctionSpec::new(vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.1, 0.0)]).unwrap();
    for _ in 0..20 {
        let d = gaussian_vector(8, &mut rng);
        let v = gaussian_matrix(8, 8, &mut rng) + CMatrix::identity(8, 8) * c64(4.0, 0.0);
        let vinv = v.clone().try_inverse().unwrap();
        let a = &v * CMatrix::from_diagonal(&d) * vinv;
        // Oracle from the prescribed eigenvalues, not from an eigensolver.
        let expect: C64 = d.iter().map(|&l| f.eval(l) * g.eval(l)).sum();
        let r = spectral_trace_check(&op(a, 2.0), &f, &g, &system(8, 2.0, 5)).unwrap();
        assert!((r.trace_side - expect).norm() <= 1e-8 * (1.0 + expect.norm()), "{r:?}");
        assert!(r.holds);
    }
}

#[test]
fn quasinilpotent_trace_vanishes_on_triangular_and_conjugated() {
    let mut rng = seeded(4);
    for k in 0..100 {
        let n = 3 + k % 6;
        let base = strictly_upper(n, &mut rng);
        let u = random_unitary(n, &mut rng);
        for nmat in [base.clone(), &u * &base * u.adjoint()] {
            let sys = BiorthogonalSystem::canonical(n, ctx(2.0));
            let t = quasinilpotent_trace(&op(nmat, 2.0), &sys).unwrap();
            assert!(t.norm() <= 1e-10, "{t}");
        }
    }
}

#[test]
fn non_nilpotent_input_is_rejected() {
    let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]));
    let q = quasi_nilpotency(&a).unwrap();
    assert!(!q.accepted && (q.spectral_radius - 1.0).abs() < 1e-12);
    assert!(matches!(require_quasi_nilpotent(&a), Err(Error::NotQuasiNilpotent { .. })));
}

#[test]
fn jordan_block_is_accepted_by_nilpotency_residual() {
    let n = 8;
    let j = CMatrix::from_fn(n, n, |r, c| if c == r + 1 { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
    let q = quasi_nilpotency(&j).unwrap();
    assert!(q.accepted && q.residual == 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_is_bilinear(a in common::matrix(3), a2 in common::matrix(3), b in common::matrix(3), t in common::complex()) {
        let s = system(3, 2.5, 9);
        let tr = |x: &CMatrix, y: &CMatrix| trace_pair(&op(x.clone(), 2.5), &op(y.clone(), 2.5), &s).unwrap();
        let lhs = tr(&(&a + &a2 * t), &b);
        let rhs = tr(&a, &b) + tr(&a2, &b) * t;
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn trace_is_basis_independent(a in common::matrix(4), b in common::matrix(4), seed in 0u64..1000) {
        let canonical = BiorthogonalSystem::canonical(4, ctx(2.0));
        let other = system(4, 2.0, seed);
        let x = trace_pair(&op(a.clone(), 2.0), &op(b.clone(), 2.0), &canonical).unwrap();
        let y = trace_pair(&op(a, 2.0), &op(b, 2.0), &other).unwrap();
        prop_assert!((x - y).norm() <= 1e-9 * (1.0 + x.norm()));
    }
}
