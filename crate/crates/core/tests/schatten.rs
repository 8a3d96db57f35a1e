mod common;

use proptest::prelude::*;
use rootspan_core::geometry::{pairing, BiorthogonalSystem, ExponentContext};
use rootspan_core::linalg::{c64, schur, C64, CMatrix, CVector};
use rootspan_core::random::{gaussian_matrix, random_unitary, seeded};
use rootspan_core::schatten::{
    adjoint_norm_identity, approximation_numbers, basis_equivalence_check, norm_bounds,
    sigma_norm, sigma_p_norm, weyl_check, OperatorMatrix,
};

fn ctx(p: f64) -> ExponentContext {
    ExponentContext::new(p).unwrap()
}

fn op(m: CMatrix, p: f64) -> OperatorMatrix {
    OperatorMatrix::new(m, ctx(p)).unwrap()
}

/// `(Σ_{i,j} |<A e_j, f_i>|^p)^{1/p}` straight from the pairing.
fn sigma_by_pairings(a: &CMatrix, system: &BiorthogonalSystem, p: f64) -> f64 {
    let n = system.dimension();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let ae = a * system.primal(j);
            let v = pairing(ae.as_slice(), system.dual(i).as_slice()).unwrap();
            total += v.norm().powf(p);
        }
    }
    total.powf(1.0 / p)
}

/// Singular values from the eigenvalues of `A^H A`.
fn singular_values_via_gram(a: &CMatrix) -> Vec<f64> {
    let gram = a.adjoint() * a;
    let mut s: Vec<f64> = schur::eigenvalues(&gram)
        .unwrap()
        .iter()
        .map(|z| z.re.max(0.0).sqrt())
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

#[test]
fn sigma_two_in_canonical_system_is_frobenius() {
    let mut rng = seeded(1);
    for n in [2, 5, 9] {
        let a = gaussian_matrix(n, n, &mut rng);
        let sys = BiorthogonalSystem::canonical(n, ctx(2.0));
        let s = sigma_p_norm(&op(a.clone(), 2.0), &sys).unwrap();
        let frob: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((s - frob).abs() < 1e-12 * frob);
    }
}

#[test]
fn sigma_norm_matches_pairing_sums() {
    let mut rng = seeded(2);
    for p in [1.5, 2.0, 3.0] {
        let a = gaussian_matrix(4, 4, &mut rng);
        let e = gaussian_matrix(4, 4, &mut rng) + CMatrix::identity(4, 4) * c64(4.0, 0.0);
        let sys = BiorthogonalSystem::from_primal(e, ctx(p)).unwrap();
        let got = sigma_norm(&a, &sys, p).unwrap();
        let expect = sigma_by_pairings(&a, &sys, p);
        assert!((got - expect).abs() < 1e-10 * expect);
    }
}

#[test]
fn sigma_two_is_invariant_under_unitary_systems() {
    let mut rng = seeded(3);
    let a = gaussian_matrix(6, 6, &mut rng);
    let frob = a.norm();
    for _ in 0..5 {
        let u = random_unitary(6, &mut rng);
        let sys = BiorthogonalSystem::unitary_image(&u, ctx(2.0)).unwrap();
        let s = sigma_norm(&a, &sys, 2.0).unwrap();
        assert!((s - frob).abs() < 1e-10 * frob);
    }
}

#[test]
fn weyl_inequality_and_equality_on_normal_matrices() {
    let mut rng = seeded(4);
    for k in 0..60 {
        let n = [4, 6, 8][k % 3];
        let a = gaussian_matrix(n, n, &mut rng);
        let r = weyl_check(&op(a, 2.0)).unwrap();
        assert!(r.holds && r.lhs <= r.rhs + 1e-9, "{r:?}");

        let u = random_unitary(n, &mut rng);
        let d = CMatrix::from_diagonal(&rootspan_core::random::gaussian_vector(n, &mut rng));
        let normal = &u * d * u.adjoint();
        let r = weyl_check(&op(normal, 2.0)).unwrap();
        assert!((r.lhs - r.rhs).abs() <= 1e-9 * (1.0 + r.rhs), "{r:?}");
    }
}

#[test]
fn approximation_numbers_are_singular_values_at_p_two() {
    let mut rng = seeded(5);
    let a = gaussian_matrix(7, 7, &mut rng);
    let got = approximation_numbers(&op(a.clone(), 2.0), 7).unwrap();
    let expect = singular_values_via_gram(&a);
    for (b, s) in got.iter().zip(&expect) {
        assert!((b.lower - s).abs() < 1e-8 * expect[0]);
        assert!((b.upper - s).abs() < 1e-8 * expect[0]);
    }
}

#[test]
fn approximation_number_brackets_are_ordered_and_start_at_norm() {
    let mut rng = seeded(6);
    let a = gaussian_matrix(5, 5, &mut rng);
    let p = 3.0;
    let s = approximation_numbers(&op(a.clone(), p), 5).unwrap();
    let n = norm_bounds(&a, p);
    assert!((s[0].upper - n.upper).abs() < 1e-12 * n.upper);
    for w in s.windows(2) {
        assert!(w[1].upper <= w[0].upper + 1e-12);
    }
    for b in &s {
        assert!(b.lower <= b.upper);
    }
}

#[test]
fn norm_bounds_on_rank_one_matrices() {
    // ‖u v^T‖_{p→p} = ‖u‖_p ‖v‖_q.
    let u = CVector::from_vec(vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(0.5, 0.0)]);
    let v = CVector::from_vec(vec![c64(3.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0)]);
    let a = &u * v.transpose();
    for p in [1.5, 2.0, 3.0, 6.0] {
        let q = p / (p - 1.0);
        let pn = |w: &CVector, r: f64| w.iter().map(|z| z.norm().powf(r)).sum::<f64>().powf(1.0 / r);
        let exact = pn(&u, p) * pn(&v, q);
        let b = norm_bounds(&a, p);
        assert!(b.lower <= exact * (1.0 + 1e-12) && b.upper >= exact * (1.0 - 1e-12));
        assert!((b.lower - exact).abs() < 1e-8 * exact, "p={p}: {b:?} vs {exact}");
    }
}

#[test]
fn norm_bounds_enclose_sampled_ratios() {
    let mut rng = seeded(7);
    for p in [1.5, 3.0] {
        let a = gaussian_matrix(4, 4, &mut rng);
        let b = norm_bounds(&a, p);
        let sampled = common::sampled_lp_norm(&a, p, 3000, 1);
        assert!(b.upper >= sampled * (1.0 - 1e-12));
        assert!(b.lower >= 0.9 * sampled);
    }
}

#[test]
fn basis_equivalence_stays_within_transfer_bounds() {
    let mut rng = seeded(8);
    for p in [1.5, 2.0, 3.0] {
        let a = op(gaussian_matrix(4, 4, &mut rng), p);
        let e1 = gaussian_matrix(4, 4, &mut rng) + CMatrix::identity(4, 4) * c64(3.0, 0.0);
        let e2 = gaussian_matrix(4, 4, &mut rng) + CMatrix::identity(4, 4) * c64(3.0, 0.0);
        let s1 = BiorthogonalSystem::from_primal(e1, ctx(p)).unwrap();
        let s2 = BiorthogonalSystem::from_primal(e2, ctx(p)).unwrap();
        let r = basis_equivalence_check(&a, &s1, &s2, 9).unwrap();
        assert!(r.within_transfer_bounds, "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_norm_is_a_norm(a in common::matrix(3), b in common::matrix(3), t in common::complex(), p in 1.1f64..6.0) {
        let sys = BiorthogonalSystem::canonical(3, ctx(p));
        let na = sigma_norm(&a, &sys, p).unwrap();
        let nb = sigma_norm(&b, &sys, p).unwrap();
        let nab = sigma_norm(&(&a + &b), &sys, p).unwrap();
        prop_assert!(nab <= na + nb + 1e-12);
        let nt = sigma_norm(&(&a * t), &sys, p).unwrap();
        prop_assert!((nt - t.norm() * na).abs() <= 1e-10 * (1.0 + nt));
    }

    #[test]
    fn adjoint_norms_coincide(a in common::matrix(3), e in common::matrix(3), p in 1.2f64..5.0) {
        let e = e + CMatrix::identity(3, 3) * C64::new(5.0, 0.0);
        let sys = BiorthogonalSystem::from_primal(e, ctx(p)).unwrap();
        let r = adjoint_norm_identity(&op(a, p), &sys).unwrap();
        prop_assert!((r.primal - r.dual).abs() <= 1e-10 * (1.0 + r.primal));
    }

    #[test]
    fn weyl_holds_for_random_matrices(a in common::matrix(4)) {
        let r = weyl_check(&op(a, 2.0)).unwrap();
        prop_assert!(r.holds);
    }
}
