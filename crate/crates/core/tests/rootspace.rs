use rootspan_core::geometry::ExponentContext;
use rootspan_core::linalg::{c64, C64, CMatrix};
use rootspan_core::random::{gaussian_matrix, gaussian_vector, seeded, SeededRng};
use rootspan_core::resolvent::ArcConfiguration;
use rootspan_core::rootspace::{
    completeness_verdict, completeness_verdict_with, decompose, riesz_projection,
    root_span_distance, spectral_decomposition, VerdictOptions,
};
use rootspan_core::schatten::OperatorMatrix;
use rootspan_core::Error;

fn ctx(p: f64) -> ExponentContext {
    ExponentContext::new(p).unwrap()
}

fn op(m: CMatrix, p: f64) -> OperatorMatrix {
    OperatorMatrix::new(m, ctx(p)).unwrap()
}

/// `S J S^{-1}` with Jordan blocks `(eigenvalue, size)`.
fn jordan_conjugate(blocks: &[(C64, usize)], rng: &mut SeededRng) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.1).sum();
    let mut j = CMatrix::zeros(n, n);
    let mut at = 0;
    for &(l, size) in blocks {
        for k in 0..size {
            j[(at + k, at + k)] = l;
            if k + 1 < size {
                j[(at + k, at + k + 1)] = c64(1.0, 0.0);
            }
        }
        at += size;
    }
    let s = gaussian_matrix(n, n, rng) * c64(0.3, 0.0) + CMatrix::identity(n, n);
    &s * j * s.clone().try_inverse().unwrap()
}

#[test]
fn projections_resolve_the_identity_on_random_matrices() {
    let mut rng = seeded(1);
    for k in 0..100 {
        let n = 2 + k % 9;
        let a = gaussian_matrix(n, n, &mut rng);
        let d = decompose(&a, 1e-8).unwrap();
        let ps = d.projections().unwrap();
        let sum: CMatrix = ps.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p);
        assert!((sum - CMatrix::identity(n, n)).norm() <= 1e-8, "n={n}");
        for p in &ps {
            assert!((p * p - p).norm() <= 1e-8 * (1.0 + p.norm()));
        }
    }
}

#[test]
fn jordan_structure_is_recovered() {
    let mut rng = seeded(2);
    let blocks = [(c64(1.0, 0.0), 3), (c64(1.0, 0.0), 1), (c64(-2.0, 1.0), 2), (c64(4.0, 0.0), 1)];
    let a = jordan_conjugate(&blocks, &mut rng);
    // A 3-block spreads its computed eigenvalues by about ε^{1/3}.
    let d = decompose(&a, 1e-4).unwrap();
    assert_eq!(d.total_multiplicity(), 7);
    let mut found: Vec<(usize, Vec<usize>)> = d
        .clusters()
        .iter()
        .map(|c| {
            let mut l = c.chain_lengths();
            l.sort();
            (c.multiplicity, l)
        })
        .collect();
    found.sort();
    assert_eq!(found, vec![(1, vec![1]), (2, vec![2]), (4, vec![1, 3])]);
    let r = d.chain_residual(&a);
    assert!(r < 1e-10, "{r}");
}

#[test]
fn contour_and_chain_projections_agree() {
    let mut rng = seeded(3);
    let blocks = [(c64(0.0, 0.0), 2), (c64(3.0, 0.0), 1), (c64(-1.0, 2.0), 1), (c64(2.0, -2.0), 2)];
    let a = jordan_conjugate(&blocks, &mut rng);
    let d = decompose(&a, 1e-4).unwrap();
    let ps = d.projections().unwrap();
    let ao = op(a, 2.0);
    for (c, p) in d.clusters().iter().zip(&ps) {
        let contour = riesz_projection(&ao, c.eigenvalue, 1.0, 512).unwrap();
        assert!((contour - p).norm() <= 1e-7, "at {}", c.eigenvalue);
    }
}

#[test]
fn contour_too_close_to_an_eigenvalue_is_rejected() {
    let a = op(CMatrix::from_diagonal(&gaussian_vector(3, &mut seeded(4)).map(|_| c64(1.0, 0.0))), 2.0);
    let r = riesz_projection(&a, c64(0.0, 0.0), 1.0, 64);
    assert!(matches!(r, Err(Error::ContourTooClose { .. })));
}

#[test]
fn verdict_separates_full_and_truncated_root_systems() {
    let mut rng = seeded(5);
    let blocks = [(c64(1.0, 1.0), 3), (c64(-2.0, 0.5), 2), (c64(2.0, -1.0), 1)];
    let a = jordan_conjugate(&blocks, &mut rng);
    let ao = op(a.clone(), 2.0);
    let arcs = ArcConfiguration::equally_spaced(5, 0.3, ctx(2.0)).unwrap();
    let options = VerdictOptions::at_infinity();
    let full = completeness_verdict(&ao, 0, &arcs, 16, 9, &options).unwrap();
    assert!(full.max_relative_distance <= 1e-8, "{full:?}");
    assert!(full.verdict);

    let d = spectral_decomposition(&ao, options.tol).unwrap();
    let truncated = d.truncate_chains(1);
    assert!(!truncated.is_complete());
    let r = completeness_verdict_with(&ao, &truncated, 0, &arcs, 16, 9, &options).unwrap();
    assert!(r.max_relative_distance > 1e-3 && !r.verdict, "{r:?}");
}

#[test]
fn distance_grows_as_root_vectors_are_removed() {
    let mut rng = seeded(6);
    let a = gaussian_matrix(6, 6, &mut rng);
    let d = decompose(&a, 1e-8).unwrap();
    for _ in 0..10 {
        let u = gaussian_vector(6, &mut rng);
        let mut current = d.clone();
        let mut last = root_span_distance(&current, &u, ctx(2.0)).unwrap();
        assert!(last <= 1e-10 * u.norm());
        while !current.clusters().is_empty() {
            current = current.without_cluster(0);
            let next = root_span_distance(&current, &u, ctx(2.0)).unwrap();
            assert!(next >= last - 1e-12);
            last = next;
        }
        assert!((last - u.norm()).abs() < 1e-12 * u.norm());
    }
}

#[test]
fn lp_distance_is_bounded_by_the_euclidean_projection_residual() {
    let mut rng = seeded(7);
    let a = gaussian_matrix(6, 6, &mut rng);
    let d = decompose(&a, 1e-8).unwrap().without_cluster(0).without_cluster(0);
    for p in [1.5, 3.0] {
        let u = gaussian_vector(6, &mut rng);
        let best = root_span_distance(&d, &u, ctx(p)).unwrap();
        // Any particular combination, e.g. the ℓ_2 projection, is no closer.
        let w = d.root_vectors();
        let coeffs = (w.adjoint() * &w).lu().solve(&(w.adjoint() * &u)).unwrap();
        let r = &u - &w * coeffs;
        let lp = r.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p);
        assert!(best <= lp * (1.0 + 1e-9), "p={p}: {best} > {lp}");
    }
}
