use std::f64::consts::PI;

use rand::Rng;
use rootspan_core::linalg::{log_space, schur};
use rootspan_core::random::{gaussian_matrix, seeded};
use rootspan_core::resolvent::{carleman_report, ray_scan, regularized_determinant, sector_condition_check};
use rootspan_core::{ArcConfiguration, BiorthogonalSystem, CMatrix, CVector, C64};

use super::{ctx, op, shifted};
use crate::config::SuiteConfig;
use crate::plot::rayscan_series;
use crate::report::{Inputs, Relation, Report};
use crate::{CliError, During};

fn diag(values: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(values))
}

/// Invertible, simple zero and 2×2 Jordan block at zero, with their orders at zero.
fn decay_matrices() -> [(&'static str, CMatrix, f64); 3] {
    let c = |re: f64, im: f64| C64::new(re, im);
    let mut jordan = diag(&[c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
    jordan[(0, 1)] = c(1.0, 0.0);
    [
        ("invertible", diag(&[c(1.0, 0.0), c(2.0, 1.0), c(-1.5, 0.0)]), 0.0),
        ("simple_zero", diag(&[c(0.0, 0.0), c(2.0, 1.0), c(-1.5, 0.0)]), 1.0),
        ("jordan_zero", jordan, 2.0),
    ]
}

pub fn run(cfg: &SuiteConfig) -> Result<Report, CliError> {
    let mut report = Report::new("resolvent", cfg);
    let mut rng = seeded(cfg.seed);
    let trials = cfg.trials_or(10);
    let radii = log_space(1.0, 1000.0, 10);
    for &p in &cfg.p {
        let context = ctx(p, "carleman")?;
        for k in 0..trials {
            let n = cfg.dimensions.pick(k);
            let tag = format!("p={p},n={n},k={k}");
            let a = gaussian_matrix(n, n, &mut rng);
            let spectrum = schur::eigenvalues(&a).during("carleman")?;
            let ao = op(a.clone(), p, "carleman")?;
            let sys = BiorthogonalSystem::canonical(n, context);
            for (j, &r) in radii.iter().enumerate() {
                let lambda = C64::from_polar(r, rng.random_range(-PI..PI));
                if spectrum.iter().any(|&m| (m - lambda).norm() < 0.1) {
                    continue;
                }
                let rep = carleman_report(&ao, &sys, lambda).during("carleman")?;
                // Asserted only where the bound is a requirement (Hilbert, canonical).
                report.check(
                    format!("carleman[{tag},r#{j}]"),
                    &Inputs::new("carleman").real(p).matrix(&a).complex(lambda),
                    rep.lhs.upper,
                    Relation::Le,
                    rep.rhs,
                    rep.asserted,
                );
            }

            let s = shifted(gaussian_matrix(n, n, &mut rng));
            let s_inv = s.clone().try_inverse().ok_or_else(|| CliError::Numeric {
                check: "determinant_similarity".into(),
                message: "similarity transform is singular".into(),
            })?;
            let b = &s * &a * s_inv;
            let lambda = C64::from_polar(5.0, 0.7);
            let x = regularized_determinant(&ao, lambda).during("determinant_similarity")?;
            let y = regularized_determinant(&op(b, p, "determinant_similarity")?, lambda)
                .during("determinant_similarity")?;
            report.check(
                format!("determinant_similarity[{tag}]"),
                &Inputs::new("determinant_similarity").real(p).matrix(&a).matrix(&s),
                (x - y).norm() / x.norm().max(f64::MIN_POSITIVE),
                Relation::Le,
                cfg.tol("determinant"),
                true,
            );
        }

        for (label, m, expect) in decay_matrices() {
            let scan = ray_scan(&op(m.clone(), p, "decay_order")?, 0.9, 1e-5, 10.0, 36).during("decay_order")?;
            report.check(
                format!("decay_order_{label}[p={p}]"),
                &Inputs::new("decay_order").real(p).matrix(&m),
                (scan.fitted_order() - expect).abs(),
                Relation::Le,
                cfg.tol("decay_order"),
                true,
            );
        }

        let mut mismatches = 0usize;
        for s in 1..=64 {
            let arcs = ArcConfiguration::equally_spaced(s, 0.0, ctx(p, "sector")?).during("sector")?;
            if sector_condition_check(&arcs).holds != (s as f64 > 2.0 * p) {
                mismatches += 1;
            }
        }
        report.check(
            format!("sector_closed_form[p={p}]"),
            &Inputs::new("sector").real(p),
            mismatches as f64,
            Relation::Le,
            0.0,
            true,
        );
    }

    let (_, jordan, _) = decay_matrices().into_iter().last().expect("three matrices");
    let scan = ray_scan(&op(jordan, cfg.p[0], "rayscan")?, 0.9, 1e-3, 1e3, 25).during("rayscan")?;
    let lower: Vec<f64> = scan.norms.iter().map(|b| b.lower).collect();
    let upper: Vec<f64> = scan.norms.iter().map(|b| b.upper).collect();
    report.add_series("rayscan", rayscan_series(&scan.radii, &lower, &upper));
    Ok(report)
}
