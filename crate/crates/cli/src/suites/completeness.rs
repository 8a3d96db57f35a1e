use rootspan_core::random::{gaussian_matrix, seeded, SeededRng};
use rootspan_core::rootspace::{completeness_verdict_with, decompose, riesz_projection, VerdictOptions};
use rootspan_core::{ArcConfiguration, CMatrix, C64};

use super::{ctx, op};
use crate::config::SuiteConfig;
use crate::plot::spectrum_series;
use crate::report::{Inputs, Relation, Report};
use crate::{CliError, During};

/// `S J S^{-1}` for Jordan blocks `(eigenvalue, size)`.
fn jordan_conjugate(blocks: &[(C64, usize)], rng: &mut SeededRng) -> Result<CMatrix, CliError> {
    let n: usize = blocks.iter().map(|b| b.1).sum();
    let mut j = CMatrix::zeros(n, n);
    let mut at = 0;
    for &(l, size) in blocks {
        for k in 0..size {
            j[(at + k, at + k)] = l;
            if k + 1 < size {
                j[(at + k, at + k + 1)] = C64::new(1.0, 0.0);
            }
        }
        at += size;
    }
    let s = gaussian_matrix(n, n, rng) * C64::new(0.3, 0.0) + CMatrix::identity(n, n);
    let s_inv = s.clone().try_inverse().ok_or_else(|| CliError::Numeric {
        check: "jordan_example".into(),
        message: "conjugating matrix is singular".into(),
    })?;
    Ok(&s * j * s_inv)
}

fn examples() -> Vec<Vec<(C64, usize)>> {
    let c = |re: f64, im: f64| C64::new(re, im);
    vec![
        vec![(c(1.0, 1.0), 3), (c(-2.0, 0.5), 2), (c(2.0, -1.0), 1)],
        vec![(c(0.0, 0.0), 2), (c(3.0, 0.0), 1), (c(-1.0, 2.0), 1), (c(2.0, -2.0), 2)],
        vec![(c(1.0, 0.0), 3), (c(1.0, 0.0), 1), (c(-2.0, 1.0), 2), (c(4.0, 0.0), 1)],
    ]
}

pub fn run(cfg: &SuiteConfig) -> Result<Report, CliError> {
    let mut report = Report::new("completeness", cfg);
    let mut rng = seeded(cfg.seed);
    let trials = cfg.trials_or(20);
    let cluster_tol = cfg.tol("cluster");

    for k in 0..trials {
        let n = cfg.dimensions.pick(k);
        let a = gaussian_matrix(n, n, &mut rng);
        let inputs = Inputs::new("projections").matrix(&a);
        let d = decompose(&a, 1e-8).during("projections")?;
        let ps = d.projections().during("projections")?;
        let sum = ps.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p);
        let tag = format!("n={n},k={k}");
        report.check(
            format!("projection_sum[{tag}]"),
            &inputs,
            (sum - CMatrix::identity(n, n)).norm(),
            Relation::Le,
            cfg.tol("projection"),
            true,
        );
        let idempotence = ps
            .iter()
            .map(|p| (p * p - p).norm() / (1.0 + p.norm()))
            .fold(0.0, f64::max);
        report.check(
            format!("projection_idempotent[{tag}]"),
            &inputs,
            idempotence,
            Relation::Le,
            cfg.tol("projection"),
            true,
        );
    }

    let mut spectrum = Vec::new();
    for (e, blocks) in examples().iter().enumerate() {
        let a = jordan_conjugate(blocks, &mut rng)?;
        let inputs = Inputs::new("jordan_example").matrix(&a);
        let d = decompose(&a, cluster_tol).during("jordan_example")?;
        if e == 0 {
            spectrum = d.clusters().iter().map(|c| (c.eigenvalue, c.multiplicity)).collect();
        }
        report.check(
            format!("chain_residual[example={e}]"),
            &inputs,
            d.chain_residual(&a),
            Relation::Le,
            1e-8,
            false,
        );

        for &p in &cfg.p {
            let tag = format!("example={e},p={p}");
            let ao = op(a.clone(), p, "contour_projection")?;
            let ps = d.projections().during("contour_projection")?;
            let mut gap: f64 = 0.0;
            for (c, proj) in d.clusters().iter().zip(&ps) {
                let contour = riesz_projection(&ao, c.eigenvalue, 1.0, 512).during("contour_projection")?;
                gap = gap.max((contour - proj).norm());
            }
            report.check(
                format!("contour_vs_chain[{tag}]"),
                &inputs,
                gap,
                Relation::Le,
                cfg.tol("contour"),
                true,
            );

            // Enough arcs for the sector condition s > 2p.
            let s = (2.0 * p).floor() as usize + 3;
            let arcs = ArcConfiguration::equally_spaced(s, 0.3, ctx(p, "verdict")?).during("verdict")?;
            let options = VerdictOptions {
                tol: cluster_tol,
                ..VerdictOptions::at_infinity()
            };
            let full = completeness_verdict_with(&ao, &d, 0, &arcs, 16, cfg.seed, &options).during("verdict")?;
            report.check(
                format!("root_distance_full[{tag}]"),
                &inputs,
                full.max_relative_distance,
                Relation::Le,
                cfg.tol("root_distance"),
                true,
            );
            report.flag(format!("verdict_full[{tag}]"), &inputs, full.verdict, true);

            let truncated = d.truncate_chains(1);
            if truncated.is_complete() {
                continue;
            }
            let r = completeness_verdict_with(&ao, &truncated, 0, &arcs, 16, cfg.seed, &options)
                .during("verdict")?;
            report.check(
                format!("root_distance_truncated[{tag}]"),
                &inputs,
                r.max_relative_distance,
                Relation::Gt,
                cfg.tol("root_distance"),
                true,
            );
        }
    }
    report.add_series("spectrum", spectrum_series(&spectrum));
    Ok(report)
}
