use rootspan_core::random::{gaussian_matrix, gaussian_vector, random_unitary, seeded};
use rootspan_core::schatten::{
    adjoint_norm_identity, approximation_numbers, basis_equivalence_check, norm_bounds, sigma_norm,
    weyl_check,
};
use rootspan_core::{BiorthogonalSystem, CMatrix};

use super::{ctx, op, shifted};
use crate::config::SuiteConfig;
use crate::report::{Inputs, Relation, Report};
use crate::{CliError, During};

pub fn run(cfg: &SuiteConfig) -> Result<Report, CliError> {
    let mut report = Report::new("schatten", cfg);
    let mut rng = seeded(cfg.seed);
    let trials = cfg.trials_or(20);
    for &p in &cfg.p {
        let hilbert = p == 2.0;
        for k in 0..trials {
            let n = cfg.dimensions.pick(k);
            let a = gaussian_matrix(n, n, &mut rng);
            let tag = format!("p={p},n={n},k={k}");
            let inputs = Inputs::new("schatten").real(p).matrix(&a);

            // Σ|λ|^p ≤ Σ s^p is guaranteed for singular values, i.e. at p = 2.
            let w = weyl_check(&op(a.clone(), p, "weyl")?).during("weyl")?;
            let tol = cfg.tol("weyl");
            report.check(format!("weyl[{tag}]"), &inputs, w.lhs, Relation::Le, w.rhs + tol, hilbert);

            if hilbert {
                let u = random_unitary(n, &mut rng);
                let d = CMatrix::from_diagonal(&gaussian_vector(n, &mut rng));
                let normal = &u * d * u.adjoint();
                let w = weyl_check(&op(normal.clone(), p, "weyl_equality")?).during("weyl_equality")?;
                report.check(
                    format!("weyl_equality[{tag}]"),
                    &Inputs::new("weyl_equality").matrix(&normal),
                    (w.lhs - w.rhs).abs() / (1.0 + w.rhs),
                    Relation::Le,
                    tol,
                    true,
                );

                let v = random_unitary(n, &mut rng);
                let sys = BiorthogonalSystem::unitary_image(&v, ctx(p, "unitary")?).during("unitary")?;
                let s = sigma_norm(&a, &sys, p).during("unitary")?;
                report.check(
                    format!("unitary_invariance[{tag}]"),
                    &inputs.clone().matrix(&v),
                    (s - a.norm()).abs() / a.norm(),
                    Relation::Le,
                    cfg.tol("unitary"),
                    true,
                );
            }

            let b = norm_bounds(&a, p);
            report.check(
                format!("norm_bracket[{tag}]"),
                &inputs,
                b.lower,
                Relation::Le,
                b.upper * (1.0 + 1e-12),
                true,
            );

            let s = approximation_numbers(&op(a.clone(), p, "approximation_numbers")?, n)
                .during("approximation_numbers")?;
            let monotone = s.windows(2).all(|w| w[1].upper <= w[0].upper * (1.0 + 1e-12) + 1e-300);
            report.flag(format!("approximation_numbers_monotone[{tag}]"), &inputs, monotone, true);

            let e = shifted(gaussian_matrix(n, n, &mut rng));
            let sys = BiorthogonalSystem::from_primal(e.clone(), ctx(p, "adjoint")?).during("adjoint")?;
            let adj = adjoint_norm_identity(&op(a.clone(), p, "adjoint")?, &sys).during("adjoint")?;
            report.check(
                format!("adjoint_norms[{tag}]"),
                &inputs.clone().matrix(&e),
                (adj.primal - adj.dual).abs() / (1.0 + adj.primal),
                Relation::Le,
                cfg.tol("adjoint"),
                true,
            );

            let e2 = shifted(gaussian_matrix(n, n, &mut rng));
            let sys2 = BiorthogonalSystem::from_primal(e2.clone(), ctx(p, "basis_equivalence")?)
                .during("basis_equivalence")?;
            let eq = basis_equivalence_check(&op(a.clone(), p, "basis_equivalence")?, &sys, &sys2, cfg.seed + k as u64)
                .during("basis_equivalence")?;
            let eq_inputs = inputs.clone().matrix(&e).matrix(&e2);
            report.check(
                format!("basis_transfer[{tag}]"),
                &eq_inputs,
                eq.ratio,
                Relation::Le,
                eq.ratio_bound * (1.0 + 1e-9),
                true,
            );
            report.check(
                format!("basis_transfer_inverse[{tag}]"),
                &eq_inputs,
                1.0 / eq.ratio,
                Relation::Le,
                eq.inverse_ratio_bound * (1.0 + 1e-9),
                true,
            );
            report.check(
                format!("basis_b_bracket[{tag}]"),
                &eq_inputs,
                eq.ratio.max(1.0 / eq.ratio),
                Relation::Le,
                eq.b_constant_product * (1.0 + 1e-9),
                false,
            );
        }
    }
    Ok(report)
}
