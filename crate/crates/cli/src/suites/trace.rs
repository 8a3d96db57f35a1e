use rootspan_core::random::{gaussian_matrix, gaussian_vector, random_unitary, seeded, strictly_upper};
use rootspan_core::trace::{
    quasinilpotent_trace, spectral_trace_check, trace_holder_check, trace_symmetry_check,
};
use rootspan_core::{AnalyticFunctionSpec, BiorthogonalSystem, CMatrix, C64};

use super::{ctx, op, shifted};
use crate::config::SuiteConfig;
use crate::report::{Inputs, Relation, Report};
use crate::{CliError, During};

fn random_polynomial(rng: &mut rootspan_core::random::SeededRng, degree: usize) -> Result<AnalyticFunctionSpec, CliError> {
    let coeffs: Vec<C64> = gaussian_vector(degree + 1, rng).iter().copied().collect();
    AnalyticFunctionSpec::new(coeffs).during("spectral_trace")
}

pub fn run(cfg: &SuiteConfig) -> Result<Report, CliError> {
    let mut report = Report::new("trace", cfg);
    let mut rng = seeded(cfg.seed);
    let trials = cfg.trials_or(20);
    for &p in &cfg.p {
        for k in 0..trials {
            let n = cfg.dimensions.pick(k);
            let tag = format!("p={p},n={n},k={k}");
            let a = gaussian_matrix(n, n, &mut rng);
            let b = gaussian_matrix(n, n, &mut rng);
            let e = shifted(gaussian_matrix(n, n, &mut rng));
            let sys = BiorthogonalSystem::from_primal(e.clone(), ctx(p, "trace")?).during("trace")?;
            let inputs = Inputs::new("trace").real(p).matrix(&a).matrix(&b).matrix(&e);
            let (ao, bo) = (op(a, p, "trace")?, op(b, p, "trace")?);

            let sym = trace_symmetry_check(&ao, &bo, &sys).during("trace_symmetry")?;
            report.check(
                format!("trace_symmetry[{tag}]"),
                &inputs,
                sym.delta,
                Relation::Le,
                cfg.tol("symmetry"),
                true,
            );
            let h = trace_holder_check(&ao, &bo, &sys).during("trace_holder")?;
            report.check(format!("trace_holder[{tag}]"), &inputs, h.lhs, Relation::Le, h.rhs * (1.0 + 1e-12), true);

            // Diagonalizable with prescribed eigenvalues.
            let d = gaussian_vector(n, &mut rng);
            let v = shifted(gaussian_matrix(n, n, &mut rng));
            let v_inv = v.clone().try_inverse().ok_or_else(|| CliError::Numeric {
                check: "spectral_trace".into(),
                message: "eigenvector matrix is singular".into(),
            })?;
            let m = &v * CMatrix::from_diagonal(&d) * v_inv;
            let f = random_polynomial(&mut rng, 1 + k % 4)?;
            let g = random_polynomial(&mut rng, 4 - k % 4)?;
            let expect: C64 = d.iter().map(|&l| f.eval(l) * g.eval(l)).sum();
            let r = spectral_trace_check(&op(m.clone(), p, "spectral_trace")?, &f, &g, &sys)
                .during("spectral_trace")?;
            let st_inputs = Inputs::new("spectral_trace").real(p).matrix(&m).matrix(&e);
            report.check(
                format!("spectral_trace[{tag}]"),
                &st_inputs,
                r.delta / (1.0 + r.eigen_side.norm()),
                Relation::Le,
                cfg.tol("spectral_trace"),
                true,
            );
            report.check(
                format!("spectral_trace_prescribed[{tag}]"),
                &st_inputs,
                (r.trace_side - expect).norm() / (1.0 + expect.norm()),
                Relation::Le,
                cfg.tol("spectral_trace"),
                true,
            );

            let nn = n.max(2);
            let base = strictly_upper(nn, &mut rng);
            let u = random_unitary(nn, &mut rng);
            let canonical = BiorthogonalSystem::canonical(nn, ctx(p, "nilpotent_trace")?);
            for (label, nmat) in [("triangular", base.clone()), ("conjugated", &u * &base * u.adjoint())] {
                let t = quasinilpotent_trace(&op(nmat.clone(), p, "nilpotent_trace")?, &canonical)
                    .during("nilpotent_trace")?;
                report.check(
                    format!("nilpotent_trace_{label}[{tag}]"),
                    &Inputs::new("nilpotent_trace").real(p).matrix(&nmat),
                    t.norm(),
                    Relation::Le,
                    cfg.tol("nilpotent_trace"),
                    true,
                );
            }
        }
    }
    Ok(report)
}
