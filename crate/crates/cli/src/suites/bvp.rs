use std::f64::consts::PI;

use rootspan_core::bvp::embedding::fit_middle_third;
use rootspan_core::bvp::{
    bvp_spectral_report, chain_rule_check, coercive_estimate_report, condition1_check, discretize,
    embedding_snumbers, BvpProblem, BvpSpectralReport, Condition1Params, DiscretizedOperator,
    EmbeddingParams, SpectralParams,
};
use rootspan_core::linalg::log_space;
use rootspan_core::{ArcConfiguration, C64};
use serde_json::json;

use super::ctx;
use crate::config::SuiteConfig;
use crate::plot::{snumbers_series, spectrum_series};
use crate::report::{Inputs, Relation, Report};
use crate::{CliError, During};

/// Test polynomials for the chain rule, as monomial coefficients.
const CHAIN_RULE_POLYNOMIALS: [&[f64]; 3] = [&[0.0, 0.0, 1.0], &[1.0, -1.0, 0.5, 2.0, -0.75], &[0.0, 1.0]];

fn problem_inputs(problem: &BvpProblem, n: usize) -> Inputs {
    let text = serde_json::to_string(problem).expect("problem serializes");
    Inputs::new(&text).int(n as u64)
}

fn spectral(problem: &BvpProblem, cfg: &SuiteConfig, n: usize) -> Result<(DiscretizedOperator, BvpSpectralReport), CliError> {
    let op = discretize(problem, n).during("discretize")?;
    let context = ctx(problem.p, "bvp_spectral")?;
    let arcs = ArcConfiguration::equally_spaced(cfg.bvp.arcs, cfg.bvp.arc_offset, context).during("bvp_spectral")?;
    let rep = bvp_spectral_report(&op, &arcs, &SpectralParams::default()).during("bvp_spectral")?;
    Ok((op, rep))
}

/// Smallest eigenvalue of the three-point Dirichlet stencil for `−u'' + c u`.
fn stencil_first_eigenvalue(n: usize, c: f64) -> f64 {
    let m = (n + 1) as f64;
    4.0 * m * m * (PI / (2.0 * m)).sin().powi(2) + c
}

fn spectrum_points(rep: &BvpSpectralReport) -> Vec<(C64, usize)> {
    rep.spectrum.iter().map(|s| (s.value, s.multiplicity)).collect()
}

/// Records shared by the suite and single-grid runs.
fn record_grid(report: &mut Report, cfg: &SuiteConfig, problem: &BvpProblem, n: usize, rep: &BvpSpectralReport) {
    let inputs = problem_inputs(problem, n);
    report.check(
        format!("root_distance[n={n}]"),
        &inputs,
        rep.max_root_distance,
        Relation::Le,
        cfg.tol("root_distance"),
        true,
    );
    report.flag(format!("completeness_verdict[n={n}]"), &inputs, rep.completeness.verdict, false);
    if cfg.bvp.is_scalar_model() {
        let stencil = stencil_first_eigenvalue(n, cfg.bvp.c);
        let first = rep.eigenvalues[0];
        report.check(
            format!("stencil_eigenvalue[n={n}]"),
            &inputs,
            (first - stencil).norm() / (1.0 + stencil.abs()),
            Relation::Le,
            1e-9,
            true,
        );
    }
}

fn record_coercive(report: &mut Report, cfg: &SuiteConfig, problem: &BvpProblem, n: usize, asserted: bool) -> Result<(), CliError> {
    let op = discretize(problem, n).during("coercive")?;
    let lambdas: Vec<C64> = log_space(1.0, cfg.bvp.lambda_max, cfg.bvp.lambda_points)
        .into_iter()
        .map(C64::from)
        .collect();
    let r = coercive_estimate_report(&op, &lambdas, cfg.seed).during("coercive")?;
    let inputs = problem_inputs(problem, n).real(cfg.bvp.lambda_max).int(cfg.bvp.lambda_points as u64);
    report.check(
        format!("coercive_stability[n={n}]"),
        &inputs,
        r.stability - 1.0,
        Relation::Le,
        cfg.tol("coercive"),
        asserted,
    );
    Ok(())
}

fn record_condition(report: &mut Report, problem: &BvpProblem) -> Result<(), CliError> {
    let r = condition1_check(problem, &Condition1Params::default()).during("condition")?;
    let inputs = problem_inputs(problem, 0);
    report.flag("condition_all_hold", &inputs, r.all_hold, false);
    report.check("condition_r_bound", &inputs, r.r_bound, Relation::Le, 2.0, false);
    Ok(())
}

pub fn run(cfg: &SuiteConfig) -> Result<Report, CliError> {
    let mut report = Report::new("bvp", cfg);
    let problem = cfg.bvp.problem();
    let exact = (PI * PI) + cfg.bvp.c;
    let mut errors = Vec::new();
    let mut finest = None;
    for &n in &cfg.bvp.grids {
        let (_, rep) = spectral(&problem, cfg, n)?;
        record_grid(&mut report, cfg, &problem, n, &rep);
        errors.push((n, (rep.eigenvalues[0].re - exact).abs()));
        finest = Some(rep);
    }
    if cfg.bvp.is_scalar_model() {
        for w in errors.windows(2) {
            let ((n0, e0), (n1, e1)) = (w[0], w[1]);
            // Error ~ h², h = 1/(n+1).
            let order = (e0 / e1).ln() / ((n1 as f64 + 1.0) / (n0 as f64 + 1.0)).ln();
            report.check(
                format!("convergence_order[n={n0}->{n1}]"),
                &Inputs::new("convergence_order").real(cfg.bvp.c).int(n0 as u64).int(n1 as u64),
                (order - 2.0).abs(),
                Relation::Le,
                cfg.tol("order"),
                true,
            );
        }
    }
    if let Some(rep) = &finest {
        report.add_series("spectrum", spectrum_series(&spectrum_points(rep)));
    }

    record_coercive(&mut report, cfg, &problem, cfg.bvp.coercive_n, cfg.bvp.is_scalar_model())?;
    record_condition(&mut report, &problem)?;

    let hilbert = ctx(2.0, "embedding")?;
    let params = EmbeddingParams {
        n: cfg.bvp.embedding_n,
        gamma: 0.0,
        k_max: None,
    };
    for (k, &nu) in cfg.bvp.nu.iter().enumerate() {
        let r = embedding_snumbers(cfg.bvp.embedding_dim, nu, hilbert, &params).during("embedding")?;
        report.check(
            format!("embedding_exponent[nu={nu},d={}]", cfg.bvp.embedding_dim),
            &Inputs::new("embedding").real(nu).int(cfg.bvp.embedding_dim as u64).int(params.n as u64),
            (r.fitted_exponent - r.expected_exponent).abs(),
            Relation::Le,
            cfg.tol("embedding"),
            true,
        );
        if k == 0 {
            report.add_series("snumbers", snumbers_series(&r.s, &fit_middle_third(&r.s)));
        }
    }

    for &gamma in &cfg.bvp.gammas {
        for (j, coeffs) in CHAIN_RULE_POLYNOMIALS.iter().enumerate() {
            let r = chain_rule_check(gamma, coeffs, 64).during("chain_rule")?;
            let inputs = coeffs.iter().fold(Inputs::new("chain_rule").real(gamma), |d, &c| d.real(c));
            report.check(
                format!("chain_rule[gamma={gamma},poly={j}]"),
                &inputs,
                r.max_error,
                Relation::Le,
                cfg.tol("chain_rule"),
                true,
            );
            report.check(
                format!("degenerate_round_trip[gamma={gamma},poly={j}]"),
                &inputs,
                r.round_trip_error,
                Relation::Le,
                1e-9,
                true,
            );
        }
    }
    Ok(report)
}

/// One discretization of the configured problem at grid size `n`.
pub fn run_bvp_experiment(cfg: &SuiteConfig, n: usize) -> Result<Report, CliError> {
    if !(8..=512).contains(&n) {
        return Err(CliError::Config(format!("grid size n = {n} outside 8..=512")));
    }
    let mut report = Report::new("bvp-run", &json!({ "config": cfg, "n": n }));
    let problem = cfg.bvp.problem();
    let (_, rep) = spectral(&problem, cfg, n)?;
    record_grid(&mut report, cfg, &problem, n, &rep);
    report.check(
        format!("resolvent_snumber_slope[n={n}]"),
        &problem_inputs(&problem, n),
        (rep.snumber_slope - rep.expected_slope).abs(),
        Relation::Le,
        0.25,
        false,
    );
    record_coercive(&mut report, cfg, &problem, n, false)?;
    record_condition(&mut report, &problem)?;
    report.add_series("spectrum", spectrum_series(&spectrum_points(&rep)));
    report.add_series(
        "snumbers",
        snumbers_series(&rep.resolvent_snumbers, &fit_middle_third(&rep.resolvent_snumbers)),
    );
    Ok(report)
}
