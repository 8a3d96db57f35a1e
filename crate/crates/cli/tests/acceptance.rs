//! End-to-end acceptance battery. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rootspan_core::bvp::{
    bvp_spectral_report, chain_rule_check, coercive_estimate_report, discretize, embedding_snumbers,
    BvpProblem, EmbeddingParams, SpectralParams,
};
use rootspan_core::linalg::{log_space, schur};
use rootspan_core::random::{gaussian_matrix, gaussian_vector, random_unitary, seeded, strictly_upper, SeededRng};
use rootspan_core::resolvent::{
    carleman_report, ray_scan, regularized_determinant, sector_condition_check,
};
use rootspan_core::rootspace::{completeness_verdict_with, decompose, riesz_projection, VerdictOptions};
use rootspan_core::schatten::weyl_check;
use rootspan_core::trace::{
    quasinilpotent_trace, spectral_trace_check, trace_holder_check, trace_symmetry_check,
};
use rootspan_core::{
    AnalyticFunctionSpec, ArcConfiguration, BiorthogonalSystem, CMatrix, CVector, ExponentContext,
    OperatorMatrix, C64,
};

type Outcome = Result<String, String>;

fn ctx(p: f64) -> ExponentContext {
    ExponentContext::new(p).unwrap()
}

fn op(m: CMatrix, p: f64) -> OperatorMatrix {
    OperatorMatrix::new(m, ctx(p)).unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("runtime {:.1} s exceeds {limit_s} s", elapsed.as_secs_f64())
    })
}

fn weyl() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(101);
    let mut worst_gap: f64 = 0.0;
    for k in 0..200 {
        let n = [4, 6, 8][k % 3];
        let r = weyl_check(&op(gaussian_matrix(n, n, &mut rng), 2.0)).map_err(|e| e.to_string())?;
        ensure(r.lhs <= r.rhs + 1e-9, || format!("inequality fails: {} > {}", r.lhs, r.rhs))?;

        let u = random_unitary(n, &mut rng);
        let normal = &u * CMatrix::from_diagonal(&gaussian_vector(n, &mut rng)) * u.adjoint();
        let r = weyl_check(&op(normal, 2.0)).map_err(|e| e.to_string())?;
        worst_gap = worst_gap.max((r.lhs - r.rhs).abs());
    }
    ensure(worst_gap <= 1e-9, || format!("normal-matrix gap {worst_gap:e}"))?;
    within(start.elapsed(), 10.0)?;
    Ok(format!("200 matrices, normal gap {worst_gap:.1e}, {:.1} s", start.elapsed().as_secs_f64()))
}

fn system(n: usize, p: f64, rng: &mut SeededRng) -> BiorthogonalSystem {
    let e = gaussian_matrix(n, n, rng) + CMatrix::identity(n, n) * c(3.0, 0.0);
    BiorthogonalSystem::from_primal(e, ctx(p)).unwrap()
}

fn traces() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(202);
    let mut sym: f64 = 0.0;
    for k in 0..200 {
        let n = 2 + k % 7;
        let a = op(gaussian_matrix(n, n, &mut rng), 3.0);
        let b = op(gaussian_matrix(n, n, &mut rng), 3.0);
        let s = system(n, 3.0, &mut rng);
        sym = sym.max(trace_symmetry_check(&a, &b, &s).map_err(|e| e.to_string())?.delta);
        let h = trace_holder_check(&a, &b, &s).map_err(|e| e.to_string())?;
        ensure(h.holds, || format!("Hölder fails: {} > {}", h.lhs, h.rhs))?;
    }
    ensure(sym <= 1e-10, || format!("symmetry delta {sym:e}"))?;

    let mut spectral: f64 = 0.0;
    for k in 0..100 {
        let d = gaussian_vector(8, &mut rng);
        let v = gaussian_matrix(8, 8, &mut rng) + CMatrix::identity(8, 8) * c(4.0, 0.0);
        let a = &v * CMatrix::from_diagonal(&d) * v.clone().try_inverse().unwrap();
        let poly = |deg: usize, rng: &mut SeededRng| {
            let coeffs: Vec<C64> = (0..=deg)
                .map(|j| rootspan_core::random::complex_gaussian(rng) * 0.5f64.powi(j as i32))
                .collect();
            AnalyticFunctionSpec::new(coeffs).unwrap()
        };
        let f = poly(k % 5, &mut rng);
        let g = poly(4 - k % 5, &mut rng);
        let r = spectral_trace_check(&op(a, 2.0), &f, &g, &system(8, 2.0, &mut rng)).map_err(|e| e.to_string())?;
        spectral = spectral.max(r.delta);
    }
    ensure(spectral <= 1e-8, || format!("spectral trace delta {spectral:e}"))?;

    let mut nil: f64 = 0.0;
    for k in 0..100 {
        let n = 3 + k % 6;
        let base = strictly_upper(n, &mut rng);
        let u = random_unitary(n, &mut rng);
        let sys = BiorthogonalSystem::canonical(n, ctx(2.0));
        for m in [base.clone(), &u * &base * u.adjoint()] {
            nil = nil.max(quasinilpotent_trace(&op(m, 2.0), &sys).map_err(|e| e.to_string())?.norm());
        }
    }
    ensure(nil <= 1e-10, || format!("nilpotent trace {nil:e}"))?;
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "symmetry {sym:.1e}, spectral {spectral:.1e}, nilpotent {nil:.1e}, {:.1} s",
        start.elapsed().as_secs_f64()
    ))
}

fn carleman() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(303);
    let sys = BiorthogonalSystem::canonical(6, ctx(2.0));
    let radii = log_space(1.0, 1000.0, 20);
    let mut checked = 0;
    let mut similarity: f64 = 0.0;
    for _ in 0..100 {
        let a = gaussian_matrix(6, 6, &mut rng);
        let spectrum = schur::eigenvalues(&a).map_err(|e| e.to_string())?;
        let ao = op(a.clone(), 2.0);
        for &r in &radii {
            // Rotate until the sample keeps distance 0.1 from the spectrum.
            let lambda = loop {
                let l = C64::from_polar(r, rng.random_range(-PI..PI));
                if spectrum.iter().all(|&m| (m - l).norm() >= 0.1) {
                    break l;
                }
            };
            let rep = carleman_report(&ao, &sys, lambda).map_err(|e| e.to_string())?;
            ensure(rep.satisfied_at_bracket, || format!("bound fails at {lambda}: {rep:?}"))?;
            checked += 1;
        }
        let s = gaussian_matrix(6, 6, &mut rng) + CMatrix::identity(6, 6) * c(3.0, 0.0);
        let b = &s * &a * s.clone().try_inverse().unwrap();
        let lambda = C64::from_polar(4.0, rng.random_range(-PI..PI));
        let x = regularized_determinant(&ao, lambda).map_err(|e| e.to_string())?;
        let y = regularized_determinant(&op(b, 2.0), lambda).map_err(|e| e.to_string())?;
        similarity = similarity.max((x - y).norm() / x.norm());
    }
    ensure(similarity <= 1e-9, || format!("determinant similarity {similarity:e}"))?;
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "{checked} resolvent points, similarity {similarity:.1e}, {:.1} s",
        start.elapsed().as_secs_f64()
    ))
}

fn decay_orders() -> Outcome {
    let diag = |v: &[C64]| CMatrix::from_diagonal(&CVector::from_column_slice(v));
    let mut jordan = diag(&[c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
    jordan[(0, 1)] = c(1.0, 0.0);
    let cases = [
        (diag(&[c(1.0, 0.0), c(2.0, 1.0), c(-1.5, 0.0)]), 0.0),
        (diag(&[c(0.0, 0.0), c(2.0, 1.0), c(-1.5, 0.0)]), 1.0),
        (jordan, 2.0),
    ];
    let mut orders = Vec::new();
    for (m, expect) in cases {
        let order = ray_scan(&op(m, 2.0), 0.9, 1e-5, 10.0, 36)
            .map_err(|e| e.to_string())?
            .fitted_order();
        ensure((order - expect).abs() <= 0.05, || format!("order {order} vs {expect}"))?;
        orders.push(order);
    }
    for p in [1.5, 2.0, 3.0] {
        for s in 1..=64 {
            let arcs = ArcConfiguration::equally_spaced(s, 0.0, ctx(p)).unwrap();
            let holds = sector_condition_check(&arcs).holds;
            ensure(holds == (s as f64 > 2.0 * p), || format!("sector mismatch at s={s}, p={p}"))?;
        }
    }
    Ok(format!("orders {:.3} {:.3} {:.3}; sector closed form exact", orders[0], orders[1], orders[2]))
}

fn jordan_conjugate(blocks: &[(C64, usize)], rng: &mut SeededRng) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.1).sum();
    let mut j = CMatrix::zeros(n, n);
    let mut at = 0;
    for &(l, size) in blocks {
        for k in 0..size {
            j[(at + k, at + k)] = l;
            if k + 1 < size {
                j[(at + k, at + k + 1)] = c(1.0, 0.0);
            }
        }
        at += size;
    }
    let s = gaussian_matrix(n, n, rng) * c(0.3, 0.0) + CMatrix::identity(n, n);
    &s * j * s.clone().try_inverse().unwrap()
}

fn completeness() -> Outcome {
    let mut rng = seeded(505);
    let mut resolution: f64 = 0.0;
    for k in 0..100 {
        let n = 1 + k % 10;
        let a = gaussian_matrix(n, n, &mut rng);
        let ps = decompose(&a, 1e-8).and_then(|d| d.projections()).map_err(|e| e.to_string())?;
        let sum = ps.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p);
        resolution = resolution.max((sum - CMatrix::identity(n, n)).norm());
        for p in &ps {
            resolution = resolution.max((p * p - p).norm());
        }
    }
    ensure(resolution <= 1e-8, || format!("projection residual {resolution:e}"))?;

    let blocks = [(c(0.0, 0.0), 2), (c(3.0, 0.0), 1), (c(-1.0, 2.0), 1), (c(2.0, -2.0), 2)];
    let a = jordan_conjugate(&blocks, &mut rng);
    let d = decompose(&a, 1e-4).map_err(|e| e.to_string())?;
    let ps = d.projections().map_err(|e| e.to_string())?;
    let ao = op(a, 2.0);
    let mut contour: f64 = 0.0;
    for (cl, p) in d.clusters().iter().zip(&ps) {
        let q = riesz_projection(&ao, cl.eigenvalue, 1.0, 512).map_err(|e| e.to_string())?;
        contour = contour.max((q - p).norm());
    }
    ensure(contour <= 1e-7, || format!("contour vs chain {contour:e}"))?;

    let blocks = [(c(1.0, 1.0), 3), (c(-2.0, 0.5), 2), (c(2.0, -1.0), 1)];
    let a = op(jordan_conjugate(&blocks, &mut rng), 2.0);
    let arcs = ArcConfiguration::equally_spaced(5, 0.3, ctx(2.0)).unwrap();
    let options = VerdictOptions::at_infinity();
    let d = decompose(a.entries(), options.tol).map_err(|e| e.to_string())?;
    let full = completeness_verdict_with(&a, &d, 0, &arcs, 16, 9, &options).map_err(|e| e.to_string())?;
    ensure(full.max_relative_distance <= 1e-8, || format!("full distance {:e}", full.max_relative_distance))?;
    let cut = completeness_verdict_with(&a, &d.truncate_chains(1), 0, &arcs, 16, 9, &options)
        .map_err(|e| e.to_string())?;
    ensure(cut.max_relative_distance > 0.0, || "truncated distance is zero".into())?;
    Ok(format!(
        "projections {resolution:.1e}, contour {contour:.1e}, full {:.1e}, truncated {:.1e}",
        full.max_relative_distance, cut.max_relative_distance
    ))
}

fn bvp_spectrum() -> Outcome {
    let start = Instant::now();
    let c0 = 1.0;
    let exact = PI * PI + c0;
    let arcs = ArcConfiguration::equally_spaced(5, PI / 5.0, ctx(2.0)).unwrap();
    let grids = [16usize, 32, 64, 128];
    let mut errors = Vec::new();
    let mut distance: f64 = 0.0;
    for &n in &grids {
        let op = discretize(&BvpProblem::dirichlet_scalar(c0, 2.0), n).map_err(|e| e.to_string())?;
        let r = bvp_spectral_report(&op, &arcs, &SpectralParams::default()).map_err(|e| e.to_string())?;
        ensure(r.max_root_distance <= 1e-8, || format!("n={n}: root distance {:e}", r.max_root_distance))?;
        distance = distance.max(r.max_root_distance);
        errors.push((r.eigenvalues[0].re - exact).abs());
    }
    let mut orders = Vec::new();
    for k in 1..grids.len() {
        let h_ratio = (grids[k] as f64 + 1.0) / (grids[k - 1] as f64 + 1.0);
        let order = (errors[k - 1] / errors[k]).ln() / h_ratio.ln();
        ensure((order - 2.0).abs() <= 0.2, || format!("order {order} between n={} and n={}", grids[k - 1], grids[k]))?;
        orders.push(order);
    }
    within(start.elapsed(), 20.0)?;
    Ok(format!(
        "orders {:.3} {:.3} {:.3}, root distance {distance:.1e}, {:.1} s",
        orders[0],
        orders[1],
        orders[2],
        start.elapsed().as_secs_f64()
    ))
}

fn embedding() -> Outcome {
    let start = Instant::now();
    let params = EmbeddingParams {
        n: 128,
        gamma: 0.0,
        k_max: None,
    };
    let mut fits = Vec::new();
    for nu in [1.0, 2.0] {
        let r = embedding_snumbers(128, nu, ctx(2.0), &params).map_err(|e| e.to_string())?;
        let expect = -2.0 / (2.0 * nu + 1.0);
        ensure((r.fitted_exponent - expect).abs() <= 0.1, || {
            format!("nu={nu}: exponent {} vs {expect}", r.fitted_exponent)
        })?;
        fits.push(r.fitted_exponent);
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!(
        "exponents {:.4} (expect {:.4}), {:.4} (expect {:.4}), {:.1} s",
        fits[0],
        -2.0 / 3.0,
        fits[1],
        -0.4,
        start.elapsed().as_secs_f64()
    ))
}

fn coercive() -> Outcome {
    let op = discretize(&BvpProblem::dirichlet_scalar(1.0, 2.0), 64).map_err(|e| e.to_string())?;
    let lambdas: Vec<C64> = log_space(1.0, 1e4, 41).into_iter().map(C64::from).collect();
    let r = coercive_estimate_report(&op, &lambdas, 1).map_err(|e| e.to_string())?;
    ensure(r.stability <= 1.1, || format!("top-decade maxima differ by factor {}", r.stability))?;
    Ok(format!("M = {:.4}, stability {:.4}", r.m_observed, r.stability))
}

fn chain_rule() -> Outcome {
    let polys: [&[f64]; 3] = [&[0.0, 0.0, 1.0], &[1.0, -1.0, 0.5, 2.0, -0.75], &[0.0, 1.0]];
    let mut worst: f64 = 0.0;
    for gamma in [0.25, 0.5, 0.75] {
        for coeffs in polys {
            let r = chain_rule_check(gamma, coeffs, 64).map_err(|e| e.to_string())?;
            ensure(r.max_error <= 1e-8, || format!("gamma={gamma}: error {:e}", r.max_error))?;
            worst = worst.max(r.max_error);
        }
    }
    Ok(format!("max error {worst:.1e}"))
}

fn determinism() -> Outcome {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let bvp_cfg = tmp.path().join("bvp.toml");
    std::fs::write(&bvp_cfg, "suite = \"bvp\"\n[bvp]\ngrids = [16, 32]\nnu = [1.0]\ncoercive_n = 32\n")
        .map_err(|e| e.to_string())?;
    let run = |suite: &str, dir: &Path| -> Result<Vec<u8>, String> {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_rootspan"));
        cmd.args(["verify", suite, "--seed", "17", "--out"]).arg(dir);
        if suite == "bvp" {
            cmd.arg("--config").arg(&bvp_cfg);
        }
        let out = cmd.output().map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(0), || {
            format!("{suite} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
        })?;
        std::fs::read(dir.join("report.json")).map_err(|e| e.to_string())
    };
    for suite in ["schatten", "trace", "resolvent", "completeness", "bvp"] {
        let a = run(suite, &tmp.path().join(format!("{suite}-a")))?;
        let b = run(suite, &tmp.path().join(format!("{suite}-b")))?;
        ensure(a == b, || format!("{suite} reports differ"))?;
    }
    Ok("all five suites byte-identical across reruns".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Weyl inequality", weyl),
        ("trace identities", traces),
        ("Carleman bound", carleman),
        ("resolvent decay orders", decay_orders),
        ("completeness machinery", completeness),
        ("BVP spectrum convergence", bvp_spectrum),
        ("embedding s-numbers", embedding),
        ("coercive estimate", coercive),
        ("degenerate chain rule", chain_rule),
        ("report determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
