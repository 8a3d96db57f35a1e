mod bvp;
mod completeness;
mod resolvent;
mod schatten;
mod trace;

pub use bvp::run_bvp_experiment;

use rootspan_core::{CMatrix, ExponentContext, OperatorMatrix};

use crate::config::SuiteConfig;
use crate::report::Report;
use crate::{CliError, During};

/// Runs the configured battery. The configuration must already be validated.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report, CliError> {
    match cfg.suite.as_str() {
        "schatten" => schatten::run(cfg),
        "trace" => trace::run(cfg),
        "resolvent" => resolvent::run(cfg),
        "completeness" => completeness::run(cfg),
        "bvp" => bvp::run(cfg),
        other => Err(CliError::Config(format!("unknown suite '{other}'"))),
    }
}

pub(crate) fn ctx(p: f64, check: &str) -> Result<ExponentContext, CliError> {
    ExponentContext::new(p).during(check)
}

pub(crate) fn op(m: CMatrix, p: f64, check: &str) -> Result<OperatorMatrix, CliError> {
    OperatorMatrix::new(m, ctx(p, check)?).during(check)
}

/// `e + 3I` keeps a random primal matrix comfortably invertible.
pub(crate) fn shifted(e: CMatrix) -> CMatrix {
    let n = e.nrows();
    e + CMatrix::identity(n, n) * rootspan_core::C64::new(3.0, 0.0)
}
