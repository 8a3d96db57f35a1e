use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rootspan_core::bvp::BvpProblem;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SUITES: [&str; 5] = ["schatten", "trace", "resolvent", "completeness", "bvp"];

/// Tolerance keys each suite understands, with their defaults.
pub fn default_tolerances(suite: &str) -> &'static [(&'static str, f64)] {
    match suite {
        "schatten" => &[("weyl", 1e-9), ("adjoint", 1e-10), ("unitary", 1e-10)],
        "trace" => &[("symmetry", 1e-10), ("spectral_trace", 1e-8), ("nilpotent_trace", 1e-10)],
        "resolvent" => &[("determinant", 1e-9), ("decay_order", 0.05)],
        "completeness" => &[
            ("projection", 1e-8),
            ("contour", 1e-7),
            ("root_distance", 1e-8),
            ("cluster", 1e-4),
        ],
        "bvp" => &[
            ("order", 0.2),
            ("root_distance", 1e-8),
            ("coercive", 0.1),
            ("embedding", 0.1),
            ("chain_rule", 1e-8),
        ],
        _ => &[],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimRange {
    pub min: usize,
    pub max: usize,
}

impl Default for DimRange {
    fn default() -> Self {
        Self { min: 2, max: 8 }
    }
}

impl DimRange {
    /// Cycles through `min..=max`.
    pub fn pick(&self, k: usize) -> usize {
        self.min + k % (self.max - self.min + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BvpConfig {
    /// Potential `c` of the scalar Dirichlet model `−u'' + c u`.
    pub c: f64,
    /// Replaces the scalar model when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<BvpProblem>,
    pub grids: Vec<usize>,
    pub arcs: usize,
    pub arc_offset: f64,
    pub embedding_dim: usize,
    pub embedding_n: usize,
    pub nu: Vec<f64>,
    pub gammas: Vec<f64>,
    pub coercive_n: usize,
    pub lambda_max: f64,
    pub lambda_points: usize,
}

impl Default for BvpConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            problem: None,
            grids: vec![16, 32, 64, 128],
            arcs: 5,
            arc_offset: PI / 5.0,
            embedding_dim: 64,
            embedding_n: 64,
            nu: vec![1.0, 2.0],
            gammas: vec![0.25, 0.5, 0.75],
            coercive_n: 64,
            lambda_max: 1e4,
            lambda_points: 41,
        }
    }
}

impl BvpConfig {
    pub fn problem(&self) -> BvpProblem {
        self.problem
            .clone()
            .unwrap_or_else(|| BvpProblem::dirichlet_scalar(self.c, 2.0))
    }

    pub fn is_scalar_model(&self) -> bool {
        self.problem.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub dimensions: DimRange,
    #[serde(default = "default_p")]
    pub p: Vec<f64>,
    /// Random instances per exponent; each suite has its own default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Not echoed into reports, so output location never changes report bytes.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub bvp: BvpConfig,
}

fn default_seed() -> u64 {
    1
}

fn default_p() -> Vec<f64> {
    vec![2.0]
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl SuiteConfig {
    pub fn for_suite(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            seed: default_seed(),
            dimensions: DimRange::default(),
            p: default_p(),
            trials: None,
            tolerances: BTreeMap::new(),
            output_dir: None,
            bvp: BvpConfig::default(),
        }
    }

    /// Reads TOML or JSON, chosen by file extension.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        match ext.to_ascii_lowercase().as_str() {
            "toml" => toml::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display()))),
            "json" => serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display()))),
            _ => Err(invalid(format!(
                "{}: config must end in .toml or .json",
                path.display()
            ))),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !SUITES.contains(&self.suite.as_str()) {
            return Err(invalid(format!(
                "unknown suite '{}' (expected one of {})",
                self.suite,
                SUITES.join(", ")
            )));
        }
        if self.seed == 0 {
            return Err(invalid("seed must be positive"));
        }
        let d = self.dimensions;
        if d.min == 0 || d.min > d.max || d.max > 64 {
            return Err(invalid(format!(
                "dimensions must satisfy 1 ≤ min ≤ max ≤ 64, got {}..{}",
                d.min, d.max
            )));
        }
        if self.p.is_empty() {
            return Err(invalid("p list is empty"));
        }
        for &p in &self.p {
            if !(p.is_finite() && p > 1.0) {
                return Err(invalid(format!("exponent p = {p} outside (1, inf)")));
            }
        }
        if self.trials == Some(0) {
            return Err(invalid("trials must be positive"));
        }
        let known = default_tolerances(&self.suite);
        for (key, &value) in &self.tolerances {
            if !known.iter().any(|(k, _)| k == key) {
                return Err(invalid(format!(
                    "unknown tolerance '{key}' for suite {}",
                    self.suite
                )));
            }
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(format!("tolerance {key} = {value} must be positive")));
            }
        }
        if self.suite == "bvp" {
            self.validate_bvp()?;
        }
        Ok(())
    }

    fn validate_bvp(&self) -> Result<(), CliError> {
        let b = &self.bvp;
        if !b.c.is_finite() {
            return Err(invalid("bvp.c must be finite"));
        }
        if b.grids.is_empty() || b.grids.iter().any(|&n| !(8..=512).contains(&n)) {
            return Err(invalid("bvp.grids must be non-empty with 8 ≤ n ≤ 512"));
        }
        if b.arcs == 0 || !b.arc_offset.is_finite() {
            return Err(invalid("bvp.arcs must be positive with a finite offset"));
        }
        if b.embedding_dim < 64 || b.embedding_n < 8 {
            return Err(invalid("bvp.embedding_dim must be ≥ 64 and bvp.embedding_n ≥ 8"));
        }
        if b.nu.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
            return Err(invalid("bvp.nu entries must be positive"));
        }
        if b.gammas.iter().any(|&g| !(g > 0.0 && g < 1.0)) {
            return Err(invalid("bvp.gammas must lie in (0, 1)"));
        }
        if b.coercive_n < 8 || !(b.lambda_max > 10.0) || b.lambda_points < 6 {
            return Err(invalid(
                "bvp.coercive_n ≥ 8, bvp.lambda_max > 10 and bvp.lambda_points ≥ 6 required",
            ));
        }
        if let Some(problem) = &b.problem {
            problem
                .validate(true)
                .map_err(|e| invalid(format!("bvp.problem: {e}")))?;
        }
        Ok(())
    }

    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    pub fn tol(&self, key: &str) -> f64 {
        if let Some(&v) = self.tolerances.get(key) {
            return v;
        }
        default_tolerances(&self.suite)
            .iter()
            .find(|(k, _)| *k == key)
            .map(|&(_, v)| v)
            .unwrap_or_else(|| panic!("no tolerance '{key}' for suite {}", self.suite))
    }
}
