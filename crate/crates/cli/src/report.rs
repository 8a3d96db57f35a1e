use std::collections::BTreeMap;
use std::str::FromStr;

use rootspan_core::io::format_f64;
use rootspan_core::{CMatrix, C64};
use serde::Serialize;
use serde_json::{Number, Value};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `observed ≤ bound`
    Le,
    /// `observed ≥ bound`
    Ge,
    /// `observed > bound`
    Gt,
}

impl Relation {
    fn test(self, observed: f64, bound: f64) -> bool {
        match self {
            Relation::Le => observed <= bound,
            Relation::Ge => observed >= bound,
            Relation::Gt => observed > bound,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub name: String,
    pub inputs_digest: String,
    pub observed: f64,
    pub bound: f64,
    pub relation: Relation,
    pub holds: bool,
    /// Report-only records never affect the exit status.
    pub asserted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub asserted: usize,
    pub asserted_failed: usize,
    pub report_only: usize,
    pub report_only_failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub tool_version: String,
    pub config: Value,
    pub records: Vec<Record>,
    pub summary: Summary,
    pub series: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(suite: &str, config: &impl Serialize) -> Self {
        Self {
            suite: suite.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            records: Vec::new(),
            summary: Summary {
                total: 0,
                asserted: 0,
                asserted_failed: 0,
                report_only: 0,
                report_only_failed: 0,
            },
            series: BTreeMap::new(),
        }
    }

    pub fn check(
        &mut self,
        name: impl Into<String>,
        digest: &Inputs,
        observed: f64,
        relation: Relation,
        bound: f64,
        asserted: bool,
    ) -> bool {
        let holds = relation.test(observed, bound);
        self.records.push(Record {
            name: name.into(),
            inputs_digest: digest.finish(),
            observed,
            bound,
            relation,
            holds,
            asserted,
        });
        self.refresh_summary();
        holds
    }

    /// Boolean outcome as `observed ∈ {0, 1}` against bound 1.
    pub fn flag(&mut self, name: impl Into<String>, digest: &Inputs, value: bool, asserted: bool) -> bool {
        self.check(name, digest, if value { 1.0 } else { 0.0 }, Relation::Ge, 1.0, asserted)
    }

    pub fn add_series(&mut self, kind: &str, value: Value) {
        self.series.insert(kind.to_string(), value);
    }

    fn refresh_summary(&mut self) {
        let asserted = self.records.iter().filter(|r| r.asserted).count();
        self.summary = Summary {
            total: self.records.len(),
            asserted,
            asserted_failed: self.records.iter().filter(|r| r.asserted && !r.holds).count(),
            report_only: self.records.len() - asserted,
            report_only_failed: self.records.iter().filter(|r| !r.asserted && !r.holds).count(),
        };
    }

    pub fn all_asserted_hold(&self) -> bool {
        self.summary.asserted_failed == 0
    }

    pub fn failed_asserted(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.asserted && !r.holds)
    }

    /// Pretty JSON with sorted keys and every float at 17 significant digits.
    pub fn to_value(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        normalize_numbers(&mut v);
        v
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Rewrites every non-integer number with 17 significant digits (`d.dddddddddddddddde±x`).
pub fn normalize_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            *v = match n.as_f64() {
                Some(x) if x.is_finite() => Value::Number(Number::from_str(&format_f64(x)).expect("formatted float parses")),
                _ => Value::Null,
            };
        }
        Value::Array(items) => items.iter_mut().for_each(normalize_numbers),
        Value::Object(map) => map.values_mut().for_each(normalize_numbers),
        _ => {}
    }
}

/// SHA-256 over the exact bit patterns of a check's inputs.
#[derive(Clone, Default)]
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    pub fn new(tag: &str) -> Self {
        let mut s = Self::default();
        s.hasher.update(tag.as_bytes());
        s
    }

    pub fn real(mut self, x: f64) -> Self {
        self.hasher.update(x.to_bits().to_le_bytes());
        self
    }

    pub fn int(mut self, k: u64) -> Self {
        self.hasher.update(k.to_le_bytes());
        self
    }

    pub fn complex(self, z: C64) -> Self {
        self.real(z.re).real(z.im)
    }

    pub fn matrix(mut self, m: &CMatrix) -> Self {
        self.hasher.update((m.nrows() as u64).to_le_bytes());
        self.hasher.update((m.ncols() as u64).to_le_bytes());
        for z in m.iter() {
            self = self.complex(*z);
        }
        self
    }

    /// First 16 hex digits of the digest.
    pub fn finish(&self) -> String {
        let bytes = self.hasher.clone().finalize();
        bytes.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
