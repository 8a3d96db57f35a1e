//! Plot-ready CSV tables from report series.
//!
//! Series layout inside a report:
//! * `spectrum`: columns `re`, `im`, `multiplicity`, one row per eigenvalue
//!   counted with algebraic multiplicity, sorted by modulus.
//! * `rayscan`: columns `radius`, `norm_lower`, `norm_upper`.
//! * `snumbers`: `s` (non-increasing) with the log-log line `slope`, `intercept`.

use rootspan_core::io::{write_ray_rows, write_snumbers_csv, write_spectrum_csv};
use rootspan_core::linalg::LineFit;
use rootspan_core::C64;
use serde_json::{json, Value};

use crate::CliError;

pub const KINDS: [&str; 3] = ["snumbers", "rayscan", "spectrum"];

pub fn spectrum_series(points: &[(C64, usize)]) -> Value {
    let mut rows: Vec<(C64, usize)> = points
        .iter()
        .flat_map(|&(z, m)| std::iter::repeat_n((z, m), m))
        .collect();
    rows.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()).then(a.0.arg().total_cmp(&b.0.arg())));
    json!({
        "re": rows.iter().map(|r| r.0.re).collect::<Vec<_>>(),
        "im": rows.iter().map(|r| r.0.im).collect::<Vec<_>>(),
        "multiplicity": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
    })
}

pub fn rayscan_series(radii: &[f64], lower: &[f64], upper: &[f64]) -> Value {
    json!({ "radius": radii, "norm_lower": lower, "norm_upper": upper })
}

pub fn snumbers_series(s: &[f64], fit: &LineFit) -> Value {
    json!({ "s": s, "slope": fit.slope, "intercept": fit.intercept })
}

fn bad(msg: String) -> CliError {
    CliError::Config(msg)
}

fn column(series: &Value, kind: &str, key: &str) -> Result<Vec<f64>, CliError> {
    series
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| bad(format!("series '{kind}' lacks column '{key}'")))?
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| bad(format!("series '{kind}': non-numeric entry in '{key}'"))))
        .collect()
}

fn scalar(series: &Value, kind: &str, key: &str) -> Result<f64, CliError> {
    series
        .get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| bad(format!("series '{kind}' lacks '{key}'")))
}

/// CSV text for one series of a report.
pub fn render(report: &Value, kind: &str) -> Result<String, CliError> {
    if !KINDS.contains(&kind) {
        return Err(bad(format!(
            "unknown plot kind '{kind}' (expected one of {})",
            KINDS.join(", ")
        )));
    }
    let series = report
        .get("series")
        .and_then(|s| s.get(kind))
        .ok_or_else(|| bad(format!("report has no '{kind}' series")))?;
    let mut out = Vec::new();
    let written = match kind {
        "spectrum" => {
            let re = column(series, kind, "re")?;
            let im = column(series, kind, "im")?;
            let mult = column(series, kind, "multiplicity")?;
            if re.len() != im.len() || re.len() != mult.len() {
                return Err(bad("series 'spectrum' has ragged columns".into()));
            }
            let points: Vec<(C64, usize)> = (0..re.len())
                .map(|k| (C64::new(re[k], im[k]), mult[k] as usize))
                .collect();
            write_spectrum_csv(&points, &mut out)
        }
        "rayscan" => write_ray_rows(
            &column(series, kind, "radius")?,
            &column(series, kind, "norm_lower")?,
            &column(series, kind, "norm_upper")?,
            &mut out,
        ),
        _ => {
            let fit = LineFit {
                slope: scalar(series, kind, "slope")?,
                intercept: scalar(series, kind, "intercept")?,
                r_squared: f64::NAN,
            };
            write_snumbers_csv(&column(series, kind, "s")?, &fit, &mut out)
        }
    };
    written.map_err(|e| bad(format!("series '{kind}': {e}")))?;
    Ok(String::from_utf8(out).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::normalize_numbers;

    #[test]
    fn spectrum_rows_repeat_by_multiplicity() {
        let mut report = json!({"series": {"spectrum": spectrum_series(&[
            (C64::new(3.0, 0.0), 1),
            (C64::new(1.0, 1.0), 2),
        ])}});
        normalize_numbers(&mut report);
        let csv = render(&report, "spectrum").unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "re,im,multiplicity");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "1.0000000000000000e0,1.0000000000000000e0,2");
        assert!(lines[3].ends_with(",1"));
    }

    #[test]
    fn snumber_fit_column_follows_the_line() {
        let fit = LineFit {
            slope: -1.0,
            intercept: 0.0,
            r_squared: 1.0,
        };
        let report = json!({"series": {"snumbers": snumbers_series(&[1.0, 0.5, 0.25], &fit)}});
        let csv = render(&report, "snumbers").unwrap();
        let row: Vec<&str> = csv.lines().nth(2).unwrap().split(',').collect();
        assert_eq!(row[0], "2");
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.5);
    }

    #[test]
    fn unknown_kind_and_missing_series_are_rejected() {
        let report = json!({"series": {}});
        assert!(matches!(render(&report, "histogram"), Err(CliError::Config(_))));
        assert!(matches!(render(&report, "rayscan"), Err(CliError::Config(_))));
    }
}
