//! JSON and CSV interchange. Complex numbers are `[re, im]` pairs throughout.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BiorthogonalSystem, ExponentContext, PowerWeight};
use crate::linalg::{LineFit, C64, CMatrix};
use crate::resolvent::{ArcConfiguration, RayScan};
use crate::rootspace::SpectralDecomposition;
use crate::trace::AnalyticFunctionSpec;

/// `{"n": …, "entries": [[re, im], …]}` in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub n: usize,
    pub entries: Vec<C64>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let n = m.nrows();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(m[(i, j)]);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.n * self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n * self.n,
                found: self.entries.len(),
            });
        }
        Ok(CMatrix::from_row_slice(self.n, self.n, &self.entries))
    }
}

/// `{"n": …, "p": …, "e": […], "f": […]}` with `e_1, …, e_n` and
/// `f_1, …, f_n` each concatenated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDoc {
    pub n: usize,
    pub p: f64,
    pub e: Vec<C64>,
    pub f: Vec<C64>,
}

impl SystemDoc {
    pub fn from_system(system: &BiorthogonalSystem) -> Self {
        let n = system.dimension();
        let e = (0..n).flat_map(|j| system.primal(j).iter().copied().collect::<Vec<_>>()).collect();
        let f = (0..n).flat_map(|i| system.dual(i).iter().copied().collect::<Vec<_>>()).collect();
        Self {
            n,
            p: system.context().p(),
            e,
            f,
        }
    }

    pub fn to_system(&self) -> Result<BiorthogonalSystem> {
        let n = self.n;
        for v in [&self.e, &self.f] {
            if v.len() != n * n {
                return Err(Error::DimensionMismatch {
                    expected: n * n,
                    found: v.len(),
                });
            }
        }
        let e = CMatrix::from_column_slice(n, n, &self.e);
        let f = CMatrix::from_row_slice(n, n, &self.f);
        BiorthogonalSystem::new(e, f, ExponentContext::new(self.p)?)
    }
}

/// `{"gamma": …, "b": …}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightDoc {
    pub gamma: f64,
    pub b: f64,
}

impl WeightDoc {
    pub fn to_weight(&self) -> Result<PowerWeight> {
        PowerWeight::new(self.gamma, self.b)
    }
}

/// `{"coeffs": [[re, im], …]}` for `Σ_{k≥1} c_k z^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionDoc {
    pub coeffs: Vec<C64>,
}

impl FunctionDoc {
    pub fn to_function(&self) -> Result<AnalyticFunctionSpec> {
        AnalyticFunctionSpec::new(self.coeffs.clone())
    }
}

/// `{"angles": […], "p": …}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcsDoc {
    pub angles: Vec<f64>,
    pub p: f64,
}

impl ArcsDoc {
    pub fn to_arcs(&self) -> Result<ArcConfiguration> {
        ArcConfiguration::new(self.angles.clone(), ExponentContext::new(self.p)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterDoc {
    pub eigenvalue: C64,
    pub multiplicity: usize,
    pub chains: Vec<Vec<Vec<C64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionDoc {
    pub dimension: usize,
    pub complete: bool,
    pub clusters: Vec<ClusterDoc>,
}

impl DecompositionDoc {
    pub fn from_decomposition(d: &SpectralDecomposition) -> Self {
        Self {
            dimension: d.dimension(),
            complete: d.is_complete(),
            clusters: d
                .clusters()
                .iter()
                .map(|c| ClusterDoc {
                    eigenvalue: c.eigenvalue,
                    multiplicity: c.multiplicity,
                    chains: c
                        .chains
                        .iter()
                        .map(|chain| chain.iter().map(|v| v.iter().copied().collect()).collect())
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Reads a square matrix from CSV with `2n` columns per row, real and
/// imaginary parts alternating. A header row is not expected.
pub fn read_matrix_csv<R: Read>(reader: R) -> Result<CMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix CSV rows need an even number of columns, got {}",
                record.len()
            )));
        }
        let mut row = Vec::with_capacity(record.len() / 2);
        for pair in record.iter().collect::<Vec<_>>().chunks(2) {
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("not a number: {s:?}")))
            };
            row.push(C64::new(parse(pair[0])?, parse(pair[1])?));
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix CSV".into()));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    let flat: Vec<C64> = rows.into_iter().flatten().collect();
    Ok(CMatrix::from_row_slice(n, n, &flat))
}

/// Formats a float with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `radius,norm_lower,norm_upper` rows.
pub fn write_ray_scan_csv<W: Write>(scan: &RayScan, writer: W) -> Result<()> {
    let lower: Vec<f64> = scan.norms.iter().map(|b| b.lower).collect();
    let upper: Vec<f64> = scan.norms.iter().map(|b| b.upper).collect();
    write_ray_rows(&scan.radii, &lower, &upper, writer)
}

pub fn write_ray_rows<W: Write>(radii: &[f64], lower: &[f64], upper: &[f64], writer: W) -> Result<()> {
    if lower.len() != radii.len() || upper.len() != radii.len() {
        return Err(Error::DimensionMismatch {
            expected: radii.len(),
            found: lower.len().min(upper.len()),
        });
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["radius", "norm_lower", "norm_upper"])?;
    for k in 0..radii.len() {
        w.write_record([format_f64(radii[k]), format_f64(lower[k]), format_f64(upper[k])])?;
    }
    w.flush()?;
    Ok(())
}

/// `j,s_j,fit` rows, `fit = e^{intercept} j^{slope}` (log-log line in `j`).
pub fn write_snumbers_csv<W: Write>(s: &[f64], fit: &LineFit, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["j", "s_j", "fit"])?;
    for (k, v) in s.iter().enumerate() {
        let j = (k + 1) as f64;
        let f = (fit.intercept + fit.slope * j.ln()).exp();
        w.write_record([(k + 1).to_string(), format_f64(*v), format_f64(f)])?;
    }
    w.flush()?;
    Ok(())
}

/// `re,im,multiplicity` rows.
pub fn write_spectrum_csv<W: Write>(points: &[(C64, usize)], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["re", "im", "multiplicity"])?;
    for (z, m) in points {
        w.write_record([format_f64(z.re), format_f64(z.im), m.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    #[test]
    fn matrix_json_round_trip() {
        let m = CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.5), c64(2.0, 0.0), c64(0.0, -1.0), c64(3.0, 0.0)]);
        let doc = MatrixDoc::from_matrix(&m).unwrap();
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.starts_with(r#"{"n":2,"entries":[[1.0,0.5],[2.0,0.0]"#));
        let back: MatrixDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn matrix_csv_import() {
        let text = "1,0,2,1\n0,-1,3,0\n";
        let m = read_matrix_csv(text.as_bytes()).unwrap();
        assert_eq!(m[(0, 1)], c64(2.0, 1.0));
        assert_eq!(m[(1, 0)], c64(0.0, -1.0));
        assert!(read_matrix_csv("1,0,2\n".as_bytes()).is_err());
        assert!(read_matrix_csv("1,0\n2,0\n".as_bytes()).is_err());
    }

    #[test]
    fn system_round_trip() {
        let ctx = ExponentContext::new(3.0).unwrap();
        let s = BiorthogonalSystem::permuted(&[2, 0, 1], ctx).unwrap();
        let doc = SystemDoc::from_system(&s);
        let back = doc.to_system().unwrap();
        assert_eq!(back.primal_matrix(), s.primal_matrix());
        assert_eq!(back.dual_matrix(), s.dual_matrix());
    }
}
