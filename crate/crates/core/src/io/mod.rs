//! Input parsing and report formats.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::horner;
use crate::shape::{MonotoneCanonical, ShapeFit};
use crate::solvers::{AdaptiveFit, FitResult, TraceEntry};

/// Parses a series: one value per line, or `index,value` rows with an
/// optional header. Indices must run `1, 2, ...` without gaps. Blank lines
/// are ignored.
pub fn parse_series(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut two_column = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let is_pair = *two_column.get_or_insert(fields.len() == 2);
        if values.is_empty() && is_pair && fields[0].parse::<f64>().is_err() {
            // Header row.
            continue;
        }
        let parse = |s: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("'{s}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("'{s}' is not finite"),
                });
            }
            Ok(v)
        };
        match (is_pair, fields.len()) {
            (false, 1) => values.push(parse(fields[0])?),
            (true, 2) => {
                let idx: usize = fields[0].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("'{}' is not a positive integer index", fields[0]),
                })?;
                let expected = values.len() + 1;
                if idx != expected {
                    return Err(Error::NonContiguousIndex {
                        line: line_no,
                        expected,
                        found: idx,
                    });
                }
                values.push(parse(fields[1])?);
            }
            (_, m) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!(
                        "expected {} field(s), found {m}",
                        if is_pair { 2 } else { 1 }
                    ),
                })
            }
        }
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(values)
}

pub fn read_series(path: &Path) -> Result<Vec<f64>> {
    parse_series(&fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceReport {
    /// Knot to the left of the piece; the piece covers `start < t <= end`.
    pub start: usize,
    pub end: usize,
    /// `a_1, ..., a_{d+1}` of `sum_l a_l (x - start/n)^(l-1)`.
    pub coeffs: Vec<f64>,
}

/// JSON document describing one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub d: usize,
    pub d0: i32,
    pub k_selected: usize,
    pub knots: Vec<usize>,
    pub pieces: Vec<PieceReport>,
    pub sse: f64,
    pub penalty_used: Option<f64>,
    pub theta_hat: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<MonotoneCanonical>,
}

impl FitReport {
    pub fn from_fit(fit: &FitResult, d0: i32) -> Self {
        let knots = fit.knots();
        let pieces = knots
            .nonempty_pieces()
            .into_iter()
            .map(|(p, start, end)| PieceReport {
                start,
                end,
                coeffs: fit.spline.coeffs[p].clone(),
            })
            .collect();
        Self {
            d: knots.degree(),
            d0,
            k_selected: fit.k_selected,
            knots: knots.as_slice().to_vec(),
            pieces,
            sse: fit.sse,
            penalty_used: None,
            theta_hat: fit.theta_hat.clone(),
            trace: None,
            pivot: None,
            canonical: None,
        }
    }

    pub fn from_adaptive(a: &AdaptiveFit, d0: i32) -> Self {
        let mut r = Self::from_fit(&a.fit, d0);
        r.penalty_used = Some(a.penalty_used());
        r.trace = Some(a.trace.clone());
        r
    }

    pub fn from_shape(s: &ShapeFit) -> Self {
        let d = s.canonical.d;
        let mut r = Self::from_fit(&s.fit, d as i32 - 1);
        r.pivot = Some(s.canonical.j_star);
        r.canonical = Some(s.canonical.clone());
        r
    }

    /// Evaluates the stored pieces on the grid.
    pub fn evaluate(&self) -> Result<Vec<f64>> {
        let n = *self.knots.last().ok_or(Error::EmptyInput)?;
        let nf = n as f64;
        let mut out = Vec::with_capacity(n);
        for piece in &self.pieces {
            if piece.start != out.len() || piece.end <= piece.start || piece.end > n {
                return Err(Error::param(format!(
                    "piece ({}, {}] does not continue the grid at {}",
                    piece.start,
                    piece.end,
                    out.len()
                )));
            }
            for t in piece.start + 1..=piece.end {
                out.push(horner(&piece.coeffs, (t - piece.start) as f64 / nf));
            }
        }
        if out.len() != n {
            return Err(Error::param("pieces do not cover the grid"));
        }
        Ok(out)
    }
}

/// Writes `text` to `out`, or to standard output when `out` is `None`.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Serializes rows as CSV with a header taken from the field names.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::param(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::solvers::dp_fit;

    #[test]
    fn plain_column() {
        assert_eq!(parse_series("1\n2\n3\n").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_series("\n1.5\n\n-2e3\n").unwrap(), vec![1.5, -2000.0]);
    }

    #[test]
    fn indexed_with_header() {
        assert_eq!(parse_series("index,value\n1,5.0\n2,6.0\n").unwrap(), vec![5.0, 6.0]);
        assert_eq!(parse_series("1,5.0\n2,6.0\n").unwrap(), vec![5.0, 6.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(
            parse_series("1,5.0\n3,6.0\n"),
            Err(Error::NonContiguousIndex { line: 2, expected: 2, found: 3 })
        ));
        assert!(matches!(parse_series("1\nfoo\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_series("1\n2,3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_series("1\nNaN\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_series(""), Err(Error::EmptyInput)));
        assert!(matches!(parse_series("index,value\n"), Err(Error::EmptyInput)));
    }

    #[test]
    fn report_round_trip() {
        let y = [0.1, -0.2, 0.05, 2.0, 2.1, 1.9, 2.05, -1.0, -1.1];
        let p = ModelParams::new(0, -1, 3, y.len(), 1.0).unwrap();
        let fit = dp_fit(&y, &p).unwrap();
        let report = FitReport::from_fit(&fit, -1);
        let text = to_json(&report).unwrap();
        let back: FitReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        let theta = back.evaluate().unwrap();
        for (a, b) in theta.iter().zip(&back.theta_hat) {
            assert!((a - b).abs() < 1e-9);
        }
        let sse: f64 = y.iter().zip(&theta).map(|(a, b)| (a - b) * (a - b)).sum();
        assert!((sse - back.sse).abs() < 1e-9);
    }

    #[test]
    fn csv_header_follows_fields() {
        #[derive(Serialize)]
        struct Row {
            n: usize,
            value: f64,
        }
        let text = to_csv(&[Row { n: 4, value: 0.5 }]).unwrap();
        assert_eq!(text, "n,value\n4,0.5\n");
    }
}
