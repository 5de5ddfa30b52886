//! JSON reports, CSV point ingestion and diff-stable number formatting.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::discrepancy::{DecayFit, DimensionEstimate, DiscrepancyReport};
use crate::error::{Error, Result};

/// Record written by the measurement commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub method: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub s: usize,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub levels: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counts: Option<Vec<u64>>,
    pub wall_seconds: f64,
}

impl JsonReport {
    pub fn from_discrepancy(r: &DiscrepancyReport) -> Self {
        Self {
            method: r.method.as_str().to_string(),
            n: r.n,
            s: r.dims,
            value: r.value,
            exponent: None,
            r2: None,
            levels: None,
            counts: None,
            wall_seconds: r.runtime_seconds,
        }
    }

    /// Report of a decay fit; `value` and `N` describe the largest sample.
    pub fn from_fit(last: &DiscrepancyReport, fit: &DecayFit, wall_seconds: f64) -> Self {
        Self {
            exponent: Some(fit.exponent),
            r2: Some(fit.r2),
            wall_seconds,
            ..Self::from_discrepancy(last)
        }
    }

    pub fn from_dimension(
        e: &DimensionEstimate,
        points: usize,
        s: usize,
        wall_seconds: f64,
    ) -> Self {
        Self {
            method: "box_count".to_string(),
            n: points,
            s,
            value: e.slope,
            exponent: None,
            r2: None,
            levels: Some(e.levels.clone()),
            counts: Some(e.counts.clone()),
            wall_seconds,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Reads points from CSV with header `x1,...,xs`.
///
/// A leading `n` index column, as written by the sequence commands, is skipped.
pub fn read_points_csv<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let skip = usize::from(headers.get(0) == Some("n"));
    let names: Vec<&str> = headers.iter().skip(skip).collect();
    if names.is_empty() {
        return Err(Error::Parse("header names no coordinates".into()));
    }
    for (i, h) in names.iter().enumerate() {
        if *h != format!("x{}", i + 1) {
            return Err(Error::Parse(format!(
                "expected header x{}, found {h:?}",
                i + 1
            )));
        }
    }
    let s = names.len();
    let mut points = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != s + skip {
            return Err(Error::Parse(format!(
                "record {} has {} fields, expected {}",
                line + 1,
                rec.len(),
                s + skip
            )));
        }
        let p = rec
            .iter()
            .skip(skip)
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("record {}: {f:?}: {e}", line + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        points.push(p);
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(points)
}

/// Fixed-point rendering with `digits` decimals and trailing zeros removed,
/// so that exact values such as 0 print as `0`.
pub fn format_fixed(x: f64, digits: usize) -> String {
    let mut s = format!("{x:.digits$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::Method;

    #[test]
    fn formatting() {
        assert_eq!(format_fixed(0.0, 15), "0");
        assert_eq!(format_fixed(-0.0, 3), "0");
        assert_eq!(format_fixed(0.5, 15), "0.5");
        assert_eq!(format_fixed(0.618_033_988_749_894_8, 6), "0.618034");
        assert_eq!(format_fixed(2.0, 0), "2");
        assert_eq!(format_fixed(-1e-9, 3), "0");
    }

    #[test]
    fn json_schema() {
        let r = DiscrepancyReport {
            n: 10,
            value: 0.25,
            method: Method::BruteForce,
            dims: 2,
            runtime_seconds: 0.0,
        };
        let j = JsonReport::from_discrepancy(&r).to_json();
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["N"], 10);
        assert_eq!(v["method"], "brute_force_sD");
        assert!(v.get("exponent").is_none());
        assert!(v.get("wall_seconds").is_some());
    }

    #[test]
    fn csv_points() {
        let pts = read_points_csv("x1,x2\n0.1,0.2\n0.3, 0.4\n".as_bytes()).unwrap();
        assert_eq!(pts, vec![vec![0.1, 0.2], vec![0.3, 0.4]]);
        let pts = read_points_csv("n,x1\n0,0\n1,0.5\n".as_bytes()).unwrap();
        assert_eq!(pts, vec![vec![0.0], vec![0.5]]);
        assert!(read_points_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_points_csv("x1,x2\n0.1\n".as_bytes()).is_err());
        assert!(read_points_csv("x1\nabc\n".as_bytes()).is_err());
        assert_eq!(read_points_csv("x1\n".as_bytes()), Err(Error::EmptyInput));
    }
}
