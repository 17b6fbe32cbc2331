use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which number a [`Check`] compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// `|measured - predicted| ≤ tolerance`.
    Exponent,
    /// `|measured - predicted| ≤ tolerance · predicted`.
    RelativeExponent,
    /// `measured ≤ tolerance`.
    UpperLimit,
    /// Every instance of an inequality held; `measured` counts violations.
    Violations,
}

/// One pass/fail criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub quantity: Quantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn exponent(name: &str, measured: f64, predicted: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            quantity: Quantity::Exponent,
            exponent: Some(measured),
            measured: None,
            predicted: Some(predicted),
            tolerance,
            pass: (measured - predicted).abs() <= tolerance,
        }
    }

    pub fn relative_exponent(name: &str, measured: f64, predicted: f64, tolerance: f64) -> Self {
        Self {
            quantity: Quantity::RelativeExponent,
            pass: (measured - predicted).abs() <= tolerance * predicted.abs(),
            ..Self::exponent(name, measured, predicted, tolerance)
        }
    }

    pub fn upper_limit(name: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            quantity: Quantity::UpperLimit,
            exponent: None,
            measured: Some(measured),
            predicted: None,
            tolerance,
            pass: measured.is_finite() && measured <= tolerance,
        }
    }

    pub fn violations(name: &str, count: usize, allowed: f64) -> Self {
        Self {
            quantity: Quantity::Violations,
            ..Self::upper_limit(name, count as f64, allowed)
        }
    }
}

/// JSON summary of one run. The top-level `exponent`, `predicted` and
/// `tolerance` repeat the first exponent check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub details: serde_json::Value,
}

impl Summary {
    pub fn new(experiment: &str, checks: Vec<Check>, details: serde_json::Value) -> Self {
        let lead = checks.iter().find(|c| c.exponent.is_some());
        Self {
            experiment: experiment.to_string(),
            exponent: lead.and_then(|c| c.exponent),
            predicted: lead.and_then(|c| c.predicted),
            tolerance: lead.map(|c| c.tolerance),
            pass: !checks.is_empty() && checks.iter().all(|c| c.pass),
            checks,
            details,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }
}

/// A numeric table, written with 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// `(k, value)` rows for a spectrum.
    pub fn spectrum(values: &[f64]) -> Self {
        let mut t = Self::new(&["k", "value"]);
        for (k, v) in values.iter().enumerate() {
            t.push(vec![(k + 1).into(), (*v).into()]);
        }
        t
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Real(v) => format!("{v:.16e}"),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(path.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_seventeen_significant_digits() {
        let csv = Table::spectrum(&[1.0 / 3.0, 0.25]).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,value");
        assert_eq!(lines[1], "1,3.3333333333333331e-1");
        assert_eq!(lines[2], "2,2.5000000000000000e-1");
        // round trip is exact
        let v: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, 1.0 / 3.0);
    }

    #[test]
    fn summary_pass_is_the_conjunction() {
        let ok = Check::exponent("gamma", 2.7, 8.0 / 3.0, 0.3);
        let bad = Check::exponent("tau", 2.6, 2.0, 0.25);
        assert!(ok.pass && !bad.pass);
        let s = Summary::new("x", vec![ok.clone(), bad], serde_json::Value::Null);
        assert!(!s.pass);
        assert_eq!(s.exponent, Some(2.7));
        assert!(Summary::new("x", vec![ok], serde_json::Value::Null).pass);
        assert!(!Summary::new("x", vec![], serde_json::Value::Null).pass);
    }

    #[test]
    fn check_kinds() {
        assert!(Check::relative_exponent("e", 2.15, 2.0, 0.1).pass);
        assert!(!Check::relative_exponent("e", 2.25, 2.0, 0.1).pass);
        assert!(Check::violations("v", 0, 0.0).pass);
        assert!(!Check::violations("v", 1, 0.0).pass);
        assert!(!Check::upper_limit("u", f64::INFINITY, 10.0).pass);
        let json = serde_json::to_value(Check::exponent("g", 2.5, 2.0, 0.6)).unwrap();
        assert_eq!(json["exponent"], 2.5);
        assert!(json.get("measured").is_none());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn csv_values_round_trip_exactly(values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL, 1..20)) {
            let csv = Table::spectrum(&values).to_csv();
            let back: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
            prop_assert_eq!(back, values);
        }
    }
}
