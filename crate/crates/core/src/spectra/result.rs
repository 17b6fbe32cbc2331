use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::fit::{auto_window, fit_decay, DecayFit, FitWindow};
use super::norms::weak_quasinorm;
use crate::error::{Error, Result};

/// A descending positive spectrum with its power-law fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub values: Vec<f64>,
    pub fit: DecayFit,
    /// `(p, ‖·‖_{p,∞})` pairs.
    pub quasinorms: Vec<(f64, f64)>,
}

impl SpectrumResult {
    /// Keep the positive values, sort them, and fit on `window` (or the
    /// automatic window when `None`).
    pub fn new(
        mut values: Vec<f64>,
        window: Option<FitWindow>,
        quasinorm_ps: &[f64],
    ) -> Result<Self> {
        values.retain(|v| *v > 0.0 && v.is_finite());
        values.sort_by(|a, b| b.total_cmp(a));
        if values.is_empty() {
            return Err(Error::invalid("values", "spectrum has no positive values"));
        }
        let window = match window {
            Some(w) => w,
            None => auto_window(&values)?,
        };
        let fit = fit_decay(&values, window)?;
        let quasinorms = quasinorm_ps
            .iter()
            .map(|&p| Ok((p, weak_quasinorm(&values, p)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            values,
            fit,
            quasinorms,
        })
    }

    /// `k,value` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,value\n");
        for (k, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{v:.16e}", k + 1);
        }
        out
    }
}
