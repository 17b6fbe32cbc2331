use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inclusive 1-based index window `[start, end]` into a descending list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitWindow {
    pub start: usize,
    pub end: usize,
}

impl FitWindow {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        (self.end + 1).saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Power law `value_k ≈ amplitude · k^{-exponent}` fitted on a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub amplitude: f64,
    pub exponent: f64,
    /// Root-mean-square residual in `ln value`.
    pub residual: f64,
    pub window: FitWindow,
}

/// Least squares on `(ln k, ln value_k)` over `window`.
pub fn fit_decay(values: &[f64], window: FitWindow) -> Result<DecayFit> {
    if window.start == 0 || window.end > values.len() || window.len() < 5 {
        return Err(Error::DegenerateWindow {
            start: window.start,
            end: window.end,
        });
    }
    let pts: Vec<(f64, f64)> = (window.start..=window.end)
        .map(|k| (k as f64, values[k - 1]))
        .filter(|(_, v)| *v > 0.0 && v.is_finite())
        .map(|(k, v)| (k.ln(), v.ln()))
        .collect();
    if pts.len() < 5 {
        return Err(Error::DegenerateWindow {
            start: window.start,
            end: window.end,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        amplitude: intercept.exp(),
        exponent: -slope,
        residual,
        window,
    })
}

/// Default window `[10, rank/4]`, with the upper end pulled in past any knee
/// where the local log-log slope departs from the window median by more
/// than 20%.
pub fn auto_window(values: &[f64]) -> Result<FitWindow> {
    let rank = values.iter().take_while(|v| **v > 0.0).count();
    let start = 10usize;
    let mut end = rank / 4;
    if end < start + 4 {
        return Err(Error::DegenerateWindow { start, end });
    }
    let slope_at = |k: usize| -> f64 {
        // slope over [k/1.25, k*1.25]
        let lo = ((k as f64 / 1.25).floor() as usize).max(1);
        let hi = ((k as f64 * 1.25).ceil() as usize).min(rank);
        (values[hi - 1].ln() - values[lo - 1].ln()) / ((hi as f64).ln() - (lo as f64).ln())
    };
    let mut slopes: Vec<f64> = (start..=end).map(slope_at).collect();
    slopes.sort_by(f64::total_cmp);
    let median = slopes[slopes.len() / 2];
    while end > start + 4 {
        let s = slope_at(end);
        if (s - median).abs() <= 0.2 * median.abs() {
            break;
        }
        end -= 1;
    }
    Ok(FitWindow { start, end })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_power_laws() {
        let v: Vec<f64> = (1..=200).map(|k| (k as f64).powi(-2)).collect();
        let fit = fit_decay(&v, FitWindow::new(1, 200)).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        let v: Vec<f64> = (1..=200)
            .map(|k| 5.0 * (k as f64).powf(-8.0 / 3.0))
            .collect();
        let fit = fit_decay(&v, FitWindow::new(3, 150)).unwrap();
        assert!((fit.exponent - 8.0 / 3.0).abs() < 1e-12);
        assert!((fit.amplitude - 5.0).abs() < 1e-10);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let v: Vec<f64> = (1..=400)
            .map(|k| (k as f64).powi(-2) * (1.0 + 0.01 * rng.random_range(-1.0..1.0)))
            .collect();
        let fit = fit_decay(&v, FitWindow::new(10, 300)).unwrap();
        assert!((1.95..=2.05).contains(&fit.exponent), "{}", fit.exponent);
    }

    #[test]
    fn degenerate_windows() {
        let v = vec![1.0, 0.5, 0.25, 0.125, 0.0625, 0.03];
        assert!(fit_decay(&v, FitWindow::new(1, 4)).is_err());
        assert!(fit_decay(&v, FitWindow::new(0, 5)).is_err());
        assert!(fit_decay(&v, FitWindow::new(1, 9)).is_err());
    }

    #[test]
    fn auto_window_cuts_a_discretization_floor() {
        let mut v: Vec<f64> = (1..=400).map(|k| (k as f64).powi(-2)).collect();
        for (k, x) in v.iter_mut().enumerate().skip(60) {
            *x = 1.0 / 3600.0 * (-(k as f64 - 60.0) / 5.0).exp();
        }
        let w = auto_window(&v).unwrap();
        assert_eq!(w.start, 10);
        assert!(w.end <= 62, "{w:?}");
        assert!((fit_decay(&v, w).unwrap().exponent - 2.0).abs() < 0.1);
    }
}
