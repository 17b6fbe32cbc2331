use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::{kernel_matrix, SampleGrid};
use super::kernel::{synth_kernel, Amplitude, SyntheticCuspKernel, Trajectory};
use crate::error::{Error, Result};
use crate::spectra::{fit_decay, singular_values, DecayFit, FitWindow};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentLawConfig {
    pub dim: usize,
    pub alpha: f64,
    /// Midpoints per axis, shared by the `t` and `x` grids.
    pub resolution: usize,
    pub window: Option<FitWindow>,
}

impl ExponentLawConfig {
    pub fn new(dim: usize, alpha: f64, resolution: usize) -> Self {
        Self {
            dim,
            alpha,
            resolution,
            window: None,
        }
    }

    /// `1 + α/d`.
    pub fn predicted(&self) -> f64 {
        1.0 + self.alpha / self.dim as f64
    }

    fn rank(&self) -> usize {
        self.resolution.pow(self.dim as u32)
    }

    /// `[20, n/5]` for `d = 1`, `[10, n³/8]` for `d = 3`.
    pub fn default_window(&self) -> FitWindow {
        let rank = self.rank();
        match self.dim {
            1 => FitWindow::new(20, rank / 5),
            _ => FitWindow::new(10, rank / 8),
        }
    }

    fn validate(&self) -> Result<FitWindow> {
        if self.dim != 1 && self.dim != 3 {
            return Err(Error::invalid(
                "dim",
                format!("needs d = 1 or 3, got {}", self.dim),
            ));
        }
        let d = self.dim as f64;
        if !(self.alpha > -d / 2.0 && self.alpha <= 3.0) {
            return Err(Error::invalid(
                "alpha",
                format!("needs -d/2 < alpha <= 3, got {}", self.alpha),
            ));
        }
        let window = self.window.unwrap_or_else(|| self.default_window());
        if window.start < 1 || window.len() < 5 || 4 * window.end > self.rank() {
            return Err(Error::invalid(
                "resolution",
                format!(
                    "{} singular values cannot support the fit window [{}, {}]; need at least four times its end",
                    self.rank(),
                    window.start,
                    window.end
                ),
            ));
        }
        Ok(window)
    }

    /// `T(t, x) = e^{-|t|²/8} w(x) P_α(x - z(t))`, `z(t) = 0.05 + 0.97 t`, on
    /// `t, x ∈ [-π, π)^d`.
    pub fn kernel(&self) -> Result<SyntheticCuspKernel> {
        synth_kernel(
            self.dim,
            self.alpha,
            vec![Trajectory::scaled(vec![0.05; self.dim], 0.97)],
            Amplitude::default(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentLaw {
    pub config: ExponentLawConfig,
    pub predicted: f64,
    pub fit: DecayFit,
    pub values: Vec<f64>,
}

impl ExponentLaw {
    pub fn relative_error(&self) -> f64 {
        (self.fit.exponent - self.predicted).abs() / self.predicted
    }
}

/// Dense singular values of the synthetic kernel and their decay exponent.
pub fn exponent_law_experiment(config: &ExponentLawConfig) -> Result<ExponentLaw> {
    let window = config.validate()?;
    let kernel = config.kernel()?;
    let grid = SampleGrid::midpoint(config.dim, config.resolution, -PI, PI)?;
    let m = kernel_matrix(&kernel, &grid, &grid, None)?;
    let values = singular_values(m.view())?;
    let fit = fit_decay(&values, window)?;
    Ok(ExponentLaw {
        config: *config,
        predicted: config.predicted(),
        fit,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicted_exponents() {
        assert_eq!(ExponentLawConfig::new(1, 1.0, 2048).predicted(), 2.0);
        assert!((ExponentLawConfig::new(3, 1.0, 12).predicted() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn one_dim_abs_kernel_decays_at_rate_two() {
        let law = exponent_law_experiment(&ExponentLawConfig::new(1, 1.0, 1024)).unwrap();
        assert!(law.relative_error() < 0.1, "{}", law.fit.exponent);
    }

    #[test]
    fn rejects_unsupported_settings() {
        assert!(exponent_law_experiment(&ExponentLawConfig::new(2, 1.0, 64)).is_err());
        assert!(exponent_law_experiment(&ExponentLawConfig::new(1, 3.5, 2048)).is_err());
        assert!(exponent_law_experiment(&ExponentLawConfig::new(1, -0.5, 2048)).is_err());
        let mut c = ExponentLawConfig::new(1, 1.0, 512);
        c.window = Some(FitWindow::new(20, 400));
        assert!(exponent_law_experiment(&c).is_err());
    }
}
