use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::theta_radial;
use crate::quadrature::gauss_legendre;

/// Radial profile `f(r)` of a cusp function `u(x) = f(|x|) w(|x|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "alpha")]
pub enum RadialProfile {
    /// `e^{-r}`
    Exponential,
    /// `r^α`
    Power(f64),
    /// `1`, leaving only the smooth window.
    Flat,
}

/// A radial function on `ℝ^d`, `d ∈ {1, 3}`, supported in the ball of radius
/// `radius` and carrying the singularity order `alpha` at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialCuspFunction {
    pub dim: usize,
    pub alpha: f64,
    pub profile: RadialProfile,
    pub radius: f64,
}

impl RadialCuspFunction {
    pub fn new(dim: usize, alpha: f64, profile: RadialProfile) -> Result<Self> {
        if dim != 1 && dim != 3 {
            return Err(Error::invalid(
                "dim",
                format!("radial transforms need d = 1 or 3, got {dim}"),
            ));
        }
        if !(alpha > -(dim as f64)) {
            return Err(Error::invalid(
                "alpha",
                format!("needs alpha > -d, got {alpha}"),
            ));
        }
        Ok(Self {
            dim,
            alpha,
            profile,
            radius: PI,
        })
    }

    /// `e^{-|x|}` times the window, singularity order 1.
    pub fn exponential(dim: usize) -> Result<Self> {
        Self::new(dim, 1.0, RadialProfile::Exponential)
    }

    pub fn at(&self, r: f64) -> f64 {
        let w = theta_radial(2.0 * r / self.radius);
        let f = match self.profile {
            RadialProfile::Exponential => (-r).exp(),
            RadialProfile::Power(a) => r.powf(a),
            RadialProfile::Flat => 1.0,
        };
        f * w
    }

    /// Unitary transform `û(ξ) = (2π)^{-d/2} ∫ e^{-iξ·x} u(x) dx` at `|ξ| = xi`.
    pub fn transform(&self, xi: f64) -> f64 {
        let (r, w) = radial_rule(self.radius, xi);
        let mut acc = 0.0;
        for (&r, &w) in r.iter().zip(&w) {
            let u = self.at(r);
            acc += w
                * u
                * match self.dim {
                    1 => 2.0 * (xi * r).cos(),
                    _ => 4.0 * PI * r * r * sinc(xi * r),
                };
        }
        acc * (2.0 * PI).powf(-(self.dim as f64) / 2.0)
    }
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// Composite 16-point rule on `[0, R]`: panels shorter than a quarter period
/// of `cos(ξr)`, and geometric refinement toward `r = 0`.
fn radial_rule(radius: f64, xi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(16);
    let width = (radius / 64.0).min(PI / (2.0 * xi.max(1.0)));
    let panels = (radius / width).ceil() as usize;
    let h = radius / panels as f64;
    let mut edges = vec![0.0];
    edges.extend((0..40).rev().map(|k| h * 0.5f64.powi(k)));
    edges.extend((2..=panels).map(|k| k as f64 * h));
    let mut nodes = Vec::with_capacity(16 * edges.len());
    let mut weights = Vec::with_capacity(16 * edges.len());
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
    }
    (nodes, weights)
}

/// `n` log-spaced shell radii on `[lo, hi]`.
pub fn log_shells(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|k| lo * (step * k as f64).exp()).collect()
}

/// 40 shells on `[2, 200]`.
pub fn default_shells() -> Vec<f64> {
    log_shells(2.0, 200.0, 40)
}

/// Envelope of `|û|` on shells, with a least-squares fit of
/// `ln env ≈ c - s ln⟨ξ⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierDecay {
    pub shells: Vec<f64>,
    pub values: Vec<f64>,
    /// `max_{|η| ≥ |ξ|} |û(η)|` over the shells.
    pub envelope: Vec<f64>,
    pub exponent: f64,
    /// `α + d`.
    pub predicted: f64,
    pub residual: f64,
}

/// Decades of `|ξ|` required by [`fourier_decay_fit`].
pub const MIN_DECADES: f64 = 2.0;

pub fn fourier_decay_fit(u: &RadialCuspFunction, shells: &[f64]) -> Result<FourierDecay> {
    if shells.len() < 3
        || shells.iter().any(|s| !(*s > 0.0))
        || shells.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::invalid(
            "shells",
            "need at least 3 increasing positive radii",
        ));
    }
    let decades = (shells[shells.len() - 1] / shells[0]).log10();
    if decades < MIN_DECADES - 1e-9 {
        return Err(Error::InsufficientRange {
            decades,
            required: MIN_DECADES,
        });
    }
    let values: Vec<f64> = shells.iter().map(|&xi| u.transform(xi).abs()).collect();
    let mut envelope = values.clone();
    for k in (0..envelope.len() - 1).rev() {
        envelope[k] = envelope[k].max(envelope[k + 1]);
    }
    if envelope.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InsufficientRange {
            decades: 0.0,
            required: MIN_DECADES,
        });
    }
    let xs: Vec<f64> = shells.iter().map(|s| (1.0 + s * s).sqrt().ln()).collect();
    let ys: Vec<f64> = envelope.iter().map(|e| e.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();
    Ok(FourierDecay {
        shells: shells.to_vec(),
        values,
        envelope,
        exponent: -slope,
        predicted: u.alpha + u.dim as f64,
        residual,
    })
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_dim_exponential_matches_closed_form_at_large_frequency() {
        // û(ξ) = (2π)^{-3/2} 8π / (1 + |ξ|²)² without the window
        let u = RadialCuspFunction::exponential(3).unwrap();
        for xi in [150.0, 200.0] {
            let exact = (2.0 * PI).powf(-1.5) * 8.0 * PI / (1.0f64 + xi * xi).powi(2);
            assert!((u.transform(xi) / exact - 1.0).abs() < 2e-2);
        }
        let fit = fourier_decay_fit(&u, &default_shells()).unwrap();
        assert!((fit.exponent - 4.0).abs() < 0.2, "{}", fit.exponent);
        assert_eq!(fit.predicted, 4.0);
    }

    #[test]
    fn one_dim_exponential_decays_like_inverse_square() {
        let u = RadialCuspFunction::exponential(1).unwrap();
        let fit = fourier_decay_fit(&u, &default_shells()).unwrap();
        assert!((fit.exponent - 2.0).abs() < 0.2, "{}", fit.exponent);
    }

    #[test]
    fn transform_at_zero_is_the_mass() {
        let u = RadialCuspFunction::new(3, 0.0, RadialProfile::Flat).unwrap();
        // ∫ w = 4π ∫ r² θ(2r/π) dr, checked against a direct radial sum
        let (r, w) = radial_rule(PI, 0.0);
        let mass: f64 = r
            .iter()
            .zip(&w)
            .map(|(r, w)| 4.0 * PI * r * r * w * u.at(*r))
            .sum();
        assert!((u.transform(1e-12) - mass * (2.0 * PI).powf(-1.5)).abs() < 1e-12);
    }

    #[test]
    fn smooth_function_decays_faster_than_any_cusp() {
        let u = RadialCuspFunction::new(3, 0.0, RadialProfile::Flat).unwrap();
        let fit = fourier_decay_fit(&u, &default_shells()).unwrap();
        assert!(fit.exponent > u.alpha + 3.0 + 2.0, "{}", fit.exponent);
    }

    #[test]
    fn rejects_narrow_ranges() {
        let u = RadialCuspFunction::exponential(3).unwrap();
        assert!(matches!(
            fourier_decay_fit(&u, &log_shells(2.0, 100.0, 20)),
            Err(Error::InsufficientRange { .. })
        ));
        assert!(RadialCuspFunction::new(2, 1.0, RadialProfile::Flat).is_err());
    }
}
