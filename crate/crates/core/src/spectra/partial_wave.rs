//! Angular-momentum decomposition of `Γ = Ψ*Ψ` and `T = V*V` for
//! rotation-invariant two-particle models.
//!
//! A kernel `ψ(x₁, x)` depending only on `|x₁|, |x|` and `x̂₁·x̂` splits as
//! `Σ_{L,m} k_L(r₁, r) Y_{Lm}(x̂₁) Y*_{Lm}(x̂)` with
//! `k_L(r₁, r) = 2π ∫ ψ(r₁, r, c) P_L(c) dc`, so the singular values of `Ψ`
//! are those of the radial maps `k_L` (on `L²(r²dr)`), each with multiplicity
//! `2L + 1`. For `V = Ψ∇`, the gradient of `R(r)Y_{lm}` has components in the
//! `L = l ± 1` vector harmonics,
//!
//! ```text
//! ∇(R Y_lm) = -√((l+1)/(2l+1)) (R' - lR/r) Y^{l+1}_lm + √(l/(2l+1)) (R' + (l+1)R/r) Y^{l-1}_lm,
//! ```
//!
//! and moving the derivative onto the kernel by parts gives two stacked
//! radial blocks per channel `l`, again with multiplicity `2l + 1`.
//!
//! The angular integral is done in the pair distance `s = |x - x₁|` rather
//! than `c`, which turns the pair cusp into a smooth integrand.

use std::f64::consts::PI;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::linalg::singular_values;
use crate::error::{Error, Result};
use crate::model::ModelWavefunction;
use crate::quadrature::{composite_gauss_legendre, gauss_legendre_on, legendre_table};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialWaveConfig {
    /// Gauss–Legendre nodes on `[0, radial_extent]`.
    pub radial_nodes: usize,
    pub radial_extent: f64,
    /// Highest angular momentum kept in the kernel expansion.
    pub max_l: usize,
    /// Nodes per smooth piece of the pair-distance integral; raised to
    /// `max_l + 24` when smaller, since `P_L(c(s))` has degree `2L` in `s`.
    pub pair_nodes: usize,
}

impl Default for PartialWaveConfig {
    fn default() -> Self {
        Self {
            radial_nodes: 160,
            radial_extent: 6.0,
            max_l: 48,
            pair_nodes: 64,
        }
    }
}

impl PartialWaveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 4 || self.pair_nodes < 4 {
            return Err(Error::invalid(
                "partial_wave",
                "need at least 4 radial and pair nodes",
            ));
        }
        if !(self.radial_extent > 0.0) {
            return Err(Error::invalid("radial_extent", "must be positive"));
        }
        if self.max_l < 1 {
            return Err(Error::invalid(
                "max_l",
                "need at least one angular channel beyond L = 0",
            ));
        }
        Ok(())
    }
}

/// Radial kernel tables `k_L(r₁ᵢ, rⱼ)` and `∂_r k_L(r₁ᵢ, rⱼ)` on a shared grid.
#[derive(Debug, Clone)]
pub struct RadialKernels {
    pub radii: Vec<f64>,
    pub weights: Vec<f64>,
    /// `kernels[L][[i, j]] = k_L(r_i, r_j)`, row index for `x₁`.
    pub kernels: Vec<Array2<f64>>,
    /// `∂_r k_L`, derivative in the second (distinguished-particle) radius.
    pub derivatives: Vec<Array2<f64>>,
}

impl RadialKernels {
    pub fn build(wf: &ModelWavefunction, config: &PartialWaveConfig) -> Result<Self> {
        config.validate()?;
        if wf.particles() != 2 || !wf.is_rotation_invariant() {
            return Err(Error::invalid(
                "model",
                "partial-wave decomposition needs a rotation-invariant two-particle model",
            ));
        }
        let n = config.radial_nodes;
        let (radii, weights) = gauss_legendre_on(0.0, config.radial_extent, n);
        let lmax = config.max_l;
        let mut kernels = vec![Array2::zeros((n, n)); lmax + 1];
        let mut derivatives = vec![Array2::zeros((n, n)); lmax + 1];
        let pair_nodes = config.pair_nodes.max(lmax + 24);
        let mut p = vec![0.0; lmax + 1];
        let mut acc_k = vec![0.0; lmax + 1];
        let mut acc_d = vec![0.0; lmax + 1];
        for (i, &r1) in radii.iter().enumerate() {
            for (j, &r) in radii.iter().enumerate() {
                acc_k.iter_mut().for_each(|v| *v = 0.0);
                acc_d.iter_mut().for_each(|v| *v = 0.0);
                let (s_nodes, s_weights) =
                    composite_gauss_legendre((r1 - r).abs(), r1 + r, &[1.0, 2.0], pair_nodes);
                for (&s, &ws) in s_nodes.iter().zip(&s_weights) {
                    let c = ((r1 * r1 + r * r - s * s) / (2.0 * r1 * r)).clamp(-1.0, 1.0);
                    let x = [r, 0.0, 0.0];
                    let x1 = [r1 * c, r1 * (1.0 - c * c).sqrt(), 0.0];
                    let (psi, grad) = wf.eval_psi_and_grad(&[x1], &x)?;
                    let w = 2.0 * PI * ws * s / (r1 * r);
                    legendre_table(c, &mut p);
                    let (a, b) = (w * psi, w * grad[0]);
                    for l in 0..=lmax {
                        acc_k[l] += a * p[l];
                        acc_d[l] += b * p[l];
                    }
                }
                for l in 0..=lmax {
                    if !(acc_k[l].is_finite() && acc_d[l].is_finite()) {
                        return Err(Error::NonFiniteQuadrature { node: i * n + j });
                    }
                    kernels[l][[i, j]] = acc_k[l];
                    derivatives[l][[i, j]] = acc_d[l];
                }
            }
        }
        Ok(Self {
            radii,
            weights,
            kernels,
            derivatives,
        })
    }

    pub fn max_l(&self) -> usize {
        self.kernels.len() - 1
    }

    fn scale(&self, i: usize) -> f64 {
        self.weights[i].sqrt() * self.radii[i]
    }

    /// Nyström matrix of the channel-`L` radial map of `Ψ`.
    pub fn psi_channel(&self, l: usize) -> Array2<f64> {
        let n = self.radii.len();
        Array2::from_shape_fn((n, n), |(i, j)| {
            self.scale(i) * self.kernels[l][[i, j]] * self.scale(j)
        })
    }

    /// Stacked Nyström matrix of the channel-`l` radial map of `V`; needs
    /// `l + 1 ≤ max_l`.
    pub fn v_channel(&self, l: usize) -> Array2<f64> {
        let n = self.radii.len();
        let lf = l as f64;
        let up = ((lf + 1.0) / (2.0 * lf + 1.0)).sqrt();
        let down = (lf / (2.0 * lf + 1.0)).sqrt();
        let mut out = Array2::zeros((2 * n, n));
        for i in 0..n {
            for j in 0..n {
                let r = self.radii[j];
                let s = self.scale(i) * self.scale(j);
                let kp = &self.kernels[l + 1];
                let dp = &self.derivatives[l + 1];
                out[[i, j]] = up * s * (-dp[[i, j]] - (2.0 + lf) * kp[[i, j]] / r);
                if l >= 1 {
                    let km = &self.kernels[l - 1];
                    let dm = &self.derivatives[l - 1];
                    out[[n + i, j]] = down * s * (-dm[[i, j]] + (lf - 1.0) * km[[i, j]] / r);
                }
            }
        }
        out
    }
}

/// Singular values of one angular channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpectrum {
    pub l: usize,
    pub singular_values: Vec<f64>,
}

impl ChannelSpectrum {
    pub fn multiplicity(&self) -> usize {
        2 * self.l + 1
    }
}

/// Squared singular values of all channels, repeated by multiplicity and
/// sorted non-increasing: the eigenvalues of the full operator.
pub fn merge_channels(channels: &[ChannelSpectrum]) -> Vec<f64> {
    let mut out: Vec<f64> = channels
        .iter()
        .flat_map(|c| {
            c.singular_values
                .iter()
                .flat_map(move |s| std::iter::repeat_n(s * s, c.multiplicity()))
        })
        .collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Channel spectra of `Ψ` for `L = 0..=max_l`.
pub fn gamma_channels(kernels: &RadialKernels) -> Result<Vec<ChannelSpectrum>> {
    (0..=kernels.max_l())
        .map(|l| {
            Ok(ChannelSpectrum {
                l,
                singular_values: singular_values(kernels.psi_channel(l).view())?,
            })
        })
        .collect()
}

/// Channel spectra of `V` for `l = 0..max_l`.
pub fn tau_channels(kernels: &RadialKernels) -> Result<Vec<ChannelSpectrum>> {
    (0..kernels.max_l())
        .map(|l| {
            Ok(ChannelSpectrum {
                l,
                singular_values: singular_values(kernels.v_channel(l).view())?,
            })
        })
        .collect()
}

/// Eigenvalues of `Γ` and `T` for a rotation-invariant two-particle model.
#[derive(Debug, Clone)]
pub struct PartialWaveSpectra {
    pub gamma: Vec<f64>,
    pub tau: Vec<f64>,
}

pub fn partial_wave_spectra(
    wf: &ModelWavefunction,
    config: &PartialWaveConfig,
) -> Result<PartialWaveSpectra> {
    let kernels = RadialKernels::build(wf, config)?;
    Ok(PartialWaveSpectra {
        gamma: merge_channels(&gamma_channels(&kernels)?),
        tau: merge_channels(&tau_channels(&kernels)?),
    })
}
