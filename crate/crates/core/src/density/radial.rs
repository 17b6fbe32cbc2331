use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::ModelWavefunction;
use crate::quadrature::{composite_gauss_legendre, gauss_legendre_on};

/// Tabulated `ρ(r)` of a rotation-invariant two-particle model, with linear
/// interpolation between equally spaced radii.
#[derive(Debug, Clone)]
pub struct RadialDensity {
    step: f64,
    values: Vec<f64>,
}

impl RadialDensity {
    /// Tabulate on `[0, extent]` with `points` radii. The inner integral runs
    /// over `|x̂| ∈ [0, extent]` and the pair distance, like the partial-wave kernels.
    pub fn tabulate(
        wf: &ModelWavefunction,
        extent: f64,
        points: usize,
        nodes: usize,
    ) -> Result<Self> {
        if wf.particles() != 2 || !wf.is_rotation_invariant() {
            return Err(Error::invalid(
                "model",
                "radial density needs a rotation-invariant two-particle model",
            ));
        }
        if points < 2 || !(extent > 0.0) {
            return Err(Error::invalid(
                "points",
                "need at least two radii on a positive extent",
            ));
        }
        let step = extent / (points - 1) as f64;
        let (r1s, w1s) = gauss_legendre_on(0.0, extent, nodes);
        let values = (0..points)
            .map(|i| {
                let r = i as f64 * step;
                let mut acc = 0.0;
                for (&r1, &w1) in r1s.iter().zip(&w1s) {
                    if r == 0.0 {
                        let psi = wf.eval_psi(&[[r1, 0.0, 0.0]], &[0.0; 3]);
                        acc += 4.0 * PI * w1 * r1 * r1 * psi * psi;
                        continue;
                    }
                    let (ss, ws) =
                        composite_gauss_legendre((r1 - r).abs(), r1 + r, &[1.0, 2.0], nodes);
                    for (&s, &w) in ss.iter().zip(&ws) {
                        let c = ((r1 * r1 + r * r - s * s) / (2.0 * r1 * r)).clamp(-1.0, 1.0);
                        let psi = wf
                            .eval_psi(&[[r1 * c, r1 * (1.0 - c * c).sqrt(), 0.0]], &[r, 0.0, 0.0]);
                        acc += 2.0 * PI * w1 * r1 * r1 * w * s / (r1 * r) * psi * psi;
                    }
                }
                acc
            })
            .collect();
        Ok(Self { step, values })
    }

    pub fn extent(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    /// `ρ(r)`, zero beyond the table.
    pub fn at(&self, r: f64) -> f64 {
        let t = r / self.step;
        let i = t.floor() as usize;
        if i + 1 >= self.values.len() {
            return if i + 1 == self.values.len() {
                self.values[i]
            } else {
                0.0
            };
        }
        let f = t - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    /// `∫ρ = 4π∫ρ(r) r² dr` by the trapezoid rule on the table.
    pub fn total(&self) -> f64 {
        let n = self.values.len();
        (0..n)
            .map(|i| {
                let r = i as f64 * self.step;
                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                w * self.values[i] * r * r
            })
            .sum::<f64>()
            * 4.0
            * PI
            * self.step
    }
}
