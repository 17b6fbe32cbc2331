use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geometry::coalescence_distance;
use super::wavefunction::ModelWavefunction;
use super::Vec3;
use crate::error::{Error, Result};

/// Worst excess of `|d(𝐱) - d(𝐲)| - |𝐱 - 𝐲|` for `d = d_c` and `d = λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub pairs: usize,
    pub violations: usize,
    pub worst_excess: f64,
    pub tolerance: f64,
}

impl LipschitzReport {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

fn random_point(rng: &mut ChaCha8Rng, scale: f64) -> Vec3 {
    [0, 1, 2].map(|_| rng.random_range(-scale..scale))
}

/// Random pairs of `N`-particle configurations; half the pairs are small
/// perturbations (`10^{-U(0,6)}`) so both scales are exercised.
pub fn lipschitz_check(
    particles: usize,
    pairs: usize,
    tolerance: f64,
    seed: u64,
) -> Result<LipschitzReport> {
    if particles < 2 {
        return Err(Error::invalid("particles", "need at least two"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for p in 0..pairs {
        let xs: Vec<Vec3> = (0..particles)
            .map(|_| random_point(&mut rng, 3.0))
            .collect();
        let ys: Vec<Vec3> = if p % 2 == 0 {
            (0..particles)
                .map(|_| random_point(&mut rng, 3.0))
                .collect()
        } else {
            let eps = 10f64.powf(-rng.random_range(0.0..6.0));
            xs.iter()
                .map(|x| {
                    let d = random_point(&mut rng, eps);
                    [x[0] + d[0], x[1] + d[1], x[2] + d[2]]
                })
                .collect()
        };
        let dist = xs
            .iter()
            .zip(&ys)
            .map(|(a, b)| (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        let n = particles - 1;
        let dx = coalescence_distance(&xs[..n], &xs[n]);
        let dy = coalescence_distance(&ys[..n], &ys[n]);
        for excess in [
            (dx.d_c - dy.d_c).abs() - dist,
            (dx.lambda - dy.lambda).abs() - dist,
        ] {
            worst = worst.max(excess);
            if excess > tolerance {
                violations += 1;
            }
        }
    }
    Ok(LipschitzReport {
        pairs,
        violations,
        worst_excess: worst,
        tolerance,
    })
}

/// Largest `|ψ|` over configurations with `x = x_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub probes: usize,
    pub max_abs: f64,
}

impl VanishingReport {
    pub fn pass(&self) -> bool {
        self.max_abs == 0.0
    }
}

/// Evaluate `ψ(x̂, x_k)` for random `x̂` and every `k`.
pub fn coalescence_probes(wf: &ModelWavefunction, count: usize, seed: u64) -> VanishingReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = wf.particles() - 1;
    let mut probes = 0;
    let mut max_abs = 0.0f64;
    for _ in 0..count {
        let others: Vec<Vec3> = (0..n).map(|_| random_point(&mut rng, 3.0)).collect();
        for xk in &others {
            max_abs = max_abs.max(wf.eval_psi(&others, xk).abs());
            probes += 1;
        }
    }
    VanishingReport { probes, max_abs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelConfig;

    #[test]
    fn distances_are_one_lipschitz() {
        for n in [2, 3] {
            let r = lipschitz_check(n, 10_000, 1e-12, 5).unwrap();
            assert!(r.pass(), "{r:?}");
            assert!(r.worst_excess <= 0.0);
        }
    }

    #[test]
    fn antisymmetric_models_vanish_and_generic_ones_do_not() {
        let wf = ModelWavefunction::new(ModelConfig::two_particle_antisymmetric(2.0)).unwrap();
        assert!(coalescence_probes(&wf, 500, 1).pass());
        let wf = ModelWavefunction::new(ModelConfig::two_particle(2.0, 1.0)).unwrap();
        assert!(!coalescence_probes(&wf, 50, 1).pass());
    }
}
