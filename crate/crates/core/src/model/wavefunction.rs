use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cutoff::{theta_radial, theta_radial_derivative};
use super::geometry::coalescence_distance;
use super::jastrow::jastrow_f0;
use super::{norm, sub, Vec3};
use crate::error::{Error, Result};

/// Radial shape of the single-particle envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeKind {
    /// `exp(-β|x|²)`: smooth, so every cusp comes from the Jastrow factor.
    #[default]
    Gaussian,
    /// `exp(-β|x|)`: adds its own cusp at the nucleus.
    Slater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    #[default]
    Generic,
    /// Vanishes whenever `x = x_k` for some `k`.
    PairAntisymmetric,
}

fn yes() -> bool {
    true
}

fn default_beta_g() -> f64 {
    1.0
}

fn default_beta_h() -> f64 {
    0.5
}

/// Key-value description of a model wavefunction (TOML on disk).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Particle count `N ≥ 2`.
    pub particles: usize,
    /// Nuclear charge `Z > 0`.
    pub nuclear_charge: f64,
    #[serde(default)]
    pub envelope: EnvelopeKind,
    /// One exponent per particle (`x_1, …, x_{N-1}, x`); empty means all 1.
    #[serde(default)]
    pub exponents: Vec<f64>,
    #[serde(default = "yes")]
    pub nuclear_jastrow: bool,
    #[serde(default = "yes")]
    pub pair_jastrow: bool,
    #[serde(default)]
    pub symmetry: Symmetry,
    /// Exponent of `g` in the antisymmetric pair `g(x_k)h(x) - h(x_k)g(x)`.
    #[serde(default = "default_beta_g")]
    pub antisym_beta_g: f64,
    /// Exponent of `h` in the antisymmetric pair.
    #[serde(default = "default_beta_h")]
    pub antisym_beta_h: f64,
    #[serde(default)]
    pub label: String,
}

impl ModelConfig {
    /// Two particles, Gaussian envelopes with exponent `beta`, full Jastrow factor.
    pub fn two_particle(charge: f64, beta: f64) -> Self {
        Self {
            particles: 2,
            nuclear_charge: charge,
            envelope: EnvelopeKind::Gaussian,
            exponents: vec![beta, beta],
            nuclear_jastrow: true,
            pair_jastrow: true,
            symmetry: Symmetry::Generic,
            antisym_beta_g: default_beta_g(),
            antisym_beta_h: default_beta_h(),
            label: format!("two-particle Z={charge} beta={beta}"),
        }
    }

    /// Two particles, pair-antisymmetric, full Jastrow factor.
    pub fn two_particle_antisymmetric(charge: f64) -> Self {
        Self {
            symmetry: Symmetry::PairAntisymmetric,
            label: format!("two-particle antisymmetric Z={charge}"),
            ..Self::two_particle(charge, 1.0)
        }
    }

    pub fn from_toml_str(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|message| Error::Config {
            path: path.to_path_buf(),
            message,
        })
    }
}

/// `ψ = e^F · φ` with a Jastrow exponent `F` carrying the cusps and a smooth
/// (or Slater) envelope `φ`.
#[derive(Debug, Clone)]
pub struct ModelWavefunction {
    config: ModelConfig,
    exponents: Vec<f64>,
}

impl ModelWavefunction {
    pub fn new(config: ModelConfig) -> Result<Self> {
        if config.particles < 2 {
            return Err(Error::invalid(
                "particles",
                format!("need N ≥ 2, got {}", config.particles),
            ));
        }
        if !(config.nuclear_charge > 0.0) {
            return Err(Error::invalid(
                "nuclear_charge",
                format!("must be positive, got {}", config.nuclear_charge),
            ));
        }
        let exponents = if config.exponents.is_empty() {
            vec![1.0; config.particles]
        } else {
            config.exponents.clone()
        };
        if exponents.len() != config.particles {
            return Err(Error::invalid(
                "exponents",
                format!(
                    "expected {} values, got {}",
                    config.particles,
                    exponents.len()
                ),
            ));
        }
        if let Some(b) = exponents.iter().find(|b| !(**b > 0.0)) {
            return Err(Error::invalid(
                "exponents",
                format!("every exponent must be positive, got {b}"),
            ));
        }
        if config.symmetry == Symmetry::PairAntisymmetric {
            if !(config.antisym_beta_g > 0.0 && config.antisym_beta_h > 0.0) {
                return Err(Error::invalid(
                    "antisym_beta",
                    "antisymmetric exponents must be positive",
                ));
            }
            if config.antisym_beta_g == config.antisym_beta_h {
                return Err(Error::invalid(
                    "antisym_beta",
                    "g and h must differ or the model vanishes",
                ));
            }
        }
        Ok(Self { config, exponents })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn particles(&self) -> usize {
        self.config.particles
    }

    pub fn charge(&self) -> f64 {
        self.config.nuclear_charge
    }

    pub fn symmetry(&self) -> Symmetry {
        self.config.symmetry
    }

    /// Dimension of the integrated-out block `x̂`.
    pub fn hat_dim(&self) -> usize {
        3 * (self.config.particles - 1)
    }

    /// Smallest envelope exponent, which sets the spatial extent.
    pub fn min_exponent(&self) -> f64 {
        let mut m = self.exponents.iter().copied().fold(f64::INFINITY, f64::min);
        if self.config.symmetry == Symmetry::PairAntisymmetric {
            m = m
                .min(self.config.antisym_beta_g)
                .min(self.config.antisym_beta_h);
        }
        m
    }

    /// Every model in this family depends on positions only through `|x_j|`
    /// and `|x_j - x_k|`.
    pub fn is_rotation_invariant(&self) -> bool {
        true
    }

    fn check_len(&self, others: &[Vec3]) {
        assert_eq!(
            others.len(),
            self.config.particles - 1,
            "expected {} other positions",
            self.config.particles - 1
        );
    }

    /// Jastrow exponent `F` with the configured terms switched on.
    pub fn log_jastrow(&self, others: &[Vec3], x: &Vec3) -> f64 {
        let z = self.config.nuclear_charge;
        let mut f = 0.0;
        if self.config.nuclear_jastrow {
            f += cut_norm(x) * (-0.5 * z);
            f += others.iter().map(cut_norm).sum::<f64>() * (-0.5 * z);
        }
        if self.config.pair_jastrow {
            let mut pair: f64 = others.iter().map(|xk| cut_norm(&sub(x, xk))).sum();
            for (j, xj) in others.iter().enumerate() {
                for xk in &others[j + 1..] {
                    pair += cut_norm(&sub(xj, xk));
                }
            }
            f += 0.25 * pair;
        }
        f
    }

    fn grad_log_jastrow(&self, others: &[Vec3], x: &Vec3) -> Vec3 {
        let mut g = [0.0; 3];
        if self.config.nuclear_jastrow {
            axpy(&mut g, -0.5 * self.config.nuclear_charge, &grad_cut_norm(x));
        }
        if self.config.pair_jastrow {
            for xk in others {
                axpy(&mut g, 0.25, &grad_cut_norm(&sub(x, xk)));
            }
        }
        g
    }

    fn radial_envelope(&self, beta: f64, r2: f64) -> f64 {
        match self.config.envelope {
            EnvelopeKind::Gaussian => (-beta * r2).exp(),
            EnvelopeKind::Slater => (-beta * r2.sqrt()).exp(),
        }
    }

    /// Smooth part `φ` (everything except `e^F`).
    pub fn envelope(&self, others: &[Vec3], x: &Vec3) -> f64 {
        self.check_len(others);
        match self.config.symmetry {
            Symmetry::Generic => {
                let mut v = self.radial_envelope(self.exponents[others.len()], sq(x));
                for (xk, b) in others.iter().zip(&self.exponents) {
                    v *= self.radial_envelope(*b, sq(xk));
                }
                v
            }
            Symmetry::PairAntisymmetric => {
                let (bg, bh) = (self.config.antisym_beta_g, self.config.antisym_beta_h);
                let (gx, hx) = (
                    self.radial_envelope(bg, sq(x)),
                    self.radial_envelope(bh, sq(x)),
                );
                others
                    .iter()
                    .map(|xk| {
                        let r2 = sq(xk);
                        self.radial_envelope(bg, r2) * hx - self.radial_envelope(bh, r2) * gx
                    })
                    .product()
            }
        }
    }

    fn grad_radial_envelope(&self, beta: f64, x: &Vec3) -> Vec3 {
        let r2 = sq(x);
        match self.config.envelope {
            EnvelopeKind::Gaussian => {
                let c = -2.0 * beta * (-beta * r2).exp();
                [c * x[0], c * x[1], c * x[2]]
            }
            EnvelopeKind::Slater => {
                let r = r2.sqrt();
                let c = -beta * (-beta * r).exp() / r;
                [c * x[0], c * x[1], c * x[2]]
            }
        }
    }

    fn grad_envelope(&self, others: &[Vec3], x: &Vec3) -> Vec3 {
        match self.config.symmetry {
            Symmetry::Generic => {
                let rest: f64 = others
                    .iter()
                    .zip(&self.exponents)
                    .map(|(xk, b)| self.radial_envelope(*b, sq(xk)))
                    .product();
                let g = self.grad_radial_envelope(self.exponents[others.len()], x);
                [rest * g[0], rest * g[1], rest * g[2]]
            }
            Symmetry::PairAntisymmetric => {
                let (bg, bh) = (self.config.antisym_beta_g, self.config.antisym_beta_h);
                let (gx, hx) = (
                    self.radial_envelope(bg, sq(x)),
                    self.radial_envelope(bh, sq(x)),
                );
                let (dgx, dhx) = (
                    self.grad_radial_envelope(bg, x),
                    self.grad_radial_envelope(bh, x),
                );
                let factors: Vec<(f64, f64, f64)> = others
                    .iter()
                    .map(|xk| {
                        let r2 = sq(xk);
                        let (gk, hk) = (self.radial_envelope(bg, r2), self.radial_envelope(bh, r2));
                        (gk * hx - hk * gx, gk, hk)
                    })
                    .collect();
                let mut out = [0.0; 3];
                for (i, &(_, gk, hk)) in factors.iter().enumerate() {
                    let rest: f64 = factors
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, f)| f.0)
                        .product();
                    for a in 0..3 {
                        out[a] += rest * (gk * dhx[a] - hk * dgx[a]);
                    }
                }
                out
            }
        }
    }

    /// `ψ(x̂, x)`.
    pub fn eval_psi(&self, others: &[Vec3], x: &Vec3) -> f64 {
        self.log_jastrow(others, x).exp() * self.envelope(others, x)
    }

    /// `∇_x ψ(x̂, x)`; undefined on the coalescence set.
    pub fn eval_grad_psi(&self, others: &[Vec3], x: &Vec3) -> Result<Vec3> {
        self.eval_psi_and_grad(others, x).map(|(_, g)| g)
    }

    /// `(ψ, ∇_x ψ)` in one pass.
    pub fn eval_psi_and_grad(&self, others: &[Vec3], x: &Vec3) -> Result<(f64, Vec3)> {
        self.check_len(others);
        let dist = coalescence_distance(others, x);
        if dist.d_c == 0.0 {
            return Err(Error::SingularPoint { distance: dist.d_c });
        }
        let ef = self.log_jastrow(others, x).exp();
        let env = self.envelope(others, x);
        let gf = self.grad_log_jastrow(others, x);
        let ge = self.grad_envelope(others, x);
        Ok((ef * env, [0, 1, 2].map(|a| ef * (env * gf[a] + ge[a]))))
    }

    /// `e^{-F₀(x)} ψ(x̂, x)`, with `F₀` always built from the model's charge.
    pub fn eval_reduced(&self, others: &[Vec3], x: &Vec3) -> f64 {
        (-jastrow_f0(x, self.config.nuclear_charge)).exp() * self.eval_psi(others, x)
    }
}

fn sq(v: &Vec3) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

fn cut_norm(v: &Vec3) -> f64 {
    let r = norm(v);
    r * theta_radial(r)
}

/// `∇(|y|θ(y)) = ŷ (θ + rθ')`, zero at the origin by convention.
fn grad_cut_norm(y: &Vec3) -> Vec3 {
    let r = norm(y);
    if r == 0.0 || r >= 2.0 {
        return [0.0; 3];
    }
    let c = (theta_radial(r) + r * theta_radial_derivative(r)) / r;
    [c * y[0], c * y[1], c * y[2]]
}

fn axpy(acc: &mut Vec3, a: f64, v: &Vec3) {
    for i in 0..3 {
        acc[i] += a * v[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::jastrow_f;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, scale: f64) -> Vec3 {
        [0.0; 3].map(|_: f64| rng.random_range(-scale..scale))
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut cfg = ModelConfig::two_particle(2.0, 1.0);
        cfg.exponents = vec![1.0, 0.0];
        assert!(matches!(
            ModelWavefunction::new(cfg),
            Err(Error::InvalidParameter { .. })
        ));
        let mut cfg = ModelConfig::two_particle(2.0, 1.0);
        cfg.exponents = vec![1.0];
        assert!(ModelWavefunction::new(cfg).is_err());
        let mut cfg = ModelConfig::two_particle(2.0, 1.0);
        cfg.particles = 1;
        assert!(ModelWavefunction::new(cfg).is_err());
    }

    #[test]
    fn antisymmetric_vanishes_on_coalescence() {
        let wf = ModelWavefunction::new(ModelConfig::two_particle_antisymmetric(2.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x1 = random_point(&mut rng, 3.0);
            assert_eq!(wf.eval_psi(&[x1], &x1), 0.0);
        }
        let mut cfg = ModelConfig::two_particle_antisymmetric(2.0);
        cfg.particles = 3;
        cfg.exponents = vec![1.0; 3];
        let wf3 = ModelWavefunction::new(cfg).unwrap();
        let (a, b) = (random_point(&mut rng, 2.0), random_point(&mut rng, 2.0));
        assert_eq!(wf3.eval_psi(&[a, b], &a), 0.0);
        assert_eq!(wf3.eval_psi(&[a, b], &b), 0.0);
    }

    #[test]
    fn jastrow_free_gaussian_is_positive() {
        let mut cfg = ModelConfig::two_particle(2.0, 0.7);
        cfg.nuclear_jastrow = false;
        cfg.pair_jastrow = false;
        let wf = ModelWavefunction::new(cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let (a, b) = (random_point(&mut rng, 4.0), random_point(&mut rng, 4.0));
            assert!(wf.eval_psi(&[a], &b) > 0.0);
        }
        let g = wf
            .eval_grad_psi(&[[0.3, 0.1, 0.2]], &[1e-3, 0.0, 0.0])
            .unwrap();
        // gradient of exp(-β|x|²) is O(|x|) near the origin
        assert!(g.iter().all(|v| v.abs() < 1e-2));
    }

    #[test]
    fn generic_matches_direct_recomposition() {
        let wf = ModelWavefunction::new(ModelConfig::two_particle(2.0, 1.0)).unwrap();
        let x1 = [0.4, -0.3, 0.2];
        let x = [0.1, 0.5, -0.6];
        let f = jastrow_f(&[x1], &x, 2.0);
        let env = (-(sq(&x1) + sq(&x))).exp();
        assert!((wf.eval_psi(&[x1], &x) - f.exp() * env).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let models = [
            ModelConfig::two_particle(2.0, 1.0),
            ModelConfig::two_particle_antisymmetric(2.0),
            ModelConfig {
                envelope: EnvelopeKind::Slater,
                ..ModelConfig::two_particle(1.0, 0.8)
            },
        ];
        for cfg in models {
            let wf = ModelWavefunction::new(cfg).unwrap();
            let mut checked = 0;
            while checked < 100 {
                let x1 = random_point(&mut rng, 2.5);
                let x = random_point(&mut rng, 2.5);
                if coalescence_distance(&[x1], &x).d_c < 0.05 {
                    continue;
                }
                let g = wf.eval_grad_psi(&[x1], &x).unwrap();
                let h = 1e-5;
                for a in 0..3 {
                    let (mut p, mut m) = (x, x);
                    p[a] += h;
                    m[a] -= h;
                    let fd = (wf.eval_psi(&[x1], &p) - wf.eval_psi(&[x1], &m)) / (2.0 * h);
                    let scale = g.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-3);
                    assert!((fd - g[a]).abs() <= 1e-6 * scale, "fd {fd} vs {}", g[a]);
                }
                checked += 1;
            }
        }
    }

    #[test]
    fn gradient_rejects_coalescence() {
        let wf = ModelWavefunction::new(ModelConfig::two_particle(2.0, 1.0)).unwrap();
        let x1 = [0.2, 0.3, 0.4];
        assert!(matches!(
            wf.eval_grad_psi(&[x1], &x1),
            Err(Error::SingularPoint { .. })
        ));
        assert!(wf.eval_grad_psi(&[x1], &[0.0; 3]).is_err());
    }

    /// `(D₊ + D₋) / 2ψ` from one-sided radial derivatives on opposite sides of a
    /// coalescence point; the smooth part cancels and the cusp slope remains.
    fn cusp_slope(f: impl Fn(&Vec3) -> f64, center: &Vec3, dir: &Vec3, eps: f64) -> f64 {
        let at = |t: f64| f(&[0, 1, 2].map(|a| center[a] + t * dir[a]));
        let d_plus = (at(2.0 * eps) - at(eps)) / eps;
        let d_minus = (at(-2.0 * eps) - at(-eps)) / eps;
        (d_plus + d_minus) / (2.0 * f(center))
    }

    #[test]
    fn cusp_slopes_follow_jastrow_coefficients() {
        let wf = ModelWavefunction::new(ModelConfig::two_particle(2.0, 1.0)).unwrap();
        let x1 = [0.6, -0.2, 0.3];
        let dir = [0.6, 0.0, 0.8];
        let mut last = 0.0;
        for j in 3..8 {
            let eps = 10f64.powi(-j);
            last = cusp_slope(|x| wf.eval_psi(&[x1], x), &x1, &dir, eps);
        }
        assert!((last - 0.25).abs() < 1e-4, "pair slope {last}");
        let nuclear = cusp_slope(|x| wf.eval_psi(&[x1], x), &[0.0; 3], &dir, 1e-6);
        assert!((nuclear + 1.0).abs() < 1e-4, "nuclear slope {nuclear}");
        // same slopes on e^F alone
        let jas = cusp_slope(|x| wf.log_jastrow(&[x1], x).exp(), &x1, &dir, 1e-6);
        assert!((jas - 0.25).abs() < 1e-4);
    }

    #[test]
    fn reduced_identities() {
        let wf = ModelWavefunction::new(ModelConfig::two_particle(2.0, 1.0)).unwrap();
        let x1 = [0.5, 0.5, 0.5];
        let far = [2.5, 0.1, 0.0];
        assert_eq!(wf.eval_reduced(&[x1], &far), wf.eval_psi(&[x1], &far));
        assert_eq!(
            wf.eval_reduced(&[x1], &[0.0; 3]),
            wf.eval_psi(&[x1], &[0.0; 3])
        );
        let x = [0.3, -0.1, 0.2];
        let back = wf.eval_reduced(&[x1], &x) * jastrow_f0(&x, 2.0).exp();
        assert!((back - wf.eval_psi(&[x1], &x)).abs() < 1e-15);
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = ModelConfig::two_particle_antisymmetric(3.0);
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ModelConfig::from_toml_str(&text).unwrap(), cfg);
        assert!(
            ModelConfig::from_toml_str("particles = 2\nnuclear_charge = 1.0\nbogus = 3").is_err()
        );
    }
}
