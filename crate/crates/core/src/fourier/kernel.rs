use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::theta_radial;

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// `z(t) = offset + L t` with `L` stored row-major as `d × l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub offset: Vec<f64>,
    pub linear: Vec<f64>,
    pub t_dim: usize,
}

impl Trajectory {
    pub fn fixed(point: Vec<f64>, t_dim: usize) -> Self {
        let d = point.len();
        Self {
            offset: point,
            linear: vec![0.0; d * t_dim],
            t_dim,
        }
    }

    /// `z(t) = offset + scale·t`, needs `l = d`.
    pub fn scaled(offset: Vec<f64>, scale: f64) -> Self {
        let d = offset.len();
        let mut linear = vec![0.0; d * d];
        for i in 0..d {
            linear[i * d + i] = scale;
        }
        Self {
            offset,
            linear,
            t_dim: d,
        }
    }

    /// Offset uniform in `[-1/2, 1/2]^d`, linear part with entries uniform in
    /// `[-1, 1]` plus `0.9` on the diagonal.
    pub fn random(rng: &mut impl Rng, dim: usize, t_dim: usize) -> Self {
        let offset = (0..dim).map(|_| rng.random_range(-0.5..0.5)).collect();
        let linear = (0..dim * t_dim)
            .map(|k| {
                let diag = if k / t_dim == k % t_dim { 0.9 } else { 0.0 };
                diag + rng.random_range(-0.3..0.3)
            })
            .collect();
        Self {
            offset,
            linear,
            t_dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn at(&self, t: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.linear[i * self.t_dim..(i + 1) * self.t_dim];
            *o = self.offset[i] + row.iter().zip(t).map(|(a, b)| a * b).sum::<f64>();
        }
    }
}

/// `g(t) = scale · exp(-|t|² / (2 width²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub scale: f64,
    pub width: f64,
}

impl Default for Amplitude {
    fn default() -> Self {
        Self {
            scale: 1.0,
            width: 2.0,
        }
    }
}

impl Amplitude {
    pub fn at(&self, t: &[f64]) -> f64 {
        let r2: f64 = t.iter().map(|c| c * c).sum();
        self.scale * (-r2 / (2.0 * self.width * self.width)).exp()
    }
}

fn is_even_integer(alpha: f64) -> bool {
    alpha.fract() == 0.0 && (alpha as i64) % 2 == 0
}

/// Local profile with a singularity of order exactly `alpha` at `u = 0`.
///
/// `|u|^α` unless `α` is an even integer, where `|u|^α` is smooth; then
/// `e^{-|u|} u_1 |u|^{α-1}`.
pub fn cusp_profile(alpha: f64, u: &[f64]) -> f64 {
    let r = euclid(u);
    if is_even_integer(alpha) {
        if r == 0.0 {
            return 0.0;
        }
        (-r).exp() * u[0] * r.powf(alpha - 1.0)
    } else {
        r.powf(alpha)
    }
}

/// Synthetic kernel `T(t, x) = g(t) · w(x) · Σ_k P_α(x - z_k(t))` with a smooth
/// radial window `w` vanishing outside the ball of radius `support_radius`.
/// With no trajectories the sum is replaced by 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticCuspKernel {
    pub dim: usize,
    pub t_dim: usize,
    pub alpha: f64,
    pub trajectories: Vec<Trajectory>,
    pub amplitude: Amplitude,
    pub support_radius: f64,
}

pub fn synth_kernel(
    dim: usize,
    alpha: f64,
    trajectories: Vec<Trajectory>,
    amplitude: Amplitude,
) -> Result<SyntheticCuspKernel> {
    if dim == 0 {
        return Err(Error::invalid("dim", "must be positive"));
    }
    if !(alpha > -(dim as f64) / 2.0) || !alpha.is_finite() {
        return Err(Error::invalid(
            "alpha",
            format!("needs alpha > -d/2 = {}, got {alpha}", -(dim as f64) / 2.0),
        ));
    }
    let first = trajectories
        .first()
        .ok_or_else(|| Error::invalid("trajectories", "need at least one trajectory"))?;
    let t_dim = first.t_dim;
    if t_dim == 0 {
        return Err(Error::invalid(
            "trajectories",
            "parameter dimension must be positive",
        ));
    }
    for z in &trajectories {
        if z.dim() != dim || z.t_dim != t_dim || z.linear.len() != dim * t_dim {
            return Err(Error::DimensionMismatch(format!(
                "trajectory maps R^{} -> R^{}, kernel needs R^{t_dim} -> R^{dim}",
                z.t_dim,
                z.dim()
            )));
        }
    }
    if !(amplitude.scale >= 0.0 && amplitude.width > 0.0) {
        return Err(Error::invalid(
            "amplitude",
            "needs scale >= 0 and width > 0",
        ));
    }
    Ok(SyntheticCuspKernel {
        dim,
        t_dim,
        alpha,
        trajectories,
        amplitude,
        support_radius: std::f64::consts::PI,
    })
}

impl SyntheticCuspKernel {
    /// `T(t, x) = g(t) w(x)`, a rank-one kernel without singularities.
    pub fn smooth(dim: usize, t_dim: usize, amplitude: Amplitude) -> Self {
        Self {
            dim,
            t_dim,
            alpha: 0.0,
            trajectories: Vec::new(),
            amplitude,
            support_radius: std::f64::consts::PI,
        }
    }

    pub fn with_support_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("support_radius", "must be positive"));
        }
        self.support_radius = radius;
        Ok(self)
    }

    /// Equal to 1 on `|x| ≤ R/2`, zero for `|x| ≥ R`.
    pub fn window(&self, x: &[f64]) -> f64 {
        theta_radial(2.0 * euclid(x) / self.support_radius)
    }

    pub fn eval(&self, t: &[f64], x: &[f64]) -> f64 {
        let w = self.window(x);
        if w == 0.0 {
            return 0.0;
        }
        let g = self.amplitude.at(t);
        if self.trajectories.is_empty() {
            return g * w;
        }
        let mut z = [0.0; 8];
        let mut u = [0.0; 8];
        let z = &mut z[..self.dim];
        let u = &mut u[..self.dim];
        let mut sum = 0.0;
        for traj in &self.trajectories {
            traj.at(t, z);
            for i in 0..self.dim {
                u[i] = x[i] - z[i];
            }
            sum += cusp_profile(self.alpha, u);
        }
        g * w * sum
    }

    /// Distance from `x` to the nearest singular point at parameter `t`.
    pub fn singular_distance(&self, t: &[f64], x: &[f64]) -> f64 {
        let mut z = vec![0.0; self.dim];
        self.trajectories
            .iter()
            .map(|traj| {
                traj.at(t, &mut z);
                euclid(&x.iter().zip(&z).map(|(a, b)| a - b).collect::<Vec<_>>())
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `g(t) (1 + Σ_k (1 ∧ |x - z_k(t)|)^{α - order})`.
    pub fn envelope(&self, t: &[f64], x: &[f64], order: usize) -> f64 {
        self.envelope_for_order(self.alpha, t, x, order)
    }

    fn envelope_for_order(&self, alpha: f64, t: &[f64], x: &[f64], order: usize) -> f64 {
        let mut z = vec![0.0; self.dim];
        let sum: f64 = self
            .trajectories
            .iter()
            .map(|traj| {
                traj.at(t, &mut z);
                let r = euclid(&x.iter().zip(&z).map(|(a, b)| a - b).collect::<Vec<_>>());
                r.min(1.0).powf(alpha - order as f64)
            })
            .sum();
        self.amplitude.at(t) * (1.0 + sum)
    }
}

/// Largest ratio `|∂^j T| / envelope` seen for each derivative order `0, 1, 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelEnvelopeReport {
    pub samples: usize,
    pub max_ratio: [f64; 3],
    pub bound: f64,
    pub pass: bool,
}

/// Constant absorbed into `A(t, x)` by [`check_kernel_envelope`].
pub const DEFAULT_ENVELOPE_BOUND: f64 = 1e4;

/// Finite-difference check of the derivative envelope on random samples.
///
/// Half the samples sit at distance `10^{-U(0,3)}` from a random singular
/// point, the rest are uniform in the ball of radius `support_radius`.
/// The difference step is `10^{-3}` times the distance to the singular set.
pub fn check_kernel_envelope(
    kernel: &SyntheticCuspKernel,
    samples: usize,
    bound: f64,
    seed: u64,
) -> Result<KernelEnvelopeReport> {
    check_envelope_for_order(kernel, kernel.alpha, samples, bound, seed)
}

fn check_envelope_for_order(
    kernel: &SyntheticCuspKernel,
    alpha: f64,
    samples: usize,
    bound: f64,
    seed: u64,
) -> Result<KernelEnvelopeReport> {
    if samples == 0 {
        return Err(Error::invalid("samples", "must be positive"));
    }
    let d = kernel.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = [0.0f64; 3];
    let mut t = vec![0.0; kernel.t_dim];
    let mut x = vec![0.0; d];
    let mut z = vec![0.0; d];
    let r = kernel.support_radius;
    for s in 0..samples {
        for c in t.iter_mut() {
            *c = rng.random_range(-r..r);
        }
        let dir = random_direction(&mut rng, d);
        if s % 2 == 0 && !kernel.trajectories.is_empty() {
            let k = rng.random_range(0..kernel.trajectories.len());
            kernel.trajectories[k].at(&t, &mut z);
            let delta = 10f64.powf(-rng.random_range(0.0..3.0));
            for i in 0..d {
                x[i] = z[i] + delta * dir[i];
            }
        } else {
            let rad = r * rng.random::<f64>();
            for i in 0..d {
                x[i] = rad * dir[i];
            }
        }
        let dist = kernel.singular_distance(&t, &x);
        if dist < 1e-4 {
            continue;
        }
        let h = 1e-3 * dist.min(1.0);
        let f = |p: &[f64]| kernel.eval(&t, p);
        let derivs = finite_differences(&f, &x, h);
        for (order, value) in derivs.iter().enumerate() {
            let env = kernel.envelope_for_order(alpha, &t, &x, order);
            if env > 0.0 {
                max_ratio[order] = max_ratio[order].max(value / env);
            } else if *value > 0.0 {
                max_ratio[order] = f64::INFINITY;
            }
        }
    }
    let pass = max_ratio.iter().all(|m| m.is_finite() && *m <= bound);
    Ok(KernelEnvelopeReport {
        samples,
        max_ratio,
        bound,
        pass,
    })
}

fn random_direction(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = euclid(&v);
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// `[|f|, max_i |∂_i f|, max_{ij} |∂_i ∂_j f|]` by central differences.
fn finite_differences(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> [f64; 3] {
    let d = x.len();
    let f0 = f(x);
    let mut p = x.to_vec();
    let shifted = |p: &mut Vec<f64>, moves: &[(usize, f64)]| {
        for &(i, s) in moves {
            p[i] = x[i] + s;
        }
        let v = f(p);
        for &(i, _) in moves {
            p[i] = x[i];
        }
        v
    };
    let mut first = 0.0f64;
    let mut second = 0.0f64;
    for i in 0..d {
        let fp = shifted(&mut p, &[(i, h)]);
        let fm = shifted(&mut p, &[(i, -h)]);
        first = first.max(((fp - fm) / (2.0 * h)).abs());
        second = second.max(((fp - 2.0 * f0 + fm) / (h * h)).abs());
        for j in i + 1..d {
            let pp = shifted(&mut p, &[(i, h), (j, h)]);
            let pm = shifted(&mut p, &[(i, h), (j, -h)]);
            let mp = shifted(&mut p, &[(i, -h), (j, h)]);
            let mm = shifted(&mut p, &[(i, -h), (j, -h)]);
            second = second.max(((pp - pm - mp + mm) / (4.0 * h * h)).abs());
        }
    }
    [f0.abs(), first, second]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn static_kernel(alpha: f64) -> SyntheticCuspKernel {
        synth_kernel(
            1,
            alpha,
            vec![Trajectory::fixed(vec![0.0], 1)],
            Amplitude::default(),
        )
        .unwrap()
    }

    #[test]
    fn static_abs_kernel_factorizes() {
        let k = static_kernel(1.0);
        let g = Amplitude::default().at(&[0.3]);
        for x in [-0.7, 0.2, 1.1] {
            assert!((k.eval(&[0.3], &[x]) - g * x.abs()).abs() < 1e-15);
        }
        // first derivative jumps by 2g at the origin
        let h = 1e-6;
        let right = (k.eval(&[0.3], &[2.0 * h]) - k.eval(&[0.3], &[h])) / h;
        let left = (k.eval(&[0.3], &[-h]) - k.eval(&[0.3], &[-2.0 * h])) / h;
        assert!((right - left - 2.0 * g).abs() < 1e-6);
        assert_eq!(k.eval(&[0.0], &[3.5]), 0.0);
    }

    #[test]
    fn even_orders_use_the_odd_profile() {
        // α = 0: bounded with a jump
        let k = static_kernel(0.0);
        let a = k.eval(&[0.0], &[1e-9]);
        let b = k.eval(&[0.0], &[-1e-9]);
        assert!((a - 1.0).abs() < 1e-8 && (b + 1.0).abs() < 1e-8);
        // α = 2: continuous first derivative, jump in the second
        let k = static_kernel(2.0);
        let h = 1e-4;
        let d2 = |x: f64| {
            (k.eval(&[0.0], &[x + h]) - 2.0 * k.eval(&[0.0], &[x]) + k.eval(&[0.0], &[x - h]))
                / (h * h)
        };
        assert!((d2(0.01) - 2.0).abs() < 0.1);
        assert!((d2(-0.01) + 2.0).abs() < 0.1);
    }

    #[test]
    fn rejects_bad_parameters() {
        let z = || vec![Trajectory::fixed(vec![0.0], 1)];
        assert!(synth_kernel(1, -0.5, z(), Amplitude::default()).is_err());
        assert!(synth_kernel(1, -0.49, z(), Amplitude::default()).is_ok());
        assert!(synth_kernel(3, 0.5, z(), Amplitude::default()).is_err());
        assert!(synth_kernel(1, 1.0, vec![], Amplitude::default()).is_err());
    }

    #[test]
    fn envelope_holds_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (d, alpha) in [(1, 0.5), (1, 1.0), (1, 2.0), (3, 1.0), (3, -0.4)] {
            let trajs = (0..2).map(|_| Trajectory::random(&mut rng, d, 1)).collect();
            let k = synth_kernel(d, alpha, trajs, Amplitude::default()).unwrap();
            let report = check_kernel_envelope(&k, 500, DEFAULT_ENVELOPE_BOUND, 7).unwrap();
            assert!(report.pass, "d={d} alpha={alpha}: {:?}", report.max_ratio);
        }
    }

    #[test]
    fn envelope_detects_understated_order() {
        let k = static_kernel(0.5);
        let report = check_envelope_for_order(&k, 1.5, 500, 100.0, 1).unwrap();
        assert!(!report.pass);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn profile_is_homogeneous_near_the_singularity(alpha in 0.1f64..3.0, u in -1.0f64..1.0, s in 0.01f64..1.0) {
            prop_assume!(u.abs() > 1e-3 && !is_even_integer(alpha));
            let a = cusp_profile(alpha, &[s * u]);
            let b = s.powf(alpha) * cusp_profile(alpha, &[u]);
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
        }

        #[test]
        fn kernel_vanishes_outside_the_window(alpha in 0.5f64..2.5, t in -3.0f64..3.0, x in 3.15f64..10.0) {
            let k = synth_kernel(1, alpha, vec![Trajectory::scaled(vec![0.05], 0.97)], Amplitude::default()).unwrap();
            prop_assert_eq!(k.eval(&[t], &[x]), 0.0);
            prop_assert_eq!(k.eval(&[t], &[-x]), 0.0);
        }
    }
}
