//! Quadrature rules: Gauss–Legendre on intervals and tensor boxes, shifted
//! rank-1 lattice points for higher-dimensional boxes, cusp-centred
//! spherical rules, and rules on balls.

use std::borrow::Cow;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|t| half * t).collect(),
    )
}

/// Composite Gauss–Legendre rule: `[a, b]` split at `breaks` (those strictly
/// inside), `n` nodes per piece.
pub fn composite_gauss_legendre(a: f64, b: f64, breaks: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&c| c > a && c < b).collect();
    inner.sort_by(f64::total_cmp);
    cuts.extend(inner);
    cuts.push(b);
    let mut nodes = Vec::with_capacity(n * (cuts.len() - 1));
    let mut weights = Vec::with_capacity(n * (cuts.len() - 1));
    for pair in cuts.windows(2) {
        let (x, w) = gauss_legendre_on(pair[0], pair[1], n);
        nodes.extend(x);
        weights.extend(w);
    }
    (nodes, weights)
}

/// Values `P_0(x), ..., P_{max_l}(x)` written into `out`.
pub fn legendre_table(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for l in 2..out.len() {
        let lf = l as f64;
        out[l] = ((2.0 * lf - 1.0) * x * out[l - 1] - (lf - 1.0) * out[l - 2]) / lf;
    }
}

/// How the nodes of a [`QuadratureScheme`] were generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMode {
    TensorGauss,
    LowDiscrepancy,
    /// Spherical product rules centred on each cusp point, glued by a Becke
    /// fuzzy-cell partition of unity; nodes depend on the cusp centres.
    CuspAdapted,
}

/// Nodes and positive weights for integrals over ℝ^dim: a tensor rule on the box
/// `[-L, L]^dim` (possibly translated) or a mapped low-discrepancy rule.
#[derive(Debug, Clone)]
pub struct QuadratureScheme {
    mode: QuadratureMode,
    dim: usize,
    /// Nodes per axis (tensor mode) or total sample count.
    resolution: usize,
    half_width: f64,
    offset: bool,
    seed: u64,
    /// Polar nodes of the cusp-adapted rule (azimuthal count is twice this).
    angular: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureScheme {
    /// Tensor Gauss–Legendre rule with `n` nodes per axis on `[-L, L]^dim`.
    ///
    /// With `offset` the box is translated by `L/n` times a fixed irrational
    /// direction so that no node sits on a lattice of symmetric grids.
    pub fn tensor_gauss(dim: usize, n: usize, half_width: f64, offset: bool) -> Result<Self> {
        if dim == 0 || n == 0 {
            return Err(Error::invalid(
                "resolution",
                "dimension and node count must be positive",
            ));
        }
        if !(half_width > 0.0) {
            return Err(Error::invalid(
                "half_width",
                format!("must be positive, got {half_width}"),
            ));
        }
        let (x, w) = gauss_legendre_on(-half_width, half_width, n);
        let shift = offset_vector(dim, half_width / n as f64, offset);
        let total = n.pow(dim as u32);
        let mut nodes = Vec::with_capacity(total * dim);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let mut weight = 1.0;
            for (axis, &i) in idx.iter().enumerate() {
                nodes.push(x[i] + shift[axis]);
                weight *= w[i];
            }
            weights.push(weight);
            increment(&mut idx, n);
        }
        Ok(Self {
            mode: QuadratureMode::TensorGauss,
            dim,
            resolution: n,
            half_width,
            offset,
            seed: 0,
            angular: 0,
            nodes,
            weights,
        })
    }

    /// Randomly shifted Kronecker (R_d) lattice with `count` points, pushed
    /// through the inverse normal CDF with scale `σ = L/4` and importance
    /// weighted, so the rule covers all of ℝ^dim with most nodes in `[-L, L]^dim`.
    pub fn low_discrepancy(dim: usize, count: usize, half_width: f64, seed: u64) -> Result<Self> {
        if dim == 0 || count == 0 {
            return Err(Error::invalid(
                "resolution",
                "dimension and sample count must be positive",
            ));
        }
        if !(half_width > 0.0) {
            return Err(Error::invalid(
                "half_width",
                format!("must be positive, got {half_width}"),
            ));
        }
        let sigma = half_width / 4.0;
        let normal = Normal::new(0.0, sigma).expect("positive scale");
        let unit = kronecker_points(dim, count, seed);
        let norm_const = (2.0 * PI * sigma * sigma).powf(dim as f64 / 2.0) / count as f64;
        let nodes: Vec<f64> = unit
            .iter()
            .map(|&u| normal.inverse_cdf(u.clamp(1e-300, 1.0 - 1e-16)))
            .collect();
        let weights = nodes
            .chunks_exact(dim)
            .map(|x| {
                norm_const * (x.iter().map(|v| v * v).sum::<f64>() / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        Ok(Self {
            mode: QuadratureMode::LowDiscrepancy,
            dim,
            resolution: count,
            half_width,
            offset: true,
            seed,
            angular: 0,
            nodes,
            weights,
        })
    }

    /// Cusp-adapted rule on ℝ³: `radial` Gauss nodes on each of the radial
    /// pieces `[0, 1]`, `[1, 2]`, `[2, |c| + L]` around every centre `c`,
    /// `angular` Gauss nodes in `cos θ` and `2·angular` in `φ`. The stored
    /// nodes are the rule centred at the origin alone; see [`Self::rule_around`].
    pub fn cusp_adapted(radial: usize, angular: usize, half_width: f64) -> Result<Self> {
        if radial < 2 || angular < 2 {
            return Err(Error::invalid(
                "resolution",
                "need at least 2 radial and 2 angular nodes",
            ));
        }
        if !(half_width > 2.0) {
            return Err(Error::invalid(
                "half_width",
                format!("must exceed 2, got {half_width}"),
            ));
        }
        let mut out = Self {
            mode: QuadratureMode::CuspAdapted,
            dim: 3,
            resolution: radial,
            half_width,
            offset: false,
            seed: 0,
            angular,
            nodes: Vec::new(),
            weights: Vec::new(),
        };
        let (nodes, weights) = out.becke_rule(&[[0.0; 3]]);
        out.nodes = nodes;
        out.weights = weights;
        Ok(out)
    }

    /// The rule to use for an integrand with point cusps at `centres`. Fixed
    /// rules ignore the centres; the cusp-adapted rule is rebuilt around them
    /// (plus the origin), independently of their order.
    pub fn rule_around(&self, centres: &[[f64; 3]]) -> (Cow<'_, [f64]>, Cow<'_, [f64]>) {
        if self.mode != QuadratureMode::CuspAdapted {
            return (Cow::Borrowed(&self.nodes), Cow::Borrowed(&self.weights));
        }
        let mut sorted = centres.to_vec();
        sorted.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut all: Vec<[f64; 3]> = vec![[0.0; 3]];
        for c in &sorted {
            let dup = all
                .iter()
                .any(|a| (0..3).map(|i| (a[i] - c[i]).powi(2)).sum::<f64>() < 1e-20);
            if !dup {
                all.push(*c);
            }
        }
        let (n, w) = self.becke_rule(&all);
        (Cow::Owned(n), Cow::Owned(w))
    }

    fn becke_rule(&self, centres: &[[f64; 3]]) -> (Vec<f64>, Vec<f64>) {
        let (ct, cw) = gauss_legendre(self.angular);
        let nphi = 2 * self.angular;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (a, c) in centres.iter().enumerate() {
            let reach = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() + self.half_width;
            let (rs, rw) = composite_gauss_legendre(0.0, reach, &[1.0, 2.0], self.resolution);
            for (&r, &wr) in rs.iter().zip(&rw) {
                for (&t, &wt) in ct.iter().zip(&cw) {
                    let st = (1.0 - t * t).max(0.0).sqrt();
                    for k in 0..nphi {
                        let phi = 2.0 * PI * (k as f64 + 0.5) / nphi as f64;
                        let p = [
                            c[0] + r * st * phi.cos(),
                            c[1] + r * st * phi.sin(),
                            c[2] + r * t,
                        ];
                        let part = becke_weight(&p, centres, a);
                        if part > 0.0 {
                            nodes.extend_from_slice(&p);
                            weights.push(part * wr * r * r * wt * 2.0 * PI / nphi as f64);
                        }
                    }
                }
            }
        }
        (nodes, weights)
    }

    /// A cheaper rule of the same kind, used for quadrature-error estimates.
    pub fn coarsened(&self) -> Result<Self> {
        match self.mode {
            QuadratureMode::CuspAdapted => Self::cusp_adapted(
                (self.resolution * 3 / 4).max(2),
                (self.angular * 3 / 4).max(2),
                self.half_width,
            ),
            QuadratureMode::TensorGauss => Self::tensor_gauss(
                self.dim,
                (self.resolution * 3 / 4).max(2),
                self.half_width,
                self.offset,
            ),
            QuadratureMode::LowDiscrepancy => Self::low_discrepancy(
                self.dim,
                (self.resolution / 4).max(16),
                self.half_width,
                self.seed.wrapping_add(1),
            ),
        }
    }

    /// The same rule with refined resolution (`factor` times more nodes per axis
    /// for tensor rules, `factor^dim` times more points otherwise).
    pub fn refined(&self, factor: usize) -> Result<Self> {
        match self.mode {
            QuadratureMode::CuspAdapted => Self::cusp_adapted(
                self.resolution * factor,
                self.angular * factor,
                self.half_width,
            ),
            QuadratureMode::TensorGauss => Self::tensor_gauss(
                self.dim,
                self.resolution * factor,
                self.half_width,
                self.offset,
            ),
            QuadratureMode::LowDiscrepancy => Self::low_discrepancy(
                self.dim,
                self.resolution * factor.pow(self.dim as u32),
                self.half_width,
                self.seed,
            ),
        }
    }

    pub fn mode(&self) -> QuadratureMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.nodes
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }

    /// Integral of `f` over the box.
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Becke's fuzzy-cell weight of centre `a` at `p`: smooth, equal to one near
/// `a` and vanishing to high order at every other centre.
fn becke_weight(p: &[f64; 3], centres: &[[f64; 3]], a: usize) -> f64 {
    if centres.len() == 1 {
        return 1.0;
    }
    let dist = |c: &[f64; 3]| {
        ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2)).sqrt()
    };
    let d: Vec<f64> = centres.iter().map(dist).collect();
    let cell = |i: usize| -> f64 {
        let mut prod = 1.0;
        for j in 0..centres.len() {
            if j == i {
                continue;
            }
            let sep = (0..3)
                .map(|k| (centres[i][k] - centres[j][k]).powi(2))
                .sum::<f64>()
                .sqrt();
            let mut mu = (d[i] - d[j]) / sep;
            for _ in 0..3 {
                mu = 1.5 * mu - 0.5 * mu * mu * mu;
            }
            prod *= 0.5 * (1.0 - mu);
        }
        prod
    };
    let total: f64 = (0..centres.len()).map(cell).sum();
    cell(a) / total
}

fn increment(idx: &mut [usize], n: usize) {
    for i in idx.iter_mut().rev() {
        *i += 1;
        if *i < n {
            return;
        }
        *i = 0;
    }
}

fn offset_vector(dim: usize, scale: f64, enabled: bool) -> Vec<f64> {
    if !enabled {
        return vec![0.0; dim];
    }
    const DIRECTIONS: [f64; 6] = [0.5, 0.381_966, 0.414_214, 0.302_776, 0.236_068, 0.449_490];
    (0..dim)
        .map(|i| scale * DIRECTIONS[i % DIRECTIONS.len()])
        .collect()
}

/// `count` points of the R_d Kronecker sequence in `[0, 1)^dim`, shifted by a
/// seeded uniform vector (Cranley–Patterson rotation). Flattened row-major.
pub fn kronecker_points(dim: usize, count: usize, seed: u64) -> Vec<f64> {
    // phi_d is the unique positive root of x^(d+1) = x + 1.
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=dim).map(|i| phi.powi(-(i as i32)).fract()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let mut out = Vec::with_capacity(dim * count);
    for k in 1..=count {
        for axis in 0..dim {
            out.push((shift[axis] + k as f64 * alpha[axis]).fract());
        }
    }
    out
}

/// Normalized rule on the ball `B(center, radius)`: weights sum to one, so
/// `Σ w f(x)` is the mean of `f` over the ball.
///
/// Three dimensions use a spherical product rule (Gauss in `r` and `cos θ`,
/// trapezoid in `φ`); other dimensions keep the Kronecker points of the
/// enclosing cube that fall inside the ball.
pub fn ball_mean_rule(
    center: &[f64],
    radius: f64,
    resolution: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(radius > 0.0) {
        return Err(Error::invalid(
            "radius",
            format!("must be positive, got {radius}"),
        ));
    }
    let dim = center.len();
    if dim == 3 {
        let n = resolution.max(2);
        let (rs, rw) = gauss_legendre_on(0.0, radius, n);
        let (cs, cw) = gauss_legendre(n);
        let nphi = 2 * n;
        let mut nodes = Vec::with_capacity(3 * n * n * nphi);
        let mut weights = Vec::with_capacity(n * n * nphi);
        let volume = 4.0 / 3.0 * PI * radius.powi(3);
        for (r, wr) in rs.iter().zip(&rw) {
            for (c, wc) in cs.iter().zip(&cw) {
                let s = (1.0 - c * c).max(0.0).sqrt();
                for k in 0..nphi {
                    let phi = 2.0 * PI * (k as f64 + 0.5) / nphi as f64;
                    nodes.push(center[0] + r * s * phi.cos());
                    nodes.push(center[1] + r * s * phi.sin());
                    nodes.push(center[2] + r * c);
                    weights.push(wr * r * r * wc * (2.0 * PI / nphi as f64) / volume);
                }
            }
        }
        Ok((nodes, weights))
    } else {
        let count = resolution.max(64).pow(2);
        let unit = kronecker_points(dim, count, 7);
        let mut nodes = Vec::new();
        for u in unit.chunks_exact(dim) {
            let p: Vec<f64> = u.iter().map(|v| radius * (2.0 * v - 1.0)).collect();
            if p.iter().map(|v| v * v).sum::<f64>() < radius * radius {
                nodes.extend(p.iter().zip(center).map(|(a, b)| a + b));
            }
        }
        let kept = nodes.len() / dim;
        if kept == 0 {
            return Err(Error::invalid(
                "resolution",
                "no lattice points fell inside the ball",
            ));
        }
        Ok((nodes, vec![1.0 / kept as f64; kept]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 12, 40] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!(
                    (got - exact).abs() < 1e-12,
                    "n={n} deg={deg}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn large_rules_stay_accurate() {
        let (x, w) = gauss_legendre_on(0.0, PI, 2048);
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.sin()).sum();
        assert_relative_eq!(got, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn tensor_rule_reproduces_gaussian_integral() {
        let q = QuadratureScheme::tensor_gauss(3, 24, 20f64.sqrt(), true).unwrap();
        let got = q.integrate(|x| (-x.iter().map(|v| v * v).sum::<f64>()).exp());
        assert_relative_eq!(got, PI.powf(1.5), max_relative = 1e-8);
        assert!(q.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn cusp_adapted_rule_integrates_point_cusps() {
        let q = QuadratureScheme::cusp_adapted(16, 16, 20f64.sqrt()).unwrap();
        let c = [0.4, -0.3, 0.8];
        let f = |x: &[f64]| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let d: f64 = (0..3).map(|i| (x[i] - c[i]).powi(2)).sum::<f64>().sqrt();
            (-r2).exp() * d
        };
        let (nodes, weights) = q.rule_around(&[c]);
        let got: f64 = nodes
            .chunks_exact(3)
            .zip(weights.iter())
            .map(|(x, w)| w * f(x))
            .sum();
        let fine = QuadratureScheme::cusp_adapted(32, 32, 20f64.sqrt()).unwrap();
        let (nodes, weights) = fine.rule_around(&[c]);
        let reference: f64 = nodes
            .chunks_exact(3)
            .zip(weights.iter())
            .map(|(x, w)| w * f(x))
            .sum();
        assert_relative_eq!(got, reference, max_relative = 1e-8);
        // the origin-only rule reproduces the Gaussian integral
        let g = q.integrate(|x| (-x.iter().map(|v| v * v).sum::<f64>()).exp());
        assert_relative_eq!(g, PI.powf(1.5), max_relative = 1e-7);
        assert!(q.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn tensor_weights_sum_to_box_volume() {
        let q = QuadratureScheme::tensor_gauss(3, 6, 2.5, false).unwrap();
        assert_relative_eq!(
            q.weights().iter().sum::<f64>(),
            5.0f64.powi(3),
            max_relative = 1e-12
        );
    }

    #[test]
    fn low_discrepancy_rule_reproduces_gaussian_integral_in_six_dimensions() {
        let q = QuadratureScheme::low_discrepancy(6, 1 << 16, 20f64.sqrt(), 42).unwrap();
        let got = q.integrate(|x| (-x.iter().map(|v| v * v).sum::<f64>()).exp());
        assert_relative_eq!(got, PI.powi(3), max_relative = 1e-3);
    }

    #[test]
    fn ball_rule_means() {
        let (nodes, w) = ball_mean_rule(&[0.3, -0.2, 1.0], 0.7, 8).unwrap();
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        // mean of |y - c|^2 over a ball of radius R in 3-d is 3R^2/5
        let mean: f64 = nodes
            .chunks_exact(3)
            .zip(&w)
            .map(|(p, w)| w * ((p[0] - 0.3).powi(2) + (p[1] + 0.2).powi(2) + (p[2] - 1.0).powi(2)))
            .sum();
        assert_relative_eq!(mean, 0.6 * 0.49, max_relative = 1e-10);
    }

    #[test]
    fn legendre_table_matches_closed_forms() {
        let mut p = [0.0; 4];
        legendre_table(0.3, &mut p);
        assert_relative_eq!(p[2], 0.5 * (3.0 * 0.09 - 1.0), epsilon = 1e-15);
        assert_relative_eq!(p[3], 0.5 * (5.0 * 0.027 - 3.0 * 0.3), epsilon = 1e-15);
    }
}
