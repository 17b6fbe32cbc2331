use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Vec3;

/// A non-negative function sampled at cell centres of a uniform grid on
/// `[-H, H]³`, treated as constant on each cell.
///
/// Box integrals are sums of non-negative terms (no prefix-sum differences),
/// so tiny far-field masses keep their relative accuracy, which matters for
/// lattice norms with `q < 1`.
#[derive(Debug, Clone)]
pub struct SampledField {
    half_extent: f64,
    spacing: f64,
    cells: usize,
    values: Vec<f64>,
}

/// Cells overlapped by an interval and the overlap lengths.
struct Window {
    first: usize,
    lengths: Vec<f64>,
}

impl SampledField {
    pub fn from_fn(half_extent: f64, spacing: f64, f: impl Fn(&Vec3) -> f64) -> Result<Self> {
        if !(half_extent > 0.0 && spacing > 0.0) {
            return Err(Error::invalid(
                "grid",
                "extent and spacing must be positive",
            ));
        }
        let cells = ((2.0 * half_extent / spacing).round() as usize).max(1);
        let spacing = 2.0 * half_extent / cells as f64;
        let mut values = vec![0.0; cells * cells * cells];
        let centre = |i: usize| -half_extent + (i as f64 + 0.5) * spacing;
        for i in 0..cells {
            for j in 0..cells {
                for k in 0..cells {
                    let v = f(&[centre(i), centre(j), centre(k)]);
                    if !(v >= 0.0) {
                        return Err(Error::invalid(
                            "field",
                            format!("samples must be finite and non-negative, got {v}"),
                        ));
                    }
                    values[(i * cells + j) * cells + k] = v;
                }
            }
        }
        Ok(Self {
            half_extent,
            spacing,
            cells,
            values,
        })
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing.powi(3)
    }

    fn window(&self, lo: f64, hi: f64) -> Window {
        let edge = |i: usize| -self.half_extent + i as f64 * self.spacing;
        let t0 = ((lo + self.half_extent) / self.spacing).floor().max(0.0) as usize;
        let t1 =
            (((hi + self.half_extent) / self.spacing).ceil().max(0.0) as usize).min(self.cells);
        let lengths = (t0.min(t1)..t1)
            .map(|i| (hi.min(edge(i + 1)) - lo.max(edge(i))).max(0.0))
            .collect();
        Window {
            first: t0.min(t1),
            lengths,
        }
    }

    /// Overlap-weighted sums over the box product of per-axis windows, for every
    /// combination of windows: `out[(a * nb + b) * nc + c]`.
    fn window_sums(&self, wx: &[Window], wy: &[Window], wz: &[Window]) -> Vec<f64> {
        let n = self.cells;
        // contract z
        let mut tz = vec![0.0; n * n * wz.len()];
        for ij in 0..n * n {
            let row = &self.values[ij * n..(ij + 1) * n];
            for (c, w) in wz.iter().enumerate() {
                tz[ij * wz.len() + c] = w
                    .lengths
                    .iter()
                    .zip(&row[w.first..])
                    .map(|(l, v)| l * v)
                    .sum();
            }
        }
        // contract y
        let nz = wz.len();
        let mut tyz = vec![0.0; n * wy.len() * nz];
        for i in 0..n {
            for (b, w) in wy.iter().enumerate() {
                for c in 0..nz {
                    tyz[(i * wy.len() + b) * nz + c] = w
                        .lengths
                        .iter()
                        .enumerate()
                        .map(|(o, l)| l * tz[(i * n + w.first + o) * nz + c])
                        .sum();
                }
            }
        }
        // contract x
        let ny = wy.len();
        let mut out = vec![0.0; wx.len() * ny * nz];
        for (a, w) in wx.iter().enumerate() {
            for bc in 0..ny * nz {
                out[a * ny * nz + bc] = w
                    .lengths
                    .iter()
                    .enumerate()
                    .map(|(o, l)| l * tyz[(w.first + o) * ny * nz + bc])
                    .sum();
            }
        }
        out
    }

    /// `∫_{[lo, hi)} f`.
    pub fn box_integral(&self, lo: &Vec3, hi: &Vec3) -> f64 {
        let w: Vec<Window> = (0..3).map(|a| self.window(lo[a], hi[a])).collect();
        let [wx, wy, wz] = <[Window; 3]>::try_from(w).ok().expect("three axes");
        self.window_sums(&[wx], &[wy], &[wz])[0]
    }

    /// Masses of all cubes of a lattice configuration, in the order of
    /// `(i, j, k)` over `[-R, R]³`.
    fn cube_masses(&self, config: &LatticeNormConfig) -> Vec<f64> {
        let r = config.index_radius as i64;
        let h = config.side / 2.0;
        let windows = || -> Vec<Window> {
            (-r..=r)
                .map(|i| {
                    let c = i as f64 * config.stride;
                    self.window(c - h, c + h)
                })
                .collect()
        };
        self.window_sums(&windows(), &windows(), &windows())
    }
}

/// Cubes `[-r/2, r/2)³ + stride·n` for `|n|∞ ≤ index_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeNormConfig {
    pub side: f64,
    /// Centre spacing; equal to `side` for a tiling.
    pub stride: f64,
    pub exponent: f64,
    pub index_radius: usize,
}

impl LatticeNormConfig {
    pub const DEFAULT_INDEX_RADIUS: usize = 12;

    /// Unit-cube tiling.
    pub fn unit(exponent: f64) -> Self {
        Self {
            side: 1.0,
            stride: 1.0,
            exponent,
            index_radius: Self::DEFAULT_INDEX_RADIUS,
        }
    }

    /// `4π`-cubes centred at integer points, as in `M_q`.
    pub fn four_pi(exponent: f64) -> Self {
        Self {
            side: 4.0 * std::f64::consts::PI,
            stride: 1.0,
            exponent,
            index_radius: Self::DEFAULT_INDEX_RADIUS,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.exponent > 0.0) {
            return Err(Error::invalid(
                "exponent",
                format!("q must be positive, got {}", self.exponent),
            ));
        }
        if !(self.side > 0.0 && self.stride > 0.0) {
            return Err(Error::invalid(
                "side",
                "cube side and stride must be positive",
            ));
        }
        Ok(())
    }

    /// Cube centres in the same order as the mass table.
    fn centres(&self) -> impl Iterator<Item = Vec3> + '_ {
        let r = self.index_radius as i64;
        let s = self.stride;
        (-r..=r).flat_map(move |i| {
            (-r..=r).flat_map(move |j| {
                (-r..=r).map(move |k| [i as f64 * s, j as f64 * s, k as f64 * s])
            })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeNorm {
    pub value: f64,
    /// Field mass outside the region covered by the indexed cubes.
    pub tail_mass: f64,
    /// Field mass outside the sampled grid cannot be seen; this flags a grid
    /// that does not reach the outermost cubes.
    pub grid_covers_cubes: bool,
}

/// `(Σ_n ‖f‖_{L¹(C_n)}^q)^{1/q}`.
pub fn lattice_norm(field: &SampledField, config: &LatticeNormConfig) -> Result<LatticeNorm> {
    config.validate()?;
    let q = config.exponent;
    let sum: f64 = field.cube_masses(config).iter().map(|m| m.powf(q)).sum();
    Ok(LatticeNorm {
        value: sum.powf(1.0 / q),
        tail_mass: tail_mass(field, config),
        grid_covers_cubes: reach(config) <= field.half_extent() + 1e-12,
    })
}

fn reach(config: &LatticeNormConfig) -> f64 {
    config.index_radius as f64 * config.stride + config.side / 2.0
}

fn tail_mass(field: &SampledField, config: &LatticeNormConfig) -> f64 {
    let r = reach(config);
    (field.total() - field.box_integral(&[-r; 3], &[r; 3])).max(0.0)
}

/// Samples per axis used for the sup of `a` over a unit cube.
pub const SUP_SAMPLES: usize = 5;

/// `M_q(a, f) = (Σ_n ‖ρ[f]‖_{L¹(C_n^{(4π)})}^{q/2} ‖a‖_{L∞(C_n)}^q)^{1/q}`, with
/// `4π`-cubes and unit cubes both centred at integer points `n`.
/// `weighted_density` holds samples of `ρ[f]`.
pub fn coefficient_mq(
    a: impl Fn(&Vec3) -> f64,
    weighted_density: &SampledField,
    exponent: f64,
    index_radius: usize,
) -> Result<LatticeNorm> {
    let big = LatticeNormConfig {
        index_radius,
        ..LatticeNormConfig::four_pi(exponent / 2.0)
    };
    big.validate()?;
    let q = exponent;
    let masses = weighted_density.cube_masses(&big);
    let sum: f64 = big
        .centres()
        .zip(&masses)
        .map(|(c, m)| {
            let sup = cube_sup(&a, &c);
            if sup == 0.0 {
                0.0
            } else {
                m.powf(q / 2.0) * sup.powf(q)
            }
        })
        .sum();
    Ok(LatticeNorm {
        value: sum.powf(1.0 / q),
        tail_mass: tail_mass(weighted_density, &big),
        grid_covers_cubes: reach(&big) <= weighted_density.half_extent() + 1e-12,
    })
}

fn cube_sup(a: &impl Fn(&Vec3) -> f64, centre: &Vec3) -> f64 {
    let m = SUP_SAMPLES;
    let offset = |i: usize| -0.5 + i as f64 / (m - 1) as f64 * (1.0 - 1e-9);
    let mut sup = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let p = [
                    centre[0] + offset(i),
                    centre[1] + offset(j),
                    centre[2] + offset(k),
                ];
                sup = sup.max(a(&p).abs());
            }
        }
    }
    sup
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn blob(centre: Vec3, width: f64) -> impl Fn(&Vec3) -> f64 {
        move |p| (-(0..3).map(|a| (p[a] - centre[a]).powi(2)).sum::<f64>() / (width * width)).exp()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn homogeneous_of_degree_one(c in 0.01f64..100.0, q in 0.2f64..2.0, x in -2.0f64..2.0, w in 0.3f64..1.5) {
            let f = blob([x, 0.0, 0.5], w);
            let base = SampledField::from_fn(4.0, 0.25, &f).unwrap();
            let scaled = SampledField::from_fn(4.0, 0.25, |p| c * f(p)).unwrap();
            let cfg = LatticeNormConfig { index_radius: 3, ..LatticeNormConfig::unit(q) };
            let a = lattice_norm(&base, &cfg).unwrap().value;
            let b = lattice_norm(&scaled, &cfg).unwrap().value;
            prop_assert!((b / (c * a) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn monotone_in_the_field(extra in 0.0f64..2.0, q in 0.2f64..2.0, x in -2.0f64..2.0) {
            let f = blob([0.0; 3], 0.8);
            let g = blob([x, 1.0, 0.0], 0.5);
            let small = SampledField::from_fn(4.0, 0.25, &f).unwrap();
            let large = SampledField::from_fn(4.0, 0.25, |p| f(p) + extra * g(p)).unwrap();
            let cfg = LatticeNormConfig { index_radius: 3, ..LatticeNormConfig::unit(q) };
            prop_assert!(lattice_norm(&small, &cfg).unwrap().value <= lattice_norm(&large, &cfg).unwrap().value * (1.0 + 1e-12));
        }

        #[test]
        fn dominates_the_mass_below_one(q in 0.1f64..1.0) {
            // |||f|||_q ≥ ‖f‖_1 for q ≤ 1
            let field = SampledField::from_fn(4.0, 0.25, blob([0.3, -0.2, 0.1], 1.0)).unwrap();
            let cfg = LatticeNormConfig { index_radius: 4, ..LatticeNormConfig::unit(q) };
            prop_assert!(lattice_norm(&field, &cfg).unwrap().value >= field.total() * (1.0 - 1e-12));
        }
    }
}
