use std::f64::consts::PI;

use ndarray::Array2;
use ndarray_linalg::c64;
use serde::{Deserialize, Serialize};

use super::grid::{kernel_matrix, SampleGrid};
use super::kernel::SyntheticCuspKernel;
use crate::error::{Error, Result};
use crate::spectra::{orthogonal_sum_check, singular_values, weak_quasinorm};

/// `{ν ∈ ℤ^d : |ν| ≤ M}` in lexicographic order.
pub fn frequencies(dim: usize, order: usize) -> Vec<Vec<i64>> {
    let m = order as i64;
    let mut out = Vec::new();
    let mut nu = vec![-m; dim];
    loop {
        if nu.iter().map(|v| v * v).sum::<i64>() <= m * m {
            out.push(nu.clone());
        }
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            nu[k] += 1;
            if nu[k] <= m {
                break;
            }
            nu[k] = -m;
        }
    }
}

fn check_cube(kernel: &SyntheticCuspKernel, points: usize, order: usize) -> Result<()> {
    if kernel.support_radius > PI {
        return Err(Error::invalid(
            "support_radius",
            format!(
                "kernel support {} leaves the cube [-π, π)^d",
                kernel.support_radius
            ),
        ));
    }
    let required = 4 * order.max(1);
    if points < required {
        return Err(Error::Aliasing {
            points,
            max_frequency: order,
            required,
        });
    }
    Ok(())
}

fn cube_grid(dim: usize, points: usize) -> Result<SampleGrid> {
    SampleGrid::midpoint(dim, points, -PI, PI)
}

fn phase(nu: &[i64], x: &[f64]) -> f64 {
    nu.iter().zip(x).map(|(n, x)| *n as f64 * x).sum()
}

/// `T̂_ν(t) = (2π)^{-d/2} ∫_{[-π,π)^d} e^{-iν·x} T(t, x) dx` for `|ν| ≤ M`, by the
/// midpoint rule with `points` nodes per axis.
pub fn cube_fourier_coeffs(
    kernel: &SyntheticCuspKernel,
    t: &[f64],
    order: usize,
    points: usize,
) -> Result<Vec<(Vec<i64>, c64)>> {
    check_cube(kernel, points, order)?;
    let grid = cube_grid(kernel.dim, points)?;
    let values: Vec<f64> = (0..grid.len())
        .map(|j| kernel.eval(t, grid.point(j)))
        .collect();
    Ok(grid_coefficients(&grid, &values, order))
}

fn grid_coefficients(grid: &SampleGrid, values: &[f64], order: usize) -> Vec<(Vec<i64>, c64)> {
    let norm = (2.0 * PI).powf(-(grid.dim() as f64) / 2.0);
    frequencies(grid.dim(), order)
        .into_iter()
        .map(|nu| {
            let mut acc = c64::new(0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let p = phase(&nu, grid.point(j));
                acc += c64::new(p.cos(), -p.sin()) * (v * grid.weights()[j]);
            }
            (nu, acc * norm)
        })
        .collect()
}

/// Columns `√w_j e_k(x_j)` of the real orthonormal trigonometric basis spanning
/// `{e^{iν·x} : |ν| ≤ M}` on the grid.
fn real_basis(grid: &SampleGrid, order: usize) -> Array2<f64> {
    let d = grid.dim();
    let nus: Vec<Vec<i64>> = frequencies(d, order)
        .into_iter()
        .filter(|nu| nu.iter().find(|v| **v != 0).is_none_or(|v| *v > 0))
        .collect();
    let c0 = (2.0 * PI).powf(-(d as f64) / 2.0);
    let c = c0 * 2f64.sqrt();
    let cols = 2 * nus.len() - 1;
    let mut b = Array2::zeros((grid.len(), cols));
    for j in 0..grid.len() {
        let x = grid.point(j);
        let sw = grid.weights()[j].sqrt();
        let mut col = 0;
        for nu in &nus {
            if nu.iter().all(|v| *v == 0) {
                b[[j, col]] = c0 * sw;
                col += 1;
            } else {
                let p = phase(nu, x);
                b[[j, col]] = c * p.cos() * sw;
                b[[j, col + 1]] = c * p.sin() * sw;
                col += 2;
            }
        }
    }
    b
}

/// Frobenius norm of `K - K B Bᵀ`.
fn truncation_residual(k: &Array2<f64>, basis: &Array2<f64>) -> f64 {
    let proj = k.dot(basis).dot(&basis.t());
    (k - &proj).iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Fourier coefficient table of a kernel over sampled `t`, with the
/// Hilbert–Schmidt norm of the truncation remainder.
#[derive(Debug, Clone)]
pub struct CubeFourierModel {
    pub order: usize,
    pub frequencies: Vec<Vec<i64>>,
    /// Row `i` holds `T̂_ν(t_i)` for every `ν`.
    pub coefficients: Array2<c64>,
    /// `‖T - T_M‖_2` over the sampled `t`.
    pub tail: f64,
}

impl CubeFourierModel {
    pub fn build(
        kernel: &SyntheticCuspKernel,
        t: &SampleGrid,
        order: usize,
        points: usize,
    ) -> Result<Self> {
        check_cube(kernel, points, order)?;
        let grid = cube_grid(kernel.dim, points)?;
        let frequencies = frequencies(kernel.dim, order);
        let mut coefficients = Array2::zeros((t.len(), frequencies.len()));
        for i in 0..t.len() {
            let row = cube_fourier_coeffs(kernel, t.point(i), order, points)?;
            for (k, (_, v)) in row.into_iter().enumerate() {
                coefficients[[i, k]] = v;
            }
        }
        let k = kernel_matrix(kernel, t, &grid, None)?;
        let tail = truncation_residual(&k, &real_basis(&grid, order));
        Ok(Self {
            order,
            frequencies,
            coefficients,
            tail,
        })
    }

    /// Largest `|T̂_{-ν} - conj T̂_ν|` over the table.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for (k, nu) in self.frequencies.iter().enumerate() {
            let neg: Vec<i64> = nu.iter().map(|v| -v).collect();
            let j = self
                .frequencies
                .iter()
                .position(|f| *f == neg)
                .expect("set is symmetric");
            for (a, b) in self
                .coefficients
                .column(k)
                .iter()
                .zip(self.coefficients.column(j))
            {
                worst = worst.max((a.conj() - b).norm());
            }
        }
        worst
    }
}

/// `s_{2m} ≤ m^{-1/2} ‖T - T_M‖_2` at one truncation order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationBound {
    pub order: usize,
    pub m: usize,
    pub bound: f64,
    pub actual: f64,
}

impl TruncationBound {
    pub fn holds(&self) -> bool {
        self.actual <= self.bound * (1.0 + 1e-10)
    }

    pub fn ratio(&self) -> f64 {
        self.bound / self.actual
    }
}

pub fn truncation_rank_bound(
    kernel: &SyntheticCuspKernel,
    t: &SampleGrid,
    order: usize,
    points: usize,
) -> Result<TruncationBound> {
    Ok(truncation_sweep(kernel, t, &[order], points)?.remove(0))
}

/// [`truncation_rank_bound`] for several orders sharing one decomposition.
pub fn truncation_sweep(
    kernel: &SyntheticCuspKernel,
    t: &SampleGrid,
    orders: &[usize],
    points: usize,
) -> Result<Vec<TruncationBound>> {
    let top = orders.iter().copied().max().unwrap_or(0);
    check_cube(kernel, points, top)?;
    let grid = cube_grid(kernel.dim, points)?;
    let k = kernel_matrix(kernel, t, &grid, None)?;
    let s = singular_values(k.view())?;
    orders
        .iter()
        .map(|&order| {
            let basis = real_basis(&grid, order);
            let m = basis.ncols();
            Ok(TruncationBound {
                order,
                m,
                bound: truncation_residual(&k, &basis) / (m as f64).sqrt(),
                actual: s.get(2 * m - 1).copied().unwrap_or(0.0),
            })
        })
        .collect()
}

/// One unit cube's contribution to [`cube_decomposition_norm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubePiece {
    pub index: Vec<i64>,
    /// `‖iop(T) a 1_{C_n}‖_{q,∞}`
    pub weak_norm: f64,
    /// `‖a‖_{L∞(C_n)}` over the grid nodes.
    pub weight_sup: f64,
    /// `‖A_n‖_{L²}`, where `A_n(t)` is the sup of the amplitude over the `2π`-cube at `n`.
    pub amplitude_l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeDecomposition {
    pub q: f64,
    /// `‖iop(T) a‖_{q,∞}` from the full matrix.
    pub lhs: f64,
    /// `[2(2-q)^{-1} Σ_n ‖iop(T) a 1_{C_n}‖_{q,∞}^q]^{1/q}`.
    pub aggregated: f64,
    /// `[Σ_n ‖A_n‖_{L²}^q ‖a‖_{L∞(C_n)}^q]^{1/q}`.
    pub lattice_sum: f64,
    pub pieces: Vec<CubePiece>,
}

impl CubeDecomposition {
    pub fn holds(&self) -> bool {
        self.lhs <= self.aggregated * (1.0 + 1e-10)
    }
}

fn cube_index(x: &[f64]) -> Vec<i64> {
    x.iter().map(|c| (c + 0.5).floor() as i64).collect()
}

/// Split `iop(T) a` by unit-cube indicators in `x` and aggregate the pieces.
///
/// The `x` grid covers the cubes `C_n`, `|n_i| ≤ ⌈R - 1/2⌉`, with `per_unit`
/// midpoints per unit length; `t` is sampled on `t_grid`.
pub fn cube_decomposition_norm(
    kernel: &SyntheticCuspKernel,
    weight: &dyn Fn(&[f64]) -> f64,
    q: f64,
    t_grid: &SampleGrid,
    per_unit: usize,
) -> Result<CubeDecomposition> {
    if !(q > 0.0 && q < 2.0) {
        return Err(Error::invalid("q", format!("needs 0 < q < 2, got {q}")));
    }
    let radius = (kernel.support_radius - 0.5).max(0.0).ceil() as usize;
    let grid = SampleGrid::cube_aligned(kernel.dim, radius, per_unit)?;
    let full = kernel_matrix(kernel, t_grid, &grid, Some(weight))?;

    let mut indices: Vec<Vec<i64>> = (0..grid.len())
        .map(|j| cube_index(grid.point(j)))
        .collect::<Vec<_>>();
    indices.sort();
    indices.dedup();
    let amplitude_l2 = (0..t_grid.len())
        .map(|i| t_grid.weights()[i] * kernel.amplitude.at(t_grid.point(i)).powi(2))
        .sum::<f64>()
        .sqrt();

    let mut blocks = Vec::with_capacity(indices.len());
    let mut pieces = Vec::with_capacity(indices.len());
    for n in &indices {
        let cols: Vec<usize> = (0..grid.len())
            .filter(|&j| cube_index(grid.point(j)) == *n)
            .collect();
        let mut block = Array2::zeros(full.dim());
        for &j in &cols {
            block.column_mut(j).assign(&full.column(j));
        }
        let weight_sup = cols
            .iter()
            .map(|&j| weight(grid.point(j)).abs())
            .fold(0.0, f64::max);
        // A(t, ·) = g(t) on the support ball; the 2π-cube around n meets it
        // when its nearest point lies within R.
        let gap2: f64 = n
            .iter()
            .map(|&c| ((c as f64).abs() - PI).max(0.0).powi(2))
            .sum();
        let a_n = if gap2.sqrt() < kernel.support_radius {
            amplitude_l2
        } else {
            0.0
        };
        let weak_norm = weak_quasinorm(&singular_values(block.view())?, q)?;
        pieces.push(CubePiece {
            index: n.clone(),
            weak_norm,
            weight_sup,
            amplitude_l2: a_n,
        });
        blocks.push(block);
    }
    let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
    let check = orthogonal_sum_check(&views, q)?;
    let lattice_sum = pieces
        .iter()
        .map(|p| (p.amplitude_l2 * p.weight_sup).powf(q))
        .sum::<f64>()
        .powf(1.0 / q);
    Ok(CubeDecomposition {
        q,
        lhs: check.lhs.powf(1.0 / q),
        aggregated: check.rhs.powf(1.0 / q),
        lattice_sum,
        pieces,
    })
}
