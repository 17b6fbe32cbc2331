use ndarray::Array2;

use super::kernel::SyntheticCuspKernel;
use crate::error::{Error, Result};

/// Tensor midpoint grid on a box, points stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl SampleGrid {
    /// `per_axis` midpoints on each axis of `[lo, hi)^dim`.
    pub fn midpoint(dim: usize, per_axis: usize, lo: f64, hi: f64) -> Result<Self> {
        if dim == 0 || per_axis == 0 || !(hi > lo) {
            return Err(Error::invalid(
                "grid",
                "needs dim >= 1, per_axis >= 1 and hi > lo",
            ));
        }
        let h = (hi - lo) / per_axis as f64;
        let axis: Vec<f64> = (0..per_axis).map(|j| lo + (j as f64 + 0.5) * h).collect();
        Ok(Self::tensor(dim, &axis, h))
    }

    /// Midpoints of unit cubes `C_n = [n - 1/2, n + 1/2)^dim` for `|n_i| ≤ radius`,
    /// `per_unit` points per unit length.
    pub fn cube_aligned(dim: usize, radius: usize, per_unit: usize) -> Result<Self> {
        let half = radius as f64 + 0.5;
        Self::midpoint(dim, (2 * radius + 1) * per_unit, -half, half)
    }

    fn tensor(dim: usize, axis: &[f64], h: f64) -> Self {
        let n = axis.len();
        let total = n.pow(dim as u32);
        let mut points = Vec::with_capacity(total * dim);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            points.extend(idx.iter().map(|&i| axis[i]));
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < n {
                    break;
                }
                *slot = 0;
            }
        }
        Self {
            dim,
            points,
            weights: vec![h.powi(dim as i32); total],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `√w_t(i) · T(t_i, x_j) · a(x_j) · √w_x(j)`, the discretized `iop(T) a`.
pub fn kernel_matrix(
    kernel: &SyntheticCuspKernel,
    t: &SampleGrid,
    x: &SampleGrid,
    weight: Option<&dyn Fn(&[f64]) -> f64>,
) -> Result<Array2<f64>> {
    if t.dim() != kernel.t_dim || x.dim() != kernel.dim {
        return Err(Error::DimensionMismatch(format!(
            "kernel on R^{} x R^{}, grids on R^{} x R^{}",
            kernel.t_dim,
            kernel.dim,
            t.dim(),
            x.dim()
        )));
    }
    let col: Vec<f64> = (0..x.len())
        .map(|j| x.weights()[j].sqrt() * weight.map_or(1.0, |a| a(x.point(j))))
        .collect();
    let mut m = Array2::zeros((t.len(), x.len()));
    for i in 0..t.len() {
        let ti = t.point(i);
        let wi = t.weights()[i].sqrt();
        for j in 0..x.len() {
            if col[j] == 0.0 {
                continue;
            }
            let v = wi * kernel.eval(ti, x.point(j)) * col[j];
            if !v.is_finite() {
                return Err(Error::NonFiniteQuadrature {
                    node: i * x.len() + j,
                });
            }
            m[[i, j]] = v;
        }
    }
    Ok(m)
}
