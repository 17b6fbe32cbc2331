use ndarray::{s, Array2};
use serde::{Deserialize, Serialize};

use super::linalg::asymmetry;
use crate::density::split_positions;
use crate::error::{Error, Result};
use crate::model::ModelWavefunction;
use crate::quadrature::{QuadratureMode, QuadratureScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Gamma,
    Tau,
    PsiMap,
    VMap,
    Synthetic,
}

/// Nyström matrix `√w_i K(x_i, x_j) √w_j` together with its nodes.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub kind: OperatorKind,
    pub matrix: Array2<f64>,
    /// Flat row nodes (`row_dim` coordinates each); for the `V` map every
    /// node appears once per gradient component.
    pub row_nodes: Vec<f64>,
    pub row_weights: Vec<f64>,
    pub row_dim: usize,
    pub col_nodes: Vec<f64>,
    pub col_weights: Vec<f64>,
    pub col_dim: usize,
}

/// Cartesian grid for the distinguished particle and the rule for the others.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Gauss nodes per axis of the `x` grid (even, so no node sits at the nucleus).
    pub nodes_per_axis: usize,
    pub half_width: f64,
    /// Gauss nodes per axis of the `x̂` rule (offset from the `x` grid).
    pub hat_nodes_per_axis: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            nodes_per_axis: 12,
            half_width: 5.0,
            hat_nodes_per_axis: 12,
        }
    }
}

impl GridConfig {
    pub fn grid(&self) -> Result<QuadratureScheme> {
        QuadratureScheme::tensor_gauss(3, self.nodes_per_axis, self.half_width, false)
    }

    pub fn hat_scheme(&self, wf: &ModelWavefunction) -> Result<QuadratureScheme> {
        QuadratureScheme::tensor_gauss(wf.hat_dim(), self.hat_nodes_per_axis, self.half_width, true)
    }
}

fn check_rules(
    wf: &ModelWavefunction,
    hat: &QuadratureScheme,
    grid: &QuadratureScheme,
) -> Result<()> {
    for (name, rule, dim) in [("x̂ rule", hat, wf.hat_dim()), ("x grid", grid, 3)] {
        if rule.mode() == QuadratureMode::CuspAdapted {
            return Err(Error::invalid(
                "scheme",
                format!("{name} must have fixed nodes; cusp-adapted rules move with the cusps"),
            ));
        }
        if rule.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{name} has dimension {}, expected {dim}",
                rule.dim()
            )));
        }
        if rule.weights().iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::invalid(
                "weights",
                format!("{name} has non-positive or non-finite weights"),
            ));
        }
    }
    Ok(())
}

fn flat_nodes(rule: &QuadratureScheme) -> Vec<f64> {
    rule.iter().flat_map(|(n, _)| n.iter().copied()).collect()
}

/// `Ψ: L²(ℝ³) → L²(ℝ^{3N-3})`, rows at the `x̂` nodes, columns at the grid.
pub fn discretize_psi_map(
    wf: &ModelWavefunction,
    hat: &QuadratureScheme,
    grid: &QuadratureScheme,
) -> Result<DiscretizedOperator> {
    check_rules(wf, hat, grid)?;
    let rows: Vec<_> = hat
        .iter()
        .map(|(n, w)| (split_positions(n), w.sqrt()))
        .collect();
    let cols: Vec<_> = grid
        .iter()
        .map(|(n, w)| ([n[0], n[1], n[2]], w.sqrt()))
        .collect();
    let mut matrix = Array2::zeros((rows.len(), cols.len()));
    for (i, (others, wi)) in rows.iter().enumerate() {
        for (j, (x, wj)) in cols.iter().enumerate() {
            let v = wi * wf.eval_psi(others, x) * wj;
            if !v.is_finite() {
                return Err(Error::NonFiniteQuadrature {
                    node: i * cols.len() + j,
                });
            }
            matrix[[i, j]] = v;
        }
    }
    Ok(DiscretizedOperator {
        kind: OperatorKind::PsiMap,
        matrix,
        row_nodes: flat_nodes(hat),
        row_weights: hat.weights().to_vec(),
        row_dim: hat.dim(),
        col_nodes: flat_nodes(grid),
        col_weights: grid.weights().to_vec(),
        col_dim: 3,
    })
}

/// `V = Ψ∇` with the three gradient components stacked as row blocks.
pub fn discretize_v_map(
    wf: &ModelWavefunction,
    hat: &QuadratureScheme,
    grid: &QuadratureScheme,
) -> Result<DiscretizedOperator> {
    check_rules(wf, hat, grid)?;
    let rows: Vec<_> = hat
        .iter()
        .map(|(n, w)| (split_positions(n), w.sqrt()))
        .collect();
    let cols: Vec<_> = grid
        .iter()
        .map(|(n, w)| ([n[0], n[1], n[2]], w.sqrt()))
        .collect();
    let nr = rows.len();
    let mut matrix = Array2::zeros((3 * nr, cols.len()));
    for (i, (others, wi)) in rows.iter().enumerate() {
        for (j, (x, wj)) in cols.iter().enumerate() {
            let g = wf.eval_grad_psi(others, x)?;
            for a in 0..3 {
                let v = wi * g[a] * wj;
                if !v.is_finite() {
                    return Err(Error::NonFiniteQuadrature {
                        node: i * cols.len() + j,
                    });
                }
                matrix[[a * nr + i, j]] = v;
            }
        }
    }
    let row_nodes = flat_nodes(hat);
    Ok(DiscretizedOperator {
        kind: OperatorKind::VMap,
        matrix,
        row_nodes: row_nodes.repeat(3),
        row_weights: hat.weights().repeat(3),
        row_dim: hat.dim(),
        col_nodes: flat_nodes(grid),
        col_weights: grid.weights().to_vec(),
        col_dim: 3,
    })
}

/// Columns per tile of the Gram product.
const TILE: usize = 256;

/// `AᵀA`, assembled tile by tile.
fn gram(a: &Array2<f64>) -> Array2<f64> {
    let n = a.ncols();
    let mut out = Array2::zeros((n, n));
    for start in (0..n).step_by(TILE) {
        let end = (start + TILE).min(n);
        let block = a.slice(s![.., start..end]).t().dot(a);
        out.slice_mut(s![start..end, ..]).assign(&block);
    }
    out
}

fn hermitian_from(map: DiscretizedOperator, kind: OperatorKind) -> Result<DiscretizedOperator> {
    let mut matrix = gram(&map.matrix);
    let scale = matrix.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let asym = asymmetry(matrix.view());
    if asym > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let n = matrix.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (matrix[[i, j]] + matrix[[j, i]]);
            matrix[[i, j]] = v;
            matrix[[j, i]] = v;
        }
    }
    Ok(DiscretizedOperator {
        kind,
        matrix,
        row_nodes: map.col_nodes.clone(),
        row_weights: map.col_weights.clone(),
        row_dim: 3,
        col_nodes: map.col_nodes,
        col_weights: map.col_weights,
        col_dim: 3,
    })
}

/// Nyström matrix of `Γ` on the grid, with `γ(x_i, x_j)` integrated by the
/// shared `x̂` rule; it is exactly the Gram matrix of the `Ψ` matrix.
pub fn discretize_gamma(
    wf: &ModelWavefunction,
    hat: &QuadratureScheme,
    grid: &QuadratureScheme,
) -> Result<DiscretizedOperator> {
    hermitian_from(discretize_psi_map(wf, hat, grid)?, OperatorKind::Gamma)
}

/// Nyström matrix of `T`, the Gram matrix of the `V` matrix.
pub fn discretize_tau(
    wf: &ModelWavefunction,
    hat: &QuadratureScheme,
    grid: &QuadratureScheme,
) -> Result<DiscretizedOperator> {
    hermitian_from(discretize_v_map(wf, hat, grid)?, OperatorKind::Tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{gamma_kernel, rho};
    use crate::model::ModelConfig;
    use crate::spectra::linalg::{singular_values, symmetric_eigenvalues};

    fn small() -> GridConfig {
        GridConfig {
            nodes_per_axis: 6,
            half_width: 4.0,
            hat_nodes_per_axis: 8,
        }
    }

    fn model(jastrow: bool) -> ModelWavefunction {
        let mut cfg = ModelConfig::two_particle(2.0, 1.0);
        cfg.nuclear_jastrow = jastrow;
        cfg.pair_jastrow = jastrow;
        ModelWavefunction::new(cfg).unwrap()
    }

    #[test]
    fn separable_model_has_rank_one() {
        let wf = model(false);
        let g = small();
        let gamma = discretize_gamma(&wf, &g.hat_scheme(&wf).unwrap(), &g.grid().unwrap()).unwrap();
        let ev = symmetric_eigenvalues(gamma.matrix.view()).unwrap();
        assert!(ev[1].abs() / ev[0] < 1e-10);
        let psi = discretize_psi_map(&wf, &g.hat_scheme(&wf).unwrap(), &g.grid().unwrap()).unwrap();
        let s = singular_values(psi.matrix.view()).unwrap();
        let hat = g.hat_scheme(&wf).unwrap();
        let grid = g.grid().unwrap();
        let norm_g: f64 = hat.integrate(|x| (-2.0 * x.iter().map(|v| v * v).sum::<f64>()).exp());
        let norm_h: f64 = grid.integrate(|x| (-2.0 * x.iter().map(|v| v * v).sum::<f64>()).exp());
        assert!((s[0] * s[0] / (norm_g * norm_h) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_matches_kernel_and_trace() {
        let wf = model(true);
        let g = small();
        let hat = g.hat_scheme(&wf).unwrap();
        let grid = g.grid().unwrap();
        let gamma = discretize_gamma(&wf, &hat, &grid).unwrap();
        let x = grid.node(3);
        let y = grid.node(100);
        let direct = gamma_kernel(&wf, &hat, &[x[0], x[1], x[2]], &[y[0], y[1], y[2]]).unwrap();
        let scaled = gamma.matrix[[3, 100]] / (grid.weights()[3] * grid.weights()[100]).sqrt();
        assert!((scaled / direct - 1.0).abs() < 1e-12);
        let trace: f64 = (0..gamma.matrix.nrows())
            .map(|i| gamma.matrix[[i, i]])
            .sum();
        let expected: f64 = grid
            .iter()
            .map(|(n, w)| w * rho(&wf, &hat, &[n[0], n[1], n[2]]).unwrap())
            .sum();
        assert!((trace / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn factorization_identities() {
        let wf = model(true);
        let g = small();
        let hat = g.hat_scheme(&wf).unwrap();
        let grid = g.grid().unwrap();
        for (map, op) in [
            (
                discretize_psi_map(&wf, &hat, &grid).unwrap(),
                discretize_gamma(&wf, &hat, &grid).unwrap(),
            ),
            (
                discretize_v_map(&wf, &hat, &grid).unwrap(),
                discretize_tau(&wf, &hat, &grid).unwrap(),
            ),
        ] {
            let s = singular_values(map.matrix.view()).unwrap();
            let ev = symmetric_eigenvalues(op.matrix.view()).unwrap();
            assert!(ev.iter().all(|v| *v >= -1e-10 * ev[0]));
            for (sv, e) in s.iter().zip(&ev).filter(|(_, e)| **e > 1e-6 * ev[0]) {
                assert!((sv * sv - e).abs() <= 1e-10 * e, "{} vs {e}", sv * sv);
            }
        }
    }

    #[test]
    fn rejects_moving_rules() {
        let wf = model(true);
        let grid = small().grid().unwrap();
        let adapted = QuadratureScheme::cusp_adapted(4, 4, 4.0).unwrap();
        assert!(discretize_psi_map(&wf, &adapted, &grid).is_err());
        let wrong_dim = QuadratureScheme::tensor_gauss(6, 2, 3.0, true).unwrap();
        assert!(matches!(
            discretize_psi_map(&wf, &wrong_dim, &grid),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
