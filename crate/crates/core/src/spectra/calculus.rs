//! Randomized checks of the Schatten-class inequalities used to combine
//! singular-value estimates.

use ndarray::{concatenate, Array2, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::linalg::singular_values;
use super::norms::{schatten, weak_quasinorm};
use crate::error::{Error, Result};

/// Relative slack allowed for roundoff.
const ROUNDOFF: f64 = 1e-10;

/// Outcome of one inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs <= rhs * (1.0 + ROUNDOFF) + f64::MIN_POSITIVE,
        }
    }

    /// `rhs - lhs`, negative on violation.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteRankReport {
    /// `Σ_{k>n} s_k(A)^p ≤ ‖A - K‖_p^p`.
    pub tail: InequalityCheck,
    /// `s_{2n}(A) ≤ n^{-1/p} ‖A - K‖_p` (absent for `n = 0`).
    pub doubled: Option<InequalityCheck>,
}

impl FiniteRankReport {
    pub fn holds(&self) -> bool {
        self.tail.holds && self.doubled.is_none_or(|d| d.holds)
    }
}

fn dims_match(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// Approximation by an operator `K` of rank at most `rank`.
pub fn finite_rank_check(
    a: ArrayView2<'_, f64>,
    k: ArrayView2<'_, f64>,
    rank: usize,
    p: f64,
) -> Result<FiniteRankReport> {
    dims_match(a, k)?;
    let s = singular_values(a)?;
    let diff = singular_values((&a - &k).view())?;
    let dist = schatten(&diff, p)?;
    let tail: f64 = s.iter().skip(rank).map(|v| v.powf(p)).sum();
    let doubled = (rank > 0).then(|| {
        let s2n = s.get(2 * rank - 1).copied().unwrap_or(0.0);
        InequalityCheck::new(s2n, (rank as f64).powf(-1.0 / p) * dist)
    });
    Ok(FiniteRankReport {
        tail: InequalityCheck::new(tail, dist.powf(p)),
        doubled,
    })
}

fn weak_norms(ops: &[ArrayView2<'_, f64>], p: f64) -> Result<Vec<f64>> {
    ops.iter()
        .map(|a| weak_quasinorm(&singular_values(*a)?, p))
        .collect()
}

fn sum_of(ops: &[ArrayView2<'_, f64>]) -> Result<Array2<f64>> {
    let first = ops
        .first()
        .ok_or_else(|| Error::invalid("operators", "need at least one operator"))?;
    let mut total = first.to_owned();
    for a in &ops[1..] {
        dims_match(first.view(), a.view())?;
        total += a;
    }
    Ok(total)
}

/// `‖ΣA_j‖_{p,∞}^{p/(p+1)} ≤ Σ‖A_j‖_{p,∞}^{p/(p+1)}`.
pub fn quasinorm_triangle_check(ops: &[ArrayView2<'_, f64>], p: f64) -> Result<InequalityCheck> {
    let e = p / (p + 1.0);
    let lhs = weak_quasinorm(&singular_values(sum_of(ops)?.view())?, p)?.powf(e);
    let rhs = weak_norms(ops, p)?.iter().map(|n| n.powf(e)).sum();
    Ok(InequalityCheck::new(lhs, rhs))
}

/// `‖ΣA_j‖_{p,∞}^p ≤ (1-p)^{-1} Σ‖A_j‖_{p,∞}^p` for `p ∈ (0, 1)`.
pub fn p_triangle_check(ops: &[ArrayView2<'_, f64>], p: f64) -> Result<InequalityCheck> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", format!("needs 0 < p < 1, got {p}")));
    }
    let lhs = weak_quasinorm(&singular_values(sum_of(ops)?.view())?, p)?.powf(p);
    let rhs = weak_norms(ops, p)?.iter().map(|n| n.powf(p)).sum::<f64>() / (1.0 - p);
    Ok(InequalityCheck::new(lhs, rhs))
}

/// Relative size of `‖XᵀY‖` against `‖X‖‖Y‖` (Frobenius).
fn overlap(x: ArrayView2<'_, f64>, y: ArrayView2<'_, f64>) -> f64 {
    let frob = |m: ArrayView2<'_, f64>| m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let denom = frob(x) * frob(y);
    if denom == 0.0 {
        return 0.0;
    }
    frob(x.t().dot(&y).view()) / denom
}

/// `‖ΣA_j‖_{p,∞}^p ≤ 2(2-p)^{-1} Σ‖A_j‖_{p,∞}^p` for `p ∈ (0, 2)` and blocks
/// with `A_kᵀA_j = 0` or `A_k A_jᵀ = 0` for `j ≠ k`.
pub fn orthogonal_sum_check(blocks: &[ArrayView2<'_, f64>], p: f64) -> Result<InequalityCheck> {
    if !(p > 0.0 && p < 2.0) {
        return Err(Error::invalid("p", format!("needs 0 < p < 2, got {p}")));
    }
    let total = sum_of(blocks)?;
    // worst pair for each of the two conditions
    let worst = |f: &dyn Fn(usize, usize) -> f64| {
        (0..blocks.len())
            .flat_map(|j| (j + 1..blocks.len()).map(move |k| (j, k)))
            .map(|(j, k)| (j, k, f(j, k)))
            .fold((0, 0, 0.0f64), |acc, t| if t.2 > acc.2 { t } else { acc })
    };
    let ranges = worst(&|j, k| overlap(blocks[j], blocks[k]));
    let corows = worst(&|j, k| overlap(blocks[j].t(), blocks[k].t()));
    let tol = 1e-12;
    if ranges.2 > tol && corows.2 > tol {
        let (first, second, overlap) = if ranges.2 <= corows.2 { ranges } else { corows };
        return Err(Error::NotOrthogonal {
            first,
            second,
            overlap,
        });
    }
    let lhs = weak_quasinorm(&singular_values(total.view())?, p)?.powf(p);
    let rhs = 2.0 / (2.0 - p)
        * weak_norms(blocks, p)?
            .iter()
            .map(|n| n.powf(p))
            .sum::<f64>();
    Ok(InequalityCheck::new(lhs, rhs))
}

/// `‖(A_1; …; A_J)‖_{p,∞}^{2p/(p+2)} ≤ Σ‖A_j‖_{p,∞}^{2p/(p+2)}` for components
/// sharing their column space, stacked vertically.
pub fn block_vector_check(components: &[ArrayView2<'_, f64>], p: f64) -> Result<InequalityCheck> {
    let first = components
        .first()
        .ok_or_else(|| Error::invalid("components", "need at least one component"))?;
    if let Some(bad) = components.iter().find(|c| c.ncols() != first.ncols()) {
        return Err(Error::DimensionMismatch(format!(
            "components have {} and {} columns",
            first.ncols(),
            bad.ncols()
        )));
    }
    let stacked =
        concatenate(Axis(0), components).map_err(|e| Error::DimensionMismatch(e.to_string()))?;
    let e = 2.0 * p / (p + 2.0);
    let lhs = weak_quasinorm(&singular_values(stacked.view())?, p)?.powf(e);
    let rhs = weak_norms(components, p)?.iter().map(|n| n.powf(e)).sum();
    Ok(InequalityCheck::new(lhs, rhs))
}

/// Tally of one randomized property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub draws: usize,
    pub violations: usize,
    /// Smallest `rhs/lhs` seen; below one means a violation.
    pub worst_ratio: f64,
}

impl PropertyReport {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// Random test ensemble: independent standard normal entries, sizes in
/// `[min_size, max_size]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Ensemble {
    pub seed: u64,
    pub draws: usize,
    pub min_size: usize,
    pub max_size: usize,
}

impl Default for Ensemble {
    fn default() -> Self {
        Self {
            seed: 42,
            draws: 200,
            min_size: 20,
            max_size: 60,
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| StandardNormal.sample(rng))
}

struct Tally {
    report: PropertyReport,
}

impl Tally {
    fn new(name: &str) -> Self {
        Self {
            report: PropertyReport {
                name: name.to_string(),
                draws: 0,
                violations: 0,
                worst_ratio: f64::INFINITY,
            },
        }
    }

    /// One draw; it violates if any of its checks fails.
    fn record(&mut self, checks: &[InequalityCheck]) {
        self.report.draws += 1;
        if checks.iter().any(|c| !c.holds) {
            self.report.violations += 1;
        }
        for c in checks.iter().filter(|c| c.lhs > 0.0) {
            self.report.worst_ratio = self.report.worst_ratio.min(c.rhs / c.lhs);
        }
    }
}

/// Run all five inequality families on `ensemble.draws` random draws each.
pub fn run_property_suite(ensemble: &Ensemble) -> Result<Vec<PropertyReport>> {
    if ensemble.min_size == 0 || ensemble.min_size > ensemble.max_size {
        return Err(Error::invalid("ensemble", "need 0 < min_size ≤ max_size"));
    }
    let size = |rng: &mut ChaCha8Rng| rng.random_range(ensemble.min_size..=ensemble.max_size);
    let mut out = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(ensemble.seed);
    let mut t = Tally::new("finite-rank");
    for _ in 0..ensemble.draws {
        let (m, n) = (size(&mut rng), size(&mut rng));
        let rank = rng.random_range(1..=m.min(n) / 3);
        let p = rng.random_range(0.3..3.0);
        let a = gaussian(&mut rng, m, n);
        let k = gaussian(&mut rng, m, rank).dot(&gaussian(&mut rng, rank, n));
        let r = finite_rank_check(a.view(), k.view(), rank, p)?;
        t.record(
            &[Some(r.tail), r.doubled]
                .into_iter()
                .flatten()
                .collect::<Vec<_>>(),
        );
    }
    out.push(t.report);

    let mut rng = ChaCha8Rng::seed_from_u64(ensemble.seed.wrapping_add(1));
    let mut t = Tally::new("triangle");
    for _ in 0..ensemble.draws {
        let (m, n) = (size(&mut rng), size(&mut rng));
        let p = rng.random_range(0.2..3.0);
        let scale = rng.random_range(0.01..10.0);
        let a1 = gaussian(&mut rng, m, n);
        let a2 = gaussian(&mut rng, m, n) * scale;
        t.record(&[quasinorm_triangle_check(&[a1.view(), a2.view()], p)?]);
    }
    out.push(t.report);

    let mut rng = ChaCha8Rng::seed_from_u64(ensemble.seed.wrapping_add(2));
    let mut t = Tally::new("p-triangle");
    for _ in 0..ensemble.draws {
        let (m, n) = (size(&mut rng), size(&mut rng));
        let p = rng.random_range(0.1..0.9);
        let ops: Vec<Array2<f64>> = (0..5)
            .map(|_| {
                let scale = rng.random_range(0.1..10.0);
                gaussian(&mut rng, m, n) * scale
            })
            .collect();
        let views: Vec<_> = ops.iter().map(|a| a.view()).collect();
        t.record(&[p_triangle_check(&views, p)?]);
    }
    out.push(t.report);

    let mut rng = ChaCha8Rng::seed_from_u64(ensemble.seed.wrapping_add(3));
    let mut t = Tally::new("orthogonal-sum");
    for _ in 0..ensemble.draws {
        let (m, n) = (size(&mut rng), size(&mut rng));
        let p = rng.random_range(0.1..1.9);
        let parts = rng.random_range(2..=4usize);
        let blocks = disjoint_row_blocks(&mut rng, m, n, parts);
        let views: Vec<_> = blocks.iter().map(|a| a.view()).collect();
        t.record(&[orthogonal_sum_check(&views, p)?]);
    }
    out.push(t.report);

    let mut rng = ChaCha8Rng::seed_from_u64(ensemble.seed.wrapping_add(4));
    let mut t = Tally::new("block-vector");
    for _ in 0..ensemble.draws {
        let n = size(&mut rng);
        let p = rng.random_range(0.2..3.0);
        let parts = rng.random_range(1..=4usize);
        let comps: Vec<Array2<f64>> = (0..parts)
            .map(|_| {
                let m = size(&mut rng);
                gaussian(&mut rng, m, n)
            })
            .collect();
        let views: Vec<_> = comps.iter().map(|a| a.view()).collect();
        t.record(&[block_vector_check(&views, p)?]);
    }
    out.push(t.report);
    Ok(out)
}

/// `parts` full-size `m×n` matrices supported on disjoint row bands.
fn disjoint_row_blocks(rng: &mut ChaCha8Rng, m: usize, n: usize, parts: usize) -> Vec<Array2<f64>> {
    let mut cuts: Vec<usize> = (0..parts - 1).map(|_| rng.random_range(1..m)).collect();
    cuts.sort_unstable();
    let bounds: Vec<usize> = std::iter::once(0)
        .chain(cuts)
        .chain(std::iter::once(m))
        .collect();
    bounds
        .windows(2)
        .map(|w| {
            let mut block = Array2::zeros((m, n));
            for i in w[0]..w[1] {
                for j in 0..n {
                    block[[i, j]] = StandardNormal.sample(rng);
                }
            }
            block
        })
        .collect()
}
