use ndarray::{Array2, ArrayView2};
use ndarray_linalg::{EigValsh, SVD, UPLO};

use crate::error::{Error, Result};

/// Singular values of `matrix`, non-increasing; `min(rows, cols)` of them.
pub fn singular_values(matrix: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix", "entries must be finite"));
    }
    if matrix.is_empty() {
        return Ok(Vec::new());
    }
    let owned: Array2<f64> = matrix.to_owned();
    let (_, s, _) = owned.svd(false, false)?;
    let mut values = s.to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Eigenvalues of a symmetric matrix, non-increasing.
pub fn symmetric_eigenvalues(matrix: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    let (rows, cols) = matrix.dim();
    if rows != cols {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {rows}×{cols}"
        )));
    }
    let owned: Array2<f64> = matrix.to_owned();
    let mut values = owned.eigvalsh(UPLO::Lower)?.to_vec();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Largest `|a_ij - a_ji|`.
pub fn asymmetry(matrix: ArrayView2<'_, f64>) -> f64 {
    let n = matrix.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((matrix[[i, j]] - matrix[[j, i]]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn diagonal_values() {
        let a = array![[3.0, 0.0], [0.0, 4.0]];
        assert_eq!(singular_values(a.view()).unwrap(), vec![4.0, 3.0]);
    }

    #[test]
    fn rectangular_count() {
        let a = Array2::<f64>::ones((5, 2));
        assert_eq!(singular_values(a.view()).unwrap().len(), 2);
        assert!(singular_values(array![[f64::NAN]].view()).is_err());
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = Array2::from_shape_fn((30, 30), |_| StandardNormal.sample(&mut rng));
        let s = singular_values(a.view()).unwrap();
        let gram = a.t().dot(&a);
        let e = symmetric_eigenvalues(gram.view()).unwrap();
        for (sv, ev) in s.iter().zip(&e) {
            assert!(
                (sv * sv - ev).abs() <= 1e-10 * e[0],
                "{} vs {}",
                sv * sv,
                ev
            );
        }
    }
}
