use std::f64::consts::SQRT_2;

use super::{norm, sub, Vec3};

/// Distances from a configuration `(x̂, x)` to the coalescence set Σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoalescenceDistance {
    /// `min{|x|, |x - x_k| / √2}`.
    pub d_c: f64,
    /// `min{1, d_c}`.
    pub lambda: f64,
    /// `min_k |x - x_k| / √2` (`+∞` with no other particles).
    pub d_1: f64,
    /// `min{1, d_1}`.
    pub lambda_1: f64,
}

pub fn coalescence_distance(others: &[Vec3], x: &Vec3) -> CoalescenceDistance {
    let d_1 = others
        .iter()
        .map(|xk| norm(&sub(x, xk)) / SQRT_2)
        .fold(f64::INFINITY, f64::min);
    let d_c = norm(x).min(d_1);
    CoalescenceDistance {
        d_c,
        lambda: d_c.min(1.0),
        d_1,
        lambda_1: d_1.min(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn particle_at_nucleus() {
        let d = coalescence_distance(&[[1.0, 0.0, 0.0]], &[0.0, 0.0, 0.0]);
        assert_eq!(d.d_c, 0.0);
        assert_eq!(d.lambda, 0.0);
    }

    #[test]
    fn far_from_both() {
        let d = coalescence_distance(&[[1.0, 0.0, 0.0]], &[4.0, 0.0, 0.0]);
        assert!((d.d_c - 3.0 / SQRT_2).abs() < 1e-15);
        assert!((d.d_c - 2.12132).abs() < 1e-5);
        assert_eq!(d.lambda, 1.0);
    }

    #[test]
    fn nuclear_term_wins() {
        let d = coalescence_distance(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], &[0.1, 0.0, 0.0]);
        assert!((d.d_c - 0.1).abs() < 1e-15);
        assert!((d.lambda - 0.1).abs() < 1e-15);
        assert!(d.lambda <= d.lambda_1 && d.lambda_1 <= 1.0);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn point() -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(-4.0f64..4.0)
    }

    proptest! {
        #[test]
        fn distances_are_one_lipschitz(xk in prop::collection::vec(point(), 1..4), x in point(), dx in point(), eps in 1e-6f64..1.0) {
            let y = [x[0] + eps * dx[0], x[1] + eps * dx[1], x[2] + eps * dx[2]];
            let step = norm(&sub(&x, &y));
            let a = coalescence_distance(&xk, &x);
            let b = coalescence_distance(&xk, &y);
            prop_assert!((a.d_c - b.d_c).abs() <= step + 1e-12);
            prop_assert!((a.lambda - b.lambda).abs() <= step + 1e-12);
        }

        #[test]
        fn capped_distances_are_ordered(xk in prop::collection::vec(point(), 1..4), x in point()) {
            let d = coalescence_distance(&xk, &x);
            prop_assert!(d.lambda <= 1.0 && d.lambda <= d.d_c);
            prop_assert!(d.d_c <= d.d_1 && d.lambda <= d.lambda_1);
        }
    }
}
