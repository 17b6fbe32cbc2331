use super::cutoff::theta_radial;
use super::{norm, sub, Vec3};

fn cut_norm(v: &Vec3) -> f64 {
    let r = norm(v);
    r * theta_radial(r)
}

/// Nuclear factor of the distinguished particle: `-(Z/2)|x|θ(x)`.
pub fn jastrow_f0(x: &Vec3, z: f64) -> f64 {
    -0.5 * z * cut_norm(x)
}

/// The remainder `F - F₀`: pair terms involving `x`, plus every term of the
/// other `N - 1` particles.
pub fn jastrow_f1(others: &[Vec3], x: &Vec3, z: f64) -> f64 {
    let pair_x: f64 = others.iter().map(|xk| cut_norm(&sub(x, xk))).sum();
    let nuclear: f64 = others.iter().map(cut_norm).sum();
    let mut pair_rest = 0.0;
    for (j, xj) in others.iter().enumerate() {
        for xk in &others[j + 1..] {
            pair_rest += cut_norm(&sub(xj, xk));
        }
    }
    0.25 * pair_x - 0.5 * z * nuclear + 0.25 * pair_rest
}

/// Full regularized Jastrow exponent
/// `F = -(Z/2) Σ_j |x_j|θ(x_j) + (1/4) Σ_{j<k} |x_j - x_k|θ(x_j - x_k)`,
/// computed directly over all `N` positions (`x` is the last one).
pub fn jastrow_f(others: &[Vec3], x: &Vec3, z: f64) -> f64 {
    let mut all: Vec<Vec3> = others.to_vec();
    all.push(*x);
    let nuclear: f64 = all.iter().map(cut_norm).sum();
    let mut pair = 0.0;
    for j in 0..all.len() {
        for k in j + 1..all.len() {
            pair += cut_norm(&sub(&all[j], &all[k]));
        }
    }
    -0.5 * z * nuclear + 0.25 * pair
}
