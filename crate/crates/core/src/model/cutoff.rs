use super::{norm, Vec3};

/// `e^{-1/t}` for `t > 0`, zero otherwise.
fn flat(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Radial profile of the cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`, smooth and
/// strictly decreasing in between.
pub fn theta_radial(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = flat(2.0 - r);
        let b = flat(r - 1.0);
        a / (a + b)
    }
}

/// `d/dr` of [`theta_radial`].
pub fn theta_radial_derivative(r: f64) -> f64 {
    if r <= 1.0 || r >= 2.0 {
        return 0.0;
    }
    let u = 2.0 - r;
    let v = r - 1.0;
    let a = flat(u);
    let b = flat(v);
    let s = a + b;
    -a * b * (1.0 / (u * u) + 1.0 / (v * v)) / (s * s)
}

/// The cutoff `θ ∈ C∞₀(ℝ³)`, equal to 1 on the unit ball.
pub fn theta(x: &Vec3) -> f64 {
    theta_radial(norm(x))
}
