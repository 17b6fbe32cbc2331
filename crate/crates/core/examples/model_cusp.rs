//! Cusp slopes of a two-particle model and its derivative envelope near the
//! coalescence set.

use cusp_spectra::model::{
    check_derivative_envelope, coalescence_distance, ray_toward, DerivativeTarget, ModelConfig,
    ModelWavefunction, RayTarget,
};

/// Mean outward slope of `ln ψ` at distance `r` on opposite rays: the smooth
/// part cancels and the cusp coefficient remains.
fn cusp_slope(
    wf: &ModelWavefunction,
    others: &[[f64; 3]],
    centre: [f64; 3],
    dir: [f64; 3],
    r: f64,
) -> f64 {
    let slope = |sign: f64| {
        let at = |t: f64| [0, 1, 2].map(|a| centre[a] + sign * t * dir[a]);
        let h = r * 1e-3;
        (wf.eval_psi(others, &at(r + h)).ln() - wf.eval_psi(others, &at(r - h)).ln()) / (2.0 * h)
    };
    0.5 * (slope(1.0) + slope(-1.0))
}

fn main() -> cusp_spectra::Result<()> {
    let wf = ModelWavefunction::new(ModelConfig::two_particle(2.0, 1.0))?;
    let others = [[1.2, -0.4, 0.3]];

    println!("cusp coefficient of ln psi (mean slope over opposite rays)");
    println!("{:>8}  {:>12}  {:>12}", "r", "nucleus", "particle");
    for r in [1e-1, 1e-2, 1e-3, 1e-4] {
        let n = cusp_slope(&wf, &others, [0.0; 3], [0.0, 0.0, 1.0], r);
        let p = cusp_slope(&wf, &others, others[0], [0.0, 1.0, 0.0], r);
        println!("{r:>8.0e}  {n:>12.6}  {p:>12.6}");
    }
    println!("(expected: -Z/2 = -1 at the nucleus, +1/4 at the other particle)");

    let distances: Vec<f64> = (1..=8).map(|i| 10f64.powf(-0.5 * i as f64)).collect();
    let samples = ray_toward(&others, RayTarget::Nucleus, &[1.0, 1.0, 0.5], &distances);
    let report = check_derivative_envelope(&wf, DerivativeTarget::Psi, 2, &samples)?;
    println!("\nenvelope 1 + lambda^(1-|m|) along a ray into the nucleus");
    for order in 0..=2 {
        println!(
            "order {order}: max ratio {:.3}, trend slope {:+.3}",
            report.max_ratio(order).unwrap_or(f64::NAN),
            report.trend_slope(order).unwrap_or(f64::NAN)
        );
    }
    let d = coalescence_distance(&others, &samples[0].1);
    println!("first sample: d_c = {:.4}, lambda = {:.4}", d.d_c, d.lambda);
    Ok(())
}
