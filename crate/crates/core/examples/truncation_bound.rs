//! `s_{2m} ≤ m^{-1/2} ‖T - T_M‖₂` for truncated cube Fourier series of a
//! `d = 1` cusp kernel.

use std::f64::consts::PI;

use cusp_spectra::fourier::{synth_kernel, truncation_sweep, Amplitude, SampleGrid, Trajectory};

fn main() -> cusp_spectra::Result<()> {
    let kernel = synth_kernel(
        1,
        1.0,
        vec![Trajectory::scaled(vec![0.05], 0.97)],
        Amplitude::default(),
    )?;
    let t = SampleGrid::midpoint(1, 256, -PI, PI)?;
    println!(
        "{:>3}  {:>3}  {:>12}  {:>12}  {:>8}",
        "M", "m", "bound", "s_2m", "ratio"
    );
    for b in truncation_sweep(&kernel, &t, &[2, 4, 8, 16, 32, 64], 2048)? {
        println!(
            "{:>3}  {:>3}  {:>12.4e}  {:>12.4e}  {:>8.2}  {}",
            b.order,
            b.m,
            b.bound,
            b.actual,
            b.ratio(),
            if b.holds() { "holds" } else { "VIOLATED" }
        );
    }
    Ok(())
}
