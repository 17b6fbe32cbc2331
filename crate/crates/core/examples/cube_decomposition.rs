//! Unit-cube decomposition of a weighted cusp kernel: the weak quasi-norm of
//! the whole operator against the aggregated pieces and the lattice sum.

use std::f64::consts::PI;

use cusp_spectra::fourier::{
    cube_decomposition_norm, synth_kernel, Amplitude, SampleGrid, Trajectory,
};

fn main() -> cusp_spectra::Result<()> {
    let kernel = synth_kernel(
        1,
        1.0,
        vec![Trajectory::scaled(vec![0.05], 0.97)],
        Amplitude::default(),
    )?;
    let t = SampleGrid::midpoint(1, 128, -PI, PI)?;
    let q = 2.0 / 3.0;
    for (name, weight) in [
        (
            "a = 1",
            Box::new(|_: &[f64]| 1.0) as Box<dyn Fn(&[f64]) -> f64>,
        ),
        ("a = e^{-x^2}", Box::new(|x: &[f64]| (-x[0] * x[0]).exp())),
    ] {
        let d = cube_decomposition_norm(&kernel, &*weight, q, &t, 64)?;
        println!(
            "{name}: lhs {:.4e} <= aggregated {:.4e} ({}), lattice sum {:.4e}, {} cubes",
            d.lhs,
            d.aggregated,
            if d.holds() { "holds" } else { "VIOLATED" },
            d.lattice_sum,
            d.pieces.len()
        );
        for p in &d.pieces {
            println!(
                "  cube {:?}: weak norm {:.3e}, sup a {:.3}",
                p.index, p.weak_norm, p.weight_sup
            );
        }
    }
    Ok(())
}
