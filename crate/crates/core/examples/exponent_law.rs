//! Singular-value decay of synthetic cusp kernels against `1 + α/d`.

use std::time::Instant;

use cusp_spectra::fourier::{exponent_law_experiment, ExponentLawConfig};

fn main() -> cusp_spectra::Result<()> {
    let runs = [
        (1, 0.5, 2048),
        (1, 1.0, 2048),
        (1, 1.5, 2048),
        (1, 2.0, 2048),
        (3, 1.0, 12),
    ];
    println!("d  alpha  grid  predicted  measured  window");
    for (d, alpha, n) in runs {
        let start = Instant::now();
        let law = exponent_law_experiment(&ExponentLawConfig::new(d, alpha, n))?;
        println!(
            "{d}  {alpha:<5}  {n:<4}  {:<9.4}  {:<8.4}  [{}, {}]  ({:.1}s)",
            law.predicted,
            law.fit.exponent,
            law.fit.window.start,
            law.fit.window.end,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
