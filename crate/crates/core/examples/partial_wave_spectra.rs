//! Eigenvalues of `Γ` and `T` for the bundled two-particle models, with fitted
//! decay exponents.

use cusp_spectra::model::{ModelConfig, ModelWavefunction};
use cusp_spectra::spectra::{partial_wave_spectra, FitWindow, PartialWaveConfig, SpectrumResult};

fn main() -> cusp_spectra::Result<()> {
    let config = PartialWaveConfig {
        radial_nodes: 80,
        radial_extent: 6.0,
        max_l: 40,
        pair_nodes: 64,
    };
    let window = Some(FitWindow::new(10, 500));
    for (name, model, gamma_pred, tau_pred) in [
        (
            "generic",
            ModelConfig::two_particle(2.0, 1.0),
            8.0 / 3.0,
            2.0,
        ),
        (
            "antisymmetric",
            ModelConfig::two_particle_antisymmetric(2.0),
            10.0 / 3.0,
            8.0 / 3.0,
        ),
    ] {
        let wf = ModelWavefunction::new(model)?;
        let s = partial_wave_spectra(&wf, &config)?;
        let gamma = SpectrumResult::new(s.gamma, window, &[1.0 / gamma_pred])?;
        let tau = SpectrumResult::new(s.tau, window, &[1.0 / tau_pred])?;
        println!(
            "{name}: trace {:.6}, lambda_1 {:.6}",
            gamma.values.iter().sum::<f64>(),
            gamma.values[0]
        );
        println!(
            "  gamma exponent {:.3} (bound {gamma_pred:.3})",
            gamma.fit.exponent
        );
        println!(
            "  tau   exponent {:.3} (bound {tau_pred:.3})",
            tau.fit.exponent
        );
        for k in [1, 10, 100, 500] {
            println!(
                "  k = {k:>3}: lambda {:.3e}, tau {:.3e}",
                gamma.values[k - 1],
                tau.values[k - 1]
            );
        }
    }
    Ok(())
}
