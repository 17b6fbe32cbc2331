//! One-particle density matrix and kinetic density matrix slices as CSV, with
//! the trace identity `∫ρ = ‖ψ‖²`.

use std::f64::consts::PI;

use cusp_spectra::density::{default_scheme, kernel_slice, rho, samples_to_csv, KernelKind};
use cusp_spectra::model::{ModelConfig, ModelWavefunction};
use cusp_spectra::quadrature::composite_gauss_legendre;
use cusp_spectra::spectra::{partial_wave_spectra, PartialWaveConfig};

fn main() -> cusp_spectra::Result<()> {
    let wf = ModelWavefunction::new(ModelConfig::two_particle(2.0, 1.0))?;
    let scheme = default_scheme(&wf)?;

    let y = [0.4, 0.0, 0.0];
    let pairs: Vec<([f64; 3], [f64; 3])> = (0..8)
        .map(|i| ([0.25 * i as f64 + 0.05, 0.1, 0.0], y))
        .collect();
    print!(
        "# gamma(x, y)\n{}",
        samples_to_csv(&kernel_slice(&wf, &scheme, KernelKind::Gamma, &pairs)?)
    );
    print!(
        "# tau(x, y)\n{}",
        samples_to_csv(&kernel_slice(&wf, &scheme, KernelKind::Tau, &pairs)?)
    );

    // ρ is radial for this model: ∫ρ = 4π∫ρ(r)r²dr, against ‖ψ‖² = tr Γ
    let (r, w) = composite_gauss_legendre(0.0, 6.0, &[1.0, 2.0], 12);
    let mut mass = 0.0;
    for (r, w) in r.iter().zip(&w) {
        mass += 4.0 * PI * w * r * r * rho(&wf, &scheme, &[0.0, 0.0, *r])?;
    }
    let trace: f64 = partial_wave_spectra(&wf, &PartialWaveConfig::default())?
        .gamma
        .iter()
        .sum();
    println!("# integral of rho = {mass:.6}, trace of Gamma = {trace:.6}");
    Ok(())
}
