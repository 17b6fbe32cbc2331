//! Lattice norms of the one-particle density across envelope exponents, and
//! the `M_q` coefficient with `a ≡ 1`.

use cusp_spectra::density::{
    coefficient_mq, lattice_norm, LatticeNormConfig, RadialDensity, SampledField,
};
use cusp_spectra::model::{ModelConfig, ModelWavefunction};

fn main() -> cusp_spectra::Result<()> {
    println!(
        "{:>5}  {:>10}  {:>12}  {:>12}  {:>12}",
        "beta", "mass", "|||rho|||3/8", "|||rho|||1/2", "M_3/4(1)^2"
    );
    for beta in [0.5, 1.0, 2.0] {
        let wf = ModelWavefunction::new(ModelConfig::two_particle(2.0, beta))?;
        let radial = RadialDensity::tabulate(&wf, 6.0, 481, 32)?;
        let field = SampledField::from_fn(12.5, 0.25, |x| {
            radial.at((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt())
        })?;
        let n38 = lattice_norm(&field, &LatticeNormConfig::unit(3.0 / 8.0))?;
        let n12 = lattice_norm(&field, &LatticeNormConfig::unit(0.5))?;
        let mq = coefficient_mq(|_| 1.0, &field, 0.75, 4)?;
        println!(
            "{beta:>5}  {:>10.4e}  {:>12.4e}  {:>12.4e}  {:>12.4e}",
            field.total(),
            n38.value,
            n12.value,
            mq.value.powi(2)
        );
    }
    Ok(())
}
