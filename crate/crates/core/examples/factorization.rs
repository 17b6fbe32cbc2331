//! `Γ = Ψ*Ψ` on a shared quadrature: eigenvalues of the discretized `Γ` are the
//! squared singular values of the discretized `Ψ`.

use cusp_spectra::model::{ModelConfig, ModelWavefunction};
use cusp_spectra::spectra::{
    discretize_gamma, discretize_psi_map, singular_values, symmetric_eigenvalues, GridConfig,
};

fn main() -> cusp_spectra::Result<()> {
    let wf = ModelWavefunction::new(ModelConfig::two_particle(2.0, 1.0))?;
    let g = GridConfig {
        nodes_per_axis: 8,
        half_width: 4.0,
        hat_nodes_per_axis: 10,
    };
    let (hat, grid) = (g.hat_scheme(&wf)?, g.grid()?);
    let psi = discretize_psi_map(&wf, &hat, &grid)?;
    let gamma = discretize_gamma(&wf, &hat, &grid)?;
    let s = singular_values(psi.matrix.view())?;
    let e = symmetric_eigenvalues(gamma.matrix.view())?;
    println!(
        "Psi matrix {:?}, Gamma matrix {:?}",
        psi.matrix.dim(),
        gamma.matrix.dim()
    );
    println!(
        "{:>3}  {:>14}  {:>14}  {:>10}",
        "k", "eigenvalue", "s_k^2", "rel gap"
    );
    for k in 0..10 {
        println!(
            "{:>3}  {:>14.8e}  {:>14.8e}  {:>10.2e}",
            k + 1,
            e[k],
            s[k] * s[k],
            (e[k] - s[k] * s[k]).abs() / e[k]
        );
    }
    Ok(())
}
