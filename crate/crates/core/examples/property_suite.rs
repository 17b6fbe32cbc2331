//! Randomized checks of the Schatten-class inequalities.

use cusp_spectra::spectra::{run_property_suite, Ensemble};

fn main() -> cusp_spectra::Result<()> {
    let ensemble = Ensemble::default();
    println!(
        "{} draws per property, sizes {}..={}",
        ensemble.draws, ensemble.min_size, ensemble.max_size
    );
    for r in run_property_suite(&ensemble)? {
        println!(
            "{:<15} violations {:>3}  worst rhs/lhs {:.4}",
            r.name, r.violations, r.worst_ratio
        );
    }
    Ok(())
}
