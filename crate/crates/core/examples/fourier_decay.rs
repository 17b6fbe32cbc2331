//! Fourier envelope of `e^{-|x|}` times a smooth window, against the closed
//! form `(1 + |ξ|²)^{-(d+1)/2}`.

use cusp_spectra::fourier::{default_shells, fourier_decay_fit, RadialCuspFunction, RadialProfile};

fn main() -> cusp_spectra::Result<()> {
    for dim in [1, 3] {
        let u = RadialCuspFunction::exponential(dim)?;
        let fit = fourier_decay_fit(&u, &default_shells())?;
        println!(
            "d = {dim}: exponent {:.3}, predicted {}",
            fit.exponent, fit.predicted
        );
        for i in (0..fit.shells.len()).step_by(8) {
            println!(
                "  |xi| {:>8.2}  envelope {:.4e}",
                fit.shells[i], fit.envelope[i]
            );
        }
    }
    let cusp = RadialCuspFunction::new(3, 0.5, RadialProfile::Power(0.5))?;
    let fit = fourier_decay_fit(&cusp, &default_shells())?;
    println!(
        "d = 3, |x|^0.5 cusp: exponent {:.3}, predicted {}",
        fit.exponent, fit.predicted
    );
    Ok(())
}
