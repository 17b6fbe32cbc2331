use crate::error::{Error, Result};

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "p",
            format!("must be positive and finite, got {p}"),
        ))
    }
}

/// `‖A‖_p = (Σ s_k^p)^{1/p}`.
pub fn schatten(values: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(values
        .iter()
        .map(|s| s.abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p))
}

/// `‖A‖_{p,∞} = max_k s_k k^{1/p}` over a non-increasing list.
pub fn weak_quasinorm(values: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(values
        .iter()
        .enumerate()
        .map(|(k, s)| s.abs() * ((k + 1) as f64).powf(1.0 / p))
        .fold(0.0, f64::max))
}
