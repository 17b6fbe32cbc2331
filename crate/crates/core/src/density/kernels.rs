use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{ModelWavefunction, Vec3};
use crate::quadrature::{ball_mean_rule, QuadratureScheme};

/// Radial nodes per piece and polar nodes of the cusp-adapted rule used for
/// two-particle models.
pub const RADIAL_NODES: usize = 20;
pub const ANGULAR_NODES: usize = 24;
/// Sample count for three-particle models.
pub const LOW_DISCREPANCY_POINTS: usize = 1 << 16;
pub const DEFAULT_SEED: u64 = 42;

/// Box half-width `max(√(20/β_min), 3)`; Gaussian tails beyond it are below `e^{-20}`.
pub fn default_half_width(wf: &ModelWavefunction) -> f64 {
    (20.0 / wf.min_exponent()).sqrt().max(3.0)
}

/// Default rule over the other particles' coordinates `x̂ ∈ ℝ^{3N-3}`.
pub fn default_scheme(wf: &ModelWavefunction) -> Result<QuadratureScheme> {
    let half = default_half_width(wf);
    match wf.particles() {
        2 => QuadratureScheme::cusp_adapted(RADIAL_NODES, ANGULAR_NODES, half),
        3 => QuadratureScheme::low_discrepancy(6, LOW_DISCREPANCY_POINTS, half, DEFAULT_SEED),
        n => Err(Error::invalid(
            "particles",
            format!("quadrature defaults cover N = 2, 3, got {n}"),
        )),
    }
}

fn check_scheme(wf: &ModelWavefunction, scheme: &QuadratureScheme) -> Result<()> {
    if scheme.dim() != wf.hat_dim() {
        return Err(Error::DimensionMismatch(format!(
            "scheme integrates over ℝ^{}, model needs ℝ^{}",
            scheme.dim(),
            wf.hat_dim()
        )));
    }
    Ok(())
}

/// Split a flat node of `ℝ^{3N-3}` into particle positions.
pub fn split_positions(node: &[f64]) -> Vec<Vec3> {
    node.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()
}

fn finite(value: f64, node: usize) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteQuadrature { node })
    }
}

/// `γ(x, y) = ∫ ψ(x̂, x) ψ(x̂, y) dx̂`.
pub fn gamma_kernel(
    wf: &ModelWavefunction,
    scheme: &QuadratureScheme,
    x: &Vec3,
    y: &Vec3,
) -> Result<f64> {
    check_scheme(wf, scheme)?;
    let (nodes, weights) = scheme.rule_around(&[*x, *y]);
    let mut acc = 0.0;
    for (i, (node, w)) in nodes
        .chunks_exact(scheme.dim())
        .zip(weights.iter())
        .enumerate()
    {
        let others = split_positions(node);
        acc += finite(w * (wf.eval_psi(&others, x) * wf.eval_psi(&others, y)), i)?;
    }
    Ok(acc)
}

/// `τ(x, y) = ∫ ∇_x ψ(x̂, x) · ∇_y ψ(x̂, y) dx̂`.
pub fn tau_kernel(
    wf: &ModelWavefunction,
    scheme: &QuadratureScheme,
    x: &Vec3,
    y: &Vec3,
) -> Result<f64> {
    check_scheme(wf, scheme)?;
    let (nodes, weights) = scheme.rule_around(&[*x, *y]);
    let mut acc = 0.0;
    for (i, (node, w)) in nodes
        .chunks_exact(scheme.dim())
        .zip(weights.iter())
        .enumerate()
    {
        let others = split_positions(node);
        let gx = wf.eval_grad_psi(&others, x)?;
        let gy = wf.eval_grad_psi(&others, y)?;
        acc += finite(w * (gx[0] * gy[0] + gx[1] * gy[1] + gx[2] * gy[2]), i)?;
    }
    Ok(acc)
}

/// `ρ(x) = γ(x, x)`.
pub fn rho(wf: &ModelWavefunction, scheme: &QuadratureScheme, x: &Vec3) -> Result<f64> {
    gamma_kernel(wf, scheme, x, x)
}

/// `ρ[f](x) = ∫ |f(x̂)|² |ψ(x̂, x)|² dx̂`; `f` receives the flat `x̂`.
pub fn weighted_rho(
    wf: &ModelWavefunction,
    f: impl Fn(&[f64]) -> f64,
    scheme: &QuadratureScheme,
    x: &Vec3,
) -> Result<f64> {
    check_scheme(wf, scheme)?;
    let (nodes, weights) = scheme.rule_around(&[*x]);
    let mut acc = 0.0;
    for (i, (node, w)) in nodes
        .chunks_exact(scheme.dim())
        .zip(weights.iter())
        .enumerate()
    {
        let others = split_positions(node);
        let psi = wf.eval_psi(&others, x);
        let fv = f(node);
        acc += finite(w * (fv * fv) * (psi * psi), i)?;
    }
    Ok(acc)
}

/// Nodes per radial/polar axis of the ball rule used by [`mean_value`].
pub const BALL_RESOLUTION: usize = 12;

/// Radius `R` for [`mean_value`] when nothing better is known; the bounds
/// hold for every `R > 0`.
pub const DEFAULT_MEAN_RADIUS: f64 = 1.0;

/// `f̃_R(x̂) = (|B(0,R)|^{-1} ∫_{B(x̂,R)} |f|²)^{1/2}`.
pub fn mean_value(f: impl Fn(&[f64]) -> f64, radius: f64, center: &[f64]) -> Result<f64> {
    let (nodes, weights) = ball_mean_rule(center, radius, BALL_RESOLUTION)?;
    let dim = center.len();
    let mean: f64 = nodes
        .chunks_exact(dim)
        .zip(&weights)
        .map(|(p, w)| {
            let v = f(p);
            w * v * v
        })
        .sum();
    Ok(mean.sqrt())
}

/// One exported density/kernel value with a quadrature-error estimate from
/// the coarsened rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySample {
    pub x: Vec3,
    pub y: Vec3,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Gamma,
    Tau,
}

/// Evaluate a kernel slice `(x, y)` with error estimates `|K - K_coarse|`.
pub fn kernel_slice(
    wf: &ModelWavefunction,
    scheme: &QuadratureScheme,
    kind: KernelKind,
    pairs: &[(Vec3, Vec3)],
) -> Result<Vec<DensitySample>> {
    let coarse = scheme.coarsened()?;
    let eval = |s: &QuadratureScheme, x: &Vec3, y: &Vec3| match kind {
        KernelKind::Gamma => gamma_kernel(wf, s, x, y),
        KernelKind::Tau => tau_kernel(wf, s, x, y),
    };
    pairs
        .iter()
        .map(|(x, y)| {
            let value = eval(scheme, x, y)?;
            let error = (value - eval(&coarse, x, y)?).abs();
            Ok(DensitySample {
                x: *x,
                y: *y,
                value,
                error,
            })
        })
        .collect()
}

/// CSV with columns `x1,x2,x3,y1,y2,y3,value,quadrature_error`.
pub fn samples_to_csv(samples: &[DensitySample]) -> String {
    let mut out = String::from("x1,x2,x3,y1,y2,y3,value,quadrature_error\n");
    for s in samples {
        let cols: Vec<String> =
            s.x.iter()
                .chain(&s.y)
                .chain([&s.value, &s.error])
                .map(|v| format!("{v:.16e}"))
                .collect();
        let _ = writeln!(out, "{}", cols.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelConfig;
    use std::f64::consts::PI;

    fn separable() -> ModelWavefunction {
        let mut cfg = ModelConfig::two_particle(2.0, 1.0);
        cfg.nuclear_jastrow = false;
        cfg.pair_jastrow = false;
        ModelWavefunction::new(cfg).unwrap()
    }

    fn full() -> ModelWavefunction {
        ModelWavefunction::new(ModelConfig::two_particle(2.0, 1.0)).unwrap()
    }

    #[test]
    fn separable_gamma_factorizes() {
        let wf = separable();
        let scheme = default_scheme(&wf).unwrap();
        // ∫ e^{-2|x̂|²} = (π/2)^{3/2}
        let norm_g = (PI / 2.0).powf(1.5);
        let (x, y) = ([0.3, -0.2, 0.5], [-0.7, 0.1, 0.2]);
        let h = |p: &Vec3| (-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])).exp();
        let g = gamma_kernel(&wf, &scheme, &x, &y).unwrap();
        assert!(
            (g / (norm_g * h(&x) * h(&y)) - 1.0).abs() < 1e-8,
            "{}",
            g / (norm_g * h(&x) * h(&y)) - 1.0
        );
        let r = rho(&wf, &scheme, &x).unwrap();
        assert!((r / (norm_g * h(&x) * h(&x)) - 1.0).abs() < 1e-8);
        let t = tau_kernel(&wf, &scheme, &x, &y).unwrap();
        let dot: f64 = (0..3).map(|a| 4.0 * x[a] * y[a]).sum();
        assert!((t / (norm_g * h(&x) * h(&y) * dot) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hermitian_and_positive() {
        let wf = full();
        let scheme = QuadratureScheme::cusp_adapted(8, 8, default_half_width(&wf)).unwrap();
        let (x, y) = ([0.3, -0.2, 0.5], [-0.7, 0.1, 0.2]);
        let a = gamma_kernel(&wf, &scheme, &x, &y).unwrap();
        let b = gamma_kernel(&wf, &scheme, &y, &x).unwrap();
        assert_eq!(a, b);
        assert!(rho(&wf, &scheme, &x).unwrap() > 0.0);
        assert!(tau_kernel(&wf, &scheme, &x, &x).unwrap() > 0.0);
        assert_eq!(
            rho(&wf, &scheme, &x).unwrap(),
            gamma_kernel(&wf, &scheme, &x, &x).unwrap()
        );
    }

    #[test]
    fn self_convergence_under_refinement() {
        let wf = full();
        let scheme = default_scheme(&wf).unwrap();
        let fine = scheme.refined(2).unwrap();
        let (x, y) = ([0.3, -0.2, 0.5], [-0.4, 0.1, 0.2]);
        let a = gamma_kernel(&wf, &scheme, &x, &y).unwrap();
        let b = gamma_kernel(&wf, &fine, &x, &y).unwrap();
        assert!(((a - b) / b).abs() < 1e-4, "{a} vs {b}");
    }

    #[test]
    fn weighted_density_identities() {
        let wf = full();
        let scheme = QuadratureScheme::cusp_adapted(6, 6, default_half_width(&wf)).unwrap();
        let x = [0.2, 0.4, -0.1];
        let r = rho(&wf, &scheme, &x).unwrap();
        assert_eq!(weighted_rho(&wf, |_| 1.0, &scheme, &x).unwrap(), r);
        assert!((weighted_rho(&wf, |_| 2.0, &scheme, &x).unwrap() - 4.0 * r).abs() < 1e-14 * r);
    }

    #[test]
    fn half_space_weight_halves_a_mirror_symmetric_density() {
        let wf = full();
        // even tensor rule without offset is symmetric under x̂₃ → -x̂₃, and so is ψ when x₃ = 0
        let scheme = QuadratureScheme::tensor_gauss(3, 16, default_half_width(&wf), false).unwrap();
        let x = [0.3, 0.2, 0.0];
        let r = rho(&wf, &scheme, &x).unwrap();
        let half = weighted_rho(&wf, |p| if p[2] > 0.0 { 1.0 } else { 0.0 }, &scheme, &x).unwrap();
        assert!((half / r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn three_particle_default_is_low_discrepancy() {
        let mut cfg = ModelConfig::two_particle(2.0, 1.0);
        cfg.particles = 3;
        cfg.exponents = vec![1.0; 3];
        let wf = ModelWavefunction::new(cfg).unwrap();
        let scheme = default_scheme(&wf).unwrap();
        assert_eq!(scheme.dim(), 6);
        assert!(rho(&wf, &scheme, &[0.1, 0.0, 0.2]).unwrap() > 0.0);
        let bad = QuadratureScheme::cusp_adapted(4, 4, 3.0).unwrap();
        assert!(matches!(
            rho(&wf, &bad, &[0.0; 3]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn mean_values() {
        assert!(
            (mean_value(|_| -3.0, DEFAULT_MEAN_RADIUS, &[0.5, 0.5, 0.5]).unwrap() - 3.0).abs()
                < 1e-12
        );
        // f = x₁ on B(0, R): mean of x₁² is R²/5
        let m = mean_value(|p| p[0], 2.0, &[0.0; 3]).unwrap();
        assert!((m - (4.0f64 / 5.0).sqrt()).abs() < 1e-10);
        // small balls approach the point value
        let f = |p: &[f64]| 1.0 + p[0] * p[1] + p[2];
        let c = [0.3, 0.7, -0.2];
        let near = mean_value(f, 1e-3, &c).unwrap();
        assert!((near - f(&c).abs()).abs() < 1e-5);
        assert!(mean_value(f, 0.0, &c).is_err());
    }

    #[test]
    fn slice_export_has_error_column() {
        let wf = separable();
        let scheme = QuadratureScheme::tensor_gauss(3, 8, 4.0, true).unwrap();
        let samples = kernel_slice(
            &wf,
            &scheme,
            KernelKind::Gamma,
            &[([0.0; 3], [0.1, 0.0, 0.0])],
        )
        .unwrap();
        let csv = samples_to_csv(&samples);
        assert!(csv.starts_with("x1,x2,x3,y1,y2,y3,value,quadrature_error\n"));
        assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 8);
    }
}
