use super::geometry::coalescence_distance;
use super::wavefunction::ModelWavefunction;
use super::Vec3;
use crate::error::{Error, Result};

/// Which function the derivative envelope is checked on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeTarget {
    /// `ψ` itself, envelope `1 + λ^{1-|m|}`.
    Psi,
    /// `e^{-F₀}ψ`, envelope `1 + λ^{2-|m|}` (antisymmetric models).
    Reduced,
}

impl DerivativeTarget {
    fn envelope_exponent(self) -> i32 {
        match self {
            DerivativeTarget::Psi => 1,
            DerivativeTarget::Reduced => 2,
        }
    }
}

/// Coalescence point a ray approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayTarget {
    Nucleus,
    Particle(usize),
}

/// Configurations `x = target + t·direction` for each `t` in `distances`.
pub fn ray_toward(
    others: &[Vec3],
    target: RayTarget,
    direction: &Vec3,
    distances: &[f64],
) -> Vec<(Vec<Vec3>, Vec3)> {
    let len = super::norm(direction);
    let unit = direction.map(|v| v / len);
    let center = match target {
        RayTarget::Nucleus => [0.0; 3],
        RayTarget::Particle(k) => others[k],
    };
    distances
        .iter()
        .map(|t| (others.to_vec(), [0, 1, 2].map(|a| center[a] + t * unit[a])))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSample {
    pub sample: usize,
    pub order: usize,
    pub lambda: f64,
    /// `max_{|m| = order} |∂^m target|`.
    pub derivative: f64,
    /// `1 + λ^{a - order}`.
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct EnvelopeReport {
    pub target: DerivativeTarget,
    pub samples: Vec<EnvelopeSample>,
    /// `(sample index, reason)` for samples that were not evaluated.
    pub skipped: Vec<(usize, String)>,
}

impl EnvelopeReport {
    pub fn max_ratio(&self, order: usize) -> Option<f64> {
        self.samples
            .iter()
            .filter(|s| s.order == order)
            .map(|s| s.ratio)
            .fold(None, |m, r| Some(m.map_or(r, |m: f64| m.max(r))))
    }

    /// Least-squares slope of `ln ratio` against `ln λ` for one order; a
    /// bounded envelope shows a slope near zero.
    pub fn trend_slope(&self, order: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .samples
            .iter()
            .filter(|s| s.order == order && s.ratio > 0.0)
            .map(|s| (s.lambda.ln(), s.ratio.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }
}

const BASE_STEPS: [f64; 4] = [0.0, 1e-5, 1e-4, 5e-3];
const MIN_STEP: f64 = 1e-6;

fn stencil(order: usize) -> &'static [(f64, f64)] {
    match order {
        0 => &[(0.0, 1.0)],
        1 => &[(-1.0, -0.5), (1.0, 0.5)],
        2 => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
        _ => &[(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)],
    }
}

fn multi_indices(order: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..=order {
        for b in 0..=order - a {
            out.push([a, b, order - a - b]);
        }
    }
    out
}

/// Nested central difference `∂^m f(x)` with step `h` on every axis.
fn partial(f: &dyn Fn(&Vec3) -> f64, x: &Vec3, m: [usize; 3], h: f64) -> f64 {
    let mut total = 0.0;
    for &(o0, c0) in stencil(m[0]) {
        for &(o1, c1) in stencil(m[1]) {
            for &(o2, c2) in stencil(m[2]) {
                let p = [x[0] + o0 * h, x[1] + o1 * h, x[2] + o2 * h];
                total += c0 * c1 * c2 * f(&p);
            }
        }
    }
    total / h.powi((m[0] + m[1] + m[2]) as i32)
}

/// Compare finite-difference derivatives in `x` with the predicted envelope
/// `1 + λ^{a-|m|}` for every order up to `max_order`.
pub fn check_derivative_envelope(
    wf: &ModelWavefunction,
    target: DerivativeTarget,
    max_order: usize,
    samples: &[(Vec<Vec3>, Vec3)],
) -> Result<EnvelopeReport> {
    if max_order > 3 {
        return Err(Error::invalid(
            "max_order",
            format!("at most 3 is supported, got {max_order}"),
        ));
    }
    let a = target.envelope_exponent();
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    for (idx, (others, x)) in samples.iter().enumerate() {
        let lambda = coalescence_distance(others, x).lambda;
        if lambda == 0.0 {
            skipped.push((idx, "sample lies on the coalescence set".to_string()));
            continue;
        }
        let f = |p: &Vec3| match target {
            DerivativeTarget::Psi => wf.eval_psi(others, p),
            DerivativeTarget::Reduced => wf.eval_reduced(others, p),
        };
        let mut rows = Vec::new();
        let mut underflow = false;
        for order in 0..=max_order {
            let h = if order == 0 {
                0.0
            } else {
                BASE_STEPS[order].min(lambda / 4.0)
            };
            if order > 0 && h < MIN_STEP {
                underflow = true;
                break;
            }
            let derivative = multi_indices(order)
                .into_iter()
                .map(|m| partial(&f, x, m, h).abs())
                .fold(0.0, f64::max);
            let envelope = 1.0 + lambda.powi(a - order as i32);
            rows.push(EnvelopeSample {
                sample: idx,
                order,
                lambda,
                derivative,
                envelope,
                ratio: derivative / envelope,
            });
        }
        if underflow {
            skipped.push((
                idx,
                format!(
                    "step underflow: λ/4 = {:e} below {MIN_STEP:e}",
                    lambda / 4.0
                ),
            ));
        } else {
            out.extend(rows);
        }
    }
    Ok(EnvelopeReport {
        target,
        samples: out,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelConfig;

    fn rays(target: RayTarget) -> Vec<(Vec<Vec3>, Vec3)> {
        let distances: Vec<f64> = (3..=10).map(|j| 2f64.powi(-j)).collect();
        ray_toward(&[[0.7, -0.4, 0.5]], target, &[0.3, 0.8, -0.5], &distances)
    }

    #[test]
    fn order_zero_ratio_is_bounded() {
        let wf = ModelWavefunction::new(ModelConfig::two_particle(2.0, 1.0)).unwrap();
        let report =
            check_derivative_envelope(&wf, DerivativeTarget::Psi, 0, &rays(RayTarget::Particle(0)))
                .unwrap();
        assert!(report.max_ratio(0).unwrap() < 1.0);
    }

    #[test]
    fn second_derivatives_of_psi_track_inverse_distance() {
        let wf = ModelWavefunction::new(ModelConfig::two_particle(2.0, 1.0)).unwrap();
        for target in [RayTarget::Particle(0), RayTarget::Nucleus] {
            let report =
                check_derivative_envelope(&wf, DerivativeTarget::Psi, 2, &rays(target)).unwrap();
            assert!(report.skipped.is_empty());
            let slope = report.trend_slope(2).unwrap();
            assert!(slope.abs() <= 0.2, "{target:?}: slope {slope}");
            // the second derivative itself does blow up like 1/λ
            let d: Vec<f64> = report
                .samples
                .iter()
                .filter(|s| s.order == 2)
                .map(|s| s.derivative)
                .collect();
            assert!(d.last().unwrap() > &(10.0 * d[0]));
        }
    }

    #[test]
    fn reduced_antisymmetric_second_derivatives_stay_bounded() {
        let wf = ModelWavefunction::new(ModelConfig::two_particle_antisymmetric(2.0)).unwrap();
        let report = check_derivative_envelope(
            &wf,
            DerivativeTarget::Reduced,
            3,
            &rays(RayTarget::Particle(0)),
        )
        .unwrap();
        for order in [2, 3] {
            let slope = report.trend_slope(order).unwrap();
            assert!(slope.abs() <= 0.2, "order {order}: slope {slope}");
        }
        let d2: Vec<f64> = report
            .samples
            .iter()
            .filter(|s| s.order == 2)
            .map(|s| s.derivative)
            .collect();
        let spread = d2.iter().copied().fold(0.0, f64::max)
            / d2.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(spread < 3.0, "second derivatives should not grow: {d2:?}");
    }

    #[test]
    fn rejects_high_orders_and_reports_underflow() {
        let wf = ModelWavefunction::new(ModelConfig::two_particle(2.0, 1.0)).unwrap();
        assert!(check_derivative_envelope(&wf, DerivativeTarget::Psi, 4, &[]).is_err());
        let samples = ray_toward(
            &[[1.0, 0.0, 0.0]],
            RayTarget::Particle(0),
            &[0.0, 1.0, 0.0],
            &[1e-7, 0.0],
        );
        let report = check_derivative_envelope(&wf, DerivativeTarget::Psi, 2, &samples).unwrap();
        assert_eq!(report.skipped.len(), 2);
    }
}
