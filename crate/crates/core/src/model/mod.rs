//! Model wavefunctions with prescribed Coulomb cusp structure.
//!
//! A configuration of `N` particles is split as `(x̂, x)` where `x̂` holds the
//! first `N - 1` positions and `x` is the distinguished particle. Everything
//! here is pure and re-entrant.

mod cutoff;
mod envelope_check;
mod geometry;
mod jastrow;
mod probes;
mod wavefunction;

pub use cutoff::{theta, theta_radial, theta_radial_derivative};
pub use envelope_check::{
    check_derivative_envelope, ray_toward, DerivativeTarget, EnvelopeReport, EnvelopeSample,
    RayTarget,
};
pub use geometry::{coalescence_distance, CoalescenceDistance};
pub use jastrow::{jastrow_f, jastrow_f0, jastrow_f1};
pub use probes::{coalescence_probes, lipschitz_check, LipschitzReport, VanishingReport};
pub use wavefunction::{EnvelopeKind, ModelConfig, ModelWavefunction, Symmetry};

/// A point in ℝ³.
pub type Vec3 = [f64; 3];

pub(crate) fn norm(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
