//! Reduced kernels `γ`, `τ`, densities and lattice norms.

pub mod kernels;
pub mod lattice;
pub mod radial;

pub use kernels::{
    default_half_width, default_scheme, gamma_kernel, kernel_slice, mean_value, rho,
    samples_to_csv, split_positions, tau_kernel, weighted_rho, DensitySample, KernelKind,
    DEFAULT_MEAN_RADIUS,
};
pub use lattice::{coefficient_mq, lattice_norm, LatticeNorm, LatticeNormConfig, SampledField};
pub use radial::RadialDensity;
