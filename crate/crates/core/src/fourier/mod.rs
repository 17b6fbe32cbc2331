//! Synthetic cusp kernels, Fourier decay of cusp functions, truncation of
//! cube Fourier series, and the singular-value exponent law `1 + α/d`.

mod cube;
mod exponent_law;
mod grid;
mod kernel;
mod transform;

pub use cube::{
    cube_decomposition_norm, cube_fourier_coeffs, frequencies, truncation_rank_bound,
    truncation_sweep, CubeDecomposition, CubeFourierModel, CubePiece, TruncationBound,
};
pub use exponent_law::{exponent_law_experiment, ExponentLaw, ExponentLawConfig};
pub use grid::{kernel_matrix, SampleGrid};
pub use kernel::{
    check_kernel_envelope, cusp_profile, synth_kernel, Amplitude, KernelEnvelopeReport,
    SyntheticCuspKernel, Trajectory, DEFAULT_ENVELOPE_BOUND,
};
pub use transform::{
    default_shells, fourier_decay_fit, least_squares, log_shells, FourierDecay, RadialCuspFunction,
    RadialProfile, MIN_DECADES,
};
