//! Discretized operators, their singular-value spectra, and the
//! compact-operator inequalities used to combine spectral estimates.

pub mod calculus;
pub mod discretize;
pub mod fit;
pub mod linalg;
pub mod norms;
pub mod partial_wave;
pub mod result;

pub use calculus::{
    block_vector_check, finite_rank_check, orthogonal_sum_check, p_triangle_check,
    quasinorm_triangle_check, run_property_suite, Ensemble, FiniteRankReport, InequalityCheck,
    PropertyReport,
};
pub use discretize::{
    discretize_gamma, discretize_psi_map, discretize_tau, discretize_v_map, DiscretizedOperator,
    GridConfig, OperatorKind,
};
pub use fit::{auto_window, fit_decay, DecayFit, FitWindow};
pub use linalg::{asymmetry, singular_values, symmetric_eigenvalues};
pub use norms::{schatten, weak_quasinorm};
pub use partial_wave::{
    gamma_channels, merge_channels, partial_wave_spectra, tau_channels, ChannelSpectrum,
    PartialWaveConfig, PartialWaveSpectra, RadialKernels,
};
pub use result::SpectrumResult;
