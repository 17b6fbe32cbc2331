// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod experiment;
pub mod fourier;
pub mod model;
pub mod quadrature;
pub mod spectra;

pub use error::{Error, Result};
