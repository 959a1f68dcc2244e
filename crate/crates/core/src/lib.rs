// Validation is written as !(x > 0.0) so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle_operators;
pub mod degeneration_lab;
pub mod determinant;
pub mod error;
pub mod flat_torus;
pub mod slit_constants;
pub mod special_fn;
pub mod surgery;
pub mod tau_calculus;

pub use determinant::{RegularizationModel, ZetaDetResult};
pub use error::{Error, Result};
