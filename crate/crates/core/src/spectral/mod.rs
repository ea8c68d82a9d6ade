//! Band-limited periodic vector fields and the operators acting on them.

mod fft;
mod field;
mod grid;
mod multiplier;
mod norms;
mod ops;
pub mod snapshot;

pub use field::{ScalarField, SpectralField, VectorSamples};
pub use grid::GridSpec;
pub use multiplier::Multiplier;
pub use norms::{lp_norm_samples, norm, NormKind};
pub use ops::{
    band_project, bilinear_b, bilinear_b_exact, gradient_part, inner_product, leray_project, nonlinear_term,
    tensor_divergence, tensor_divergence_exact, Band,
};

pub(crate) use field::{forward_scalar, inverse_scalar};
