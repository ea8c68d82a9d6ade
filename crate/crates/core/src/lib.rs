//! Pseudo-spectral laboratory for the damped Navier-Stokes equations on a
//! periodic box: force construction, time stepping with energy
//! bookkeeping, stationary solvers, spectral diagnostics and the Bessel
//! kernel of the damped resolvent.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod campaign;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod forcing;
pub mod kernels;
mod quadrature;
pub mod spectra;
pub mod spectral;
pub mod stationary;

pub use error::{LabError, Result};
