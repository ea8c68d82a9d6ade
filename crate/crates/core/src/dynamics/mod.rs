//! Time integration of the damped equations and the diagnostics built on it.

mod diagnostics;
mod evolver;
mod initial;
mod stability;

pub use diagnostics::{
    balance_residual_simpson, force_norms, gronwall_bound, gronwall_margin, kolmogorov_diagnostics, long_time_averages,
    Averages, DiagnosticsRecord, ForceNorms, KolmogorovReport, Means, StepSample,
};
pub use evolver::{courant, evolve, evolve_observed, step, step_raw, Evolution, EvolverConfig, Scheme, CFL_LIMIT};
pub use initial::{random_initial, InitialSpec};
pub use stability::{stability_experiment, StabilityReport, StabilityRun};
