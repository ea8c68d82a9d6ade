//! Stationary solutions: Picard contraction, the Oseen series and the
//! Catalan bookkeeping behind its convergence.

mod catalan;
mod gevrey;
mod oseen;
mod picard;

pub use catalan::{catalan, catalan_partial_sums, catalan_sequence, catalan_series, generating_function, ln_big};
pub use gevrey::{gevrey_picard_check, log_convex_increasing, GevreyPoint};
pub use oseen::{oseen_expand, OseenExpansion, OseenLedger, OseenTerm};
pub use picard::{
    apriori_margins, effective_alpha, empirical_bilinear_constant, fixed_point_map, picard_solve, pressure_defect,
    pressure_recover, resolvent, stationary_residual, variant_bilinear, working_norm, AprioriMargins, PicardConfig,
    PicardOutcome, Variant, Verdict,
};
