use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("resolution mismatch: field has N = {field}, expected N = {expected}")]
    ResolutionMismatch { field: usize, expected: usize },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("empty band: no lattice mode with {lo} <= |xi| <= {hi}")]
    EmptyBand { lo: f64, hi: f64 },
    #[error("negative-order operator applied to a field with nonzero mean (|mean| = {0:e})")]
    NonzeroMean(f64),
    #[error("unsupported norm: {0}")]
    UnsupportedNorm(String),
    #[error("force lattice incompatible with the box: {0}")]
    Lattice(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("CFL limit violated: dt = {dt:e}, courant number = {courant:.3}")]
    Cfl { dt: f64, courant: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("quantity undefined: {0}")]
    Undefined(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("snapshot format: {0}")]
    Snapshot(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
