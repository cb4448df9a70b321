use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice basis is degenerate (|det| = {det:e}, threshold {threshold:e})")]
    DegenerateBasis { det: f64, threshold: f64 },

    #[error("grid resolution must be even and at least 2, got {0}")]
    OddResolution(usize),

    #[error("symbol b(xi) is rank deficient on the unit sphere (alpha0 = {alpha0:e}, alpha1 = {alpha1:e})")]
    RankDeficientSymbol { alpha0: f64, alpha1: f64 },

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("coefficient field is not positive definite: min sampled eigenvalue {0:e}")]
    NotPositiveField(f64),

    #[error("field is not hermitian: skew part {0:e}")]
    NotHermitianField(f64),

    #[error("cell solver breakdown: {0}")]
    SolverBreakdown(String),

    #[error("mesh too coarse for eps = {eps}: h = {h} exceeds {limit}")]
    ResolutionViolation { eps: f64, h: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator is not positive definite (smallest eigenvalue probe {probe:e})")]
    NotPositiveDefinite { probe: f64 },

    #[error("no admissible lambda up to {0}")]
    LambdaSearchFailed(f64),

    #[error("extension margin too small: {0}")]
    MarginTooSmall(String),

    #[error("shift {zeta} lies too close to the spectrum")]
    NearSpectrumShift { zeta: num_complex::Complex64 },

    #[error("eigensolver failure: {0}")]
    EigSolverFailure(String),

    #[error("forcing time grid too coarse: {0}")]
    ForcingGridTooCoarse(String),

    #[error("time step {dt:e} violates the stability bound {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("rate fit needs at least {needed} points with nonzero error, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("all errors are exactly zero")]
    ZeroError,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
