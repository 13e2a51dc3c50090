use thiserror::Error;

/// Errors raised by state construction, protocol building and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("expected 2 or 3 amplitudes, got {0}")]
    UnsupportedDimension(usize),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("operator is not unitary (max |U^dagger U - I| = {0:e})")]
    NotUnitary(f64),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("theta = {0} rad lies outside [0, pi/4]")]
    ThetaOutOfRange(f64),

    #[error("overlap = {0} lies outside [0, 1]")]
    OverlapOutOfRange(f64),

    #[error("invalid priors p_a = {0}, p_b = {1}")]
    InvalidPriors(f64, f64),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid noise profile: {0}")]
    InvalidNoise(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
