use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("operator is not Hermitian (max |A - A^dagger| = {deviation:e}, allowed {allowed:e})")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("potential is not finite at q = {q}")]
    NonFinitePotential { q: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "no eigenvalue within {zero_tolerance:e} of zero (nearest is {nearest:e}); \
         snap the constant c to a computed level instead"
    )]
    NoZeroEigenvalue { nearest: f64, zero_tolerance: f64 },

    #[error("spectral gap is zero; the bound 1/(L Delta) is undefined")]
    ZeroGap,

    #[error("haar average requires an integer spectrum; eigenvalue {eigenvalue} is off by {offset:e}")]
    NonIntegerSpectrum { eigenvalue: f64, offset: f64 },

    #[error("quadrature did not converge: {0}")]
    NotConverged(String),

    #[error("{0}")]
    Unsupported(String),
}
