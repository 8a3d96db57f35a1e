use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("exponent p = {0} outside (1, inf)")]
    InvalidExponent(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("system is not biorthogonal (max deviation {deviation:e})")]
    NotBiorthogonal { deviation: f64 },

    #[error("system vectors are not unit length (max deviation {deviation:e})")]
    NotNormalized { deviation: f64 },

    #[error("degenerate system: primal matrix is not invertible")]
    DegenerateSystem,

    #[error("singular matrix in {context}")]
    Singular { context: String },

    #[error("lambda = {lambda} lies on the spectrum (nearest eigenvalue {nearest}, distance {distance:e})")]
    InSpectrum {
        lambda: Complex64,
        nearest: Complex64,
        distance: f64,
    },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("operator is not quasi-nilpotent (spectral radius {spectral_radius:e}, nilpotency residual {residual:e})")]
    NotQuasiNilpotent { spectral_radius: f64, residual: f64 },

    #[error("contour passes within {distance:e} of the spectrum (minimum allowed {minimum:e})")]
    ContourTooClose { distance: f64, minimum: f64 },

    #[error("boundary functionals cannot be eliminated (eta = {eta})")]
    SingularBoundary { eta: Complex64 },

    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
