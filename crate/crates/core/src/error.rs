use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Laplace variable {s} is outside the closed right half-plane")]
    LeftHalfPlane { s: Complex64 },

    #[error("kernel term is singular at s = 0")]
    SingularAtOrigin,

    #[error("degenerate polynomial: all coefficients are zero")]
    DegeneratePolynomial,

    #[error("impedance vanishes at s = {s}; an admittance formulation is required")]
    ZeroImpedance { s: Complex64 },

    #[error("bank mode mismatch: expected {expected}, got {found}")]
    ModeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("delay alignment: tau = {tau} is not an integer multiple of dt = {dt}")]
    DelayAlignment { tau: f64, dt: f64 },

    #[error("singular step matrix (zero pivot at row {row}, |pivot| = {pivot:e})")]
    SingularStep { row: usize, pivot: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("eigensolver failed to converge for a {dim}x{dim} matrix")]
    EigenNoConvergence { dim: usize },

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
