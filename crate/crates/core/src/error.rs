use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the q-special functions, transforms, solvers and oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("invalid value for `{name}`: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{what}: s = {s} lies within {tol:e} of the pole at {pole}")]
    Pole {
        what: &'static str,
        s: Complex64,
        pole: i64,
        tol: f64,
    },

    #[error("{what} did not converge within {max_terms} terms")]
    NotConverged { what: &'static str, max_terms: usize },

    #[error("{what} overflowed while summing (argument {arg})")]
    Overflow { what: &'static str, arg: Complex64 },

    #[error("{what} is undefined at t = {t}: {reason}")]
    Domain {
        what: &'static str,
        t: f64,
        reason: &'static str,
    },

    #[error("{what}({x}) has a residual imaginary part {ratio:e} relative to its magnitude")]
    ImaginaryResidue {
        what: &'static str,
        x: f64,
        ratio: f64,
    },

    #[error("input does not decay at the window boundary: |f(edge)|/max|f| = {ratio:e}")]
    NonDecaying { ratio: f64 },

    #[error("quadrature for {what} did not reach tolerance (last change {delta:e})")]
    Quadrature { what: &'static str, delta: f64 },

    #[error("Mellin integral diverges at s = {s}: {reason}")]
    Strip { s: Complex64, reason: &'static str },

    #[error("mode coefficient system is ill-conditioned at xi = {xi}: condition number {condition:e}")]
    Conditioning { xi: f64, condition: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = QError> = std::result::Result<T, E>;
