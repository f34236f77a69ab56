use thiserror::Error;

/// Errors raised by the numerical routines and the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the range where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// `p` is not in the range required by the named result.
    #[error("p = {p} outside the admissible range {range} for {theorem}")]
    PRange { p: f64, range: String, theorem: String },

    /// The weight is not in L^p on the sphere.
    #[error("weight not in L^{p}: p*beta = {product} must stay below the critical exponent {critical}")]
    NotInLp { p: f64, product: f64, critical: f64 },

    /// A weight was evaluated at its singular point.
    #[error("weight is singular at theta = {theta}")]
    SingularPoint { theta: f64 },

    /// A quadrature sample is NaN or infinite.
    #[error("non-finite sample {value} at node {index} (theta = {theta})")]
    NonFinite { index: usize, theta: f64, value: f64 },

    /// A radial integral of a trial function diverges.
    #[error("radial integral diverges at {end}")]
    Divergent { end: &'static str },

    /// An iterative method did not meet its tolerance.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// A root-finding bracket does not enclose a sign change.
    #[error("bracket [{lo}, {hi}] does not enclose a solution")]
    Bracket { lo: f64, hi: f64 },

    /// The requested point lies outside the sampled part of the alpha-mu curve.
    #[error("mu = {mu} exceeds the sampled curve range (max {max}); extend the sampling")]
    CurveRange { mu: f64, max: f64 },

    /// Inconsistent or malformed user input.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
