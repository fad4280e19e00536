use thiserror::Error;

/// Errors produced by the numerical laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration value (scale, exponent, table layout, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Ill-formed arguments (empty sets, inverted intervals, ...).
    #[error("argument error: {0}")]
    Argument(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A tabulated function was evaluated outside its table.
    #[error("extrapolation outside table range [{lo}, {hi}] at t = {t}")]
    Extrapolation { t: f64, lo: f64, hi: f64 },

    /// Adaptive quadrature hit its subdivision limit.
    #[error("quadrature did not converge: value {value}, error estimate {error}")]
    Quadrature { value: f64, error: f64 },

    /// A bracketing root finder could not bracket or converge.
    #[error("root bracketing failed: {0}")]
    Bracket(String),

    /// Iterative solver failed; carries the residual history.
    #[error("solver did not converge after {iterations} iterations (last residual {last})")]
    NonConvergence {
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    /// A constructive step (corkscrew, chain, shooting) found no admissible output.
    #[error("construction failed: {0}")]
    Construction(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the caller's inputs rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Config(_)
                | Error::Argument(_)
                | Error::Precondition(_)
                | Error::Extrapolation { .. }
                | Error::Parse(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
