use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the bound machinery, the simulator and the sweep writers.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A root bracket did not show the sign change the bound lemmas promise.
    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// The bound iteration hit its cap before the fixed-point residual fell below tolerance.
    #[error("bound iteration did not converge after {iters} steps (residual {residual:e})")]
    Convergence { iters: usize, residual: f64 },

    /// The state fell to the point where the delay a + c*u is no longer positive.
    #[error("delay collapsed at t = {t}: u = {u} gives a + c*u <= 0")]
    DelayCollapse { t: f64, u: f64 },

    #[error("step {step} exceeds the limit a/4 = {limit}")]
    StepTooLarge { step: f64, limit: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
