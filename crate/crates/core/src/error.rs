use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the domain of the model (negative height, zero density...).
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The model is mathematically undefined for the given inputs.
    #[error("model domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature or root finding did not reach the requested accuracy.
    #[error("numerical failure in {context}: achieved error {achieved:.3e}, requested {requested:.3e}")]
    Numerical {
        context: &'static str,
        achieved: f64,
        requested: f64,
    },

    /// A regulatory power or height cap was exceeded without the override flag.
    #[error("regulatory cap exceeded: {0} (pass --override-regulatory to allow)")]
    Regulatory(String),

    #[error("config error: {0}")]
    Config(String),

    /// Conditioned Monte Carlo sampling could not find an accepted realization.
    #[error("rejection sampling stalled after {attempts} consecutive rejections (replication {replication})")]
    Rejection { replication: u64, attempts: u64 },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical { .. } | Error::Rejection { .. })
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {value}")))
    }
}
