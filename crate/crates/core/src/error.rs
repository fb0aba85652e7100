use thiserror::Error;

use crate::dynamics::DynamicsError;
use crate::quadrature::QuadError;
use crate::scattering::ScatteringError;

/// Invalid physical parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} must be strictly positive and finite, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative and finite, got {value}")]
    Negative { name: &'static str, value: f64 },
}

impl ParamError {
    pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64, ParamError> {
        if value.is_finite() && value > 0.0 {
            Ok(value)
        } else {
            Err(ParamError::NotPositive { name, value })
        }
    }

    pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64, ParamError> {
        if value.is_finite() && value >= 0.0 {
            Ok(value)
        } else {
            Err(ParamError::Negative { name, value })
        }
    }
}

/// Crate-wide error for operations that span several modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

impl Error {
    /// True when the failure is a numerical non-convergence rather than bad input.
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::Quadrature(QuadError::NonConvergence { .. }))
    }
}
