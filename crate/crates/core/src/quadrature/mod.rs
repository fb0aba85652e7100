//! Deterministic adaptive quadrature and a seeded Monte-Carlo integrator.
//!
//! The adaptive integrator is the production path for every thermal and
//! angular integral. The Monte-Carlo integrator exists so that closed forms
//! and reduced integrals can be checked against an estimator that shares no
//! code with them.

mod adaptive;
mod gauss_legendre;
mod monte_carlo;

pub use adaptive::{
    integrate_1d, integrate_1d_with_breaks, integrate_nested, integrate_sphere_pair,
};
pub use gauss_legendre::GaussLegendre;
pub use monte_carlo::{
    mc_integrate, mc_integrate_many, SampleSpace, ThermalMomentum, ThermalSpeed, UnitSphere,
};

use thiserror::Error;

/// Controls the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the number of panels held at once.
    pub max_subdivisions: usize,
    /// Gauss-Legendre points per panel.
    pub nodes_per_panel: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
            nodes_per_panel: 16,
        }
    }
}

impl QuadSpec {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }

    pub fn with_abs_tol(self, abs_tol: f64) -> Self {
        Self { abs_tol, ..self }
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(QuadError::InvalidSpec(format!(
                "rel_tol must be > 0, got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(QuadError::InvalidSpec(format!(
                "abs_tol must be > 0, got {}",
                self.abs_tol
            )));
        }
        if self.nodes_per_panel < 2 {
            return Err(QuadError::InvalidSpec(format!(
                "nodes_per_panel must be >= 2, got {}",
                self.nodes_per_panel
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadError::InvalidSpec(
                "max_subdivisions must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Monte-Carlo sample budget and seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSpec {
    pub n_samples: usize,
    pub seed: u64,
}

impl McSpec {
    pub fn new(n_samples: usize, seed: u64) -> Result<Self, QuadError> {
        if n_samples == 0 {
            return Err(QuadError::InvalidSpec("n_samples must be >= 1".into()));
        }
        Ok(Self { n_samples, seed })
    }
}

/// An integral with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Absolute error bound (quadrature) or standard error (Monte Carlo).
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            evaluations: 0,
        }
    }

    /// Multiply value and error by a constant.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            evaluations: self.evaluations,
        }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error_estimate
        } else {
            self.error_estimate / self.value.abs()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error(
        "quadrature did not converge within {budget} panels: best estimate {} +/- {}",
        best.value,
        best.error_estimate
    )]
    NonConvergence { best: Estimate, budget: usize },
    #[error("invalid integration interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid quadrature specification: {0}")]
    InvalidSpec(String),
}
