//! Evolution under the decoherence master equation
//! `d rho/dt = -(i/hbar)[P^2/2M, rho] - Lambda sum_j [R_j, [R_j, rho]]`
//! and the classical Brownian-motion comparison.
//!
//! Everything here is per Cartesian axis. The master equation separates by
//! axis once `F(R) = Lambda R^2`, so one axis carries all the information.

mod classical;
mod grid;
mod moments;

pub use classical::{
    cross_check_constant, cross_check_constant_with, langevin_msd, msd_classical,
    viscosity_hard_sphere, LangevinResult, LangevinSpec, CROSS_CHECK_CONSTANT,
};
pub use grid::{evolve_grid, GridEvolver, GridState};
pub use moments::{evolve_moments, lambda_from_msd, msd_quantum, MomentState};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid dynamics configuration: {0}")]
    Config(String),
}

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T, DynamicsError> {
    Err(DynamicsError::Config(msg.into()))
}
