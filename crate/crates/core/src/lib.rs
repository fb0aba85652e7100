//! Collisional decoherence of a heavy particle in a dilute thermal gas.
//!
//! The crate computes the decoherence rate function `F(R)` for off-diagonal
//! position coherences, its large-separation asymptote `n<v sigma>`, the
//! small-separation diffusion parameter `Lambda` (`F(R) ~ Lambda R^2`), and
//! the Brownian spreading `<R^2>(t)` that follows from the corresponding
//! master equation. A classical Brownian-motion path (drag coefficient of a
//! hard sphere, Langevin simulation) is provided as an independent check of
//! the quantum result.
//!
//! Public functions accept quantities in the caller's unit system, described
//! by [`PhysicalConstants`]. Quadrature-heavy code converts to dimensionless
//! units via [`UnitScales`] internally.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decoherence;
pub mod dynamics;
pub mod error;
pub mod params;
pub mod quadrature;
pub mod scattering;
pub mod thermal;

pub use decoherence::DecoherenceResult;
pub use dynamics::{GridState, LangevinSpec, MomentState};
pub use error::{Error, ParamError};
pub use params::{BathParams, ParticleParams, PhysicalConstants, UnitScales};
pub use quadrature::{Estimate, McSpec, QuadError, QuadSpec};
pub use scattering::{CrossSectionTable, ScatteringError, ScatteringModel};
pub use thermal::MomentumDistribution;
