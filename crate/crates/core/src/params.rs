//! Physical constants, parameter records and the dimensionless unit system.

use crate::error::ParamError;

/// Ratio `q_th a / hbar` below which the hard-sphere geometric limit is
/// considered doubtful. Callers warn, they never fail.
pub const GEOMETRIC_LIMIT_WARN: f64 = 10.0;

/// `hbar` and Boltzmann's constant in the caller's unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
    k_boltzmann: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 reduced Planck constant, J s.
    pub const HBAR_SI: f64 = 1.054_571_817e-34;
    /// CODATA 2018 Boltzmann constant, J/K.
    pub const K_BOLTZMANN_SI: f64 = 1.380_649e-23;

    pub fn new(hbar: f64, k_boltzmann: f64) -> Result<Self, ParamError> {
        Ok(Self {
            hbar: ParamError::positive("hbar", hbar)?,
            k_boltzmann: ParamError::positive("k_boltzmann", k_boltzmann)?,
        })
    }

    pub fn si() -> Self {
        Self {
            hbar: Self::HBAR_SI,
            k_boltzmann: Self::K_BOLTZMANN_SI,
        }
    }

    /// `hbar = k = 1`.
    pub fn natural() -> Self {
        Self {
            hbar: 1.0,
            k_boltzmann: 1.0,
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn k_boltzmann(&self) -> f64 {
        self.k_boltzmann
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::si()
    }
}

/// The gas: particle mass `m`, temperature `T` and number density `n`.
///
/// The thermal energy `kT` is fixed at construction, so a `BathParams` is
/// tied to the constants it was built with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    mass: f64,
    temperature: f64,
    density: f64,
    kt: f64,
}

impl BathParams {
    pub fn new(
        mass: f64,
        temperature: f64,
        density: f64,
        consts: &PhysicalConstants,
    ) -> Result<Self, ParamError> {
        let mass = ParamError::positive("bath mass", mass)?;
        let temperature = ParamError::positive("temperature", temperature)?;
        let density = ParamError::non_negative("number density", density)?;
        let kt = ParamError::positive("kT", consts.k_boltzmann() * temperature)?;
        Ok(Self {
            mass,
            temperature,
            density,
            kt,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    /// Thermal energy `kT`.
    pub fn kt(&self) -> f64 {
        self.kt
    }

    /// `beta = 1 / kT`.
    pub fn beta(&self) -> f64 {
        1.0 / self.kt
    }

    /// Most probable momentum magnitude `sqrt(2 m kT)`.
    pub fn q_thermal(&self) -> f64 {
        (2.0 * self.mass * self.kt).sqrt()
    }

    /// Same bath with a different density.
    pub fn with_density(&self, density: f64) -> Result<Self, ParamError> {
        Ok(Self {
            density: ParamError::non_negative("number density", density)?,
            ..*self
        })
    }
}

/// The Brownian particle: mass `M` and radius `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleParams {
    mass: f64,
    radius: f64,
}

impl ParticleParams {
    pub fn new(mass: f64, radius: f64) -> Result<Self, ParamError> {
        Ok(Self {
            mass: ParamError::positive("particle mass", mass)?,
            radius: ParamError::positive("particle radius", radius)?,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Scales that make `m = kT = hbar = 1`.
///
/// Dimensionless value = physical value / scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitScales {
    /// Momentum, `sqrt(m kT)`.
    pub p0: f64,
    /// Length, `hbar / p0`.
    pub l0: f64,
    /// Time, `m l0^2 / hbar`.
    pub t0: f64,
    /// Diffusion parameter (rate per area), `1 / (l0^2 t0)`.
    pub lambda0: f64,
    /// Mass, the bath particle mass.
    pub m0: f64,
}

impl UnitScales {
    pub fn momentum_to_si(&self, p: f64) -> f64 {
        p * self.p0
    }
    pub fn momentum_from_si(&self, p: f64) -> f64 {
        p / self.p0
    }
    pub fn length_to_si(&self, l: f64) -> f64 {
        l * self.l0
    }
    pub fn length_from_si(&self, l: f64) -> f64 {
        l / self.l0
    }
    pub fn time_to_si(&self, t: f64) -> f64 {
        t * self.t0
    }
    pub fn time_from_si(&self, t: f64) -> f64 {
        t / self.t0
    }
    pub fn rate_to_si(&self, r: f64) -> f64 {
        r / self.t0
    }
    pub fn rate_from_si(&self, r: f64) -> f64 {
        r * self.t0
    }
    pub fn lambda_to_si(&self, l: f64) -> f64 {
        l * self.lambda0
    }
    pub fn lambda_from_si(&self, l: f64) -> f64 {
        l / self.lambda0
    }
    pub fn area_from_si(&self, a: f64) -> f64 {
        a / (self.l0 * self.l0)
    }
    pub fn area_to_si(&self, a: f64) -> f64 {
        a * self.l0 * self.l0
    }
    pub fn density_from_si(&self, n: f64) -> f64 {
        n * self.l0 * self.l0 * self.l0
    }
    pub fn mass_from_si(&self, m: f64) -> f64 {
        m / self.m0
    }
}

/// Unit scales for a bath. "SI" in the conversion helpers means whatever
/// unit system `consts` is expressed in.
pub fn make_scales(bath: &BathParams, consts: &PhysicalConstants) -> UnitScales {
    let m = bath.mass();
    let p0 = (m * bath.kt()).sqrt();
    let l0 = consts.hbar() / p0;
    let t0 = m * l0 * l0 / consts.hbar();
    let lambda0 = 1.0 / (l0 * l0 * t0);
    UnitScales {
        p0,
        l0,
        t0,
        lambda0,
        m0: m,
    }
}

/// `q_th a / hbar` with `q_th = sqrt(2 m kT)`. The hard-sphere model assumes
/// this is large; see [`GEOMETRIC_LIMIT_WARN`].
pub fn geometric_limit_quality(
    bath: &BathParams,
    particle: &ParticleParams,
    consts: &PhysicalConstants,
) -> f64 {
    let ratio = bath.q_thermal() * particle.radius() / consts.hbar();
    if ratio < GEOMETRIC_LIMIT_WARN {
        log::warn!(
            "q_th a / hbar = {ratio:.3} is below {GEOMETRIC_LIMIT_WARN}; \
             the geometric hard-sphere cross section may be inaccurate"
        );
    }
    ratio
}
