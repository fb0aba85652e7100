use super::{config, DynamicsError};
use crate::params::PhysicalConstants;

/// Second moments along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    /// `<R^2>`
    pub xx: f64,
    /// `<RP + PR>`
    pub xp: f64,
    /// `<P^2>`
    pub pp: f64,
    pub t: f64,
}

impl MomentState {
    pub fn zero() -> Self {
        Self {
            xx: 0.0,
            xp: 0.0,
            pp: 0.0,
            t: 0.0,
        }
    }

    /// Moments of a minimum-uncertainty Gaussian of position spread `sigma`.
    pub fn gaussian(sigma: f64, consts: &PhysicalConstants) -> Self {
        let hbar = consts.hbar();
        Self {
            xx: sigma * sigma,
            xp: 0.0,
            pp: hbar * hbar / (4.0 * sigma * sigma),
            t: 0.0,
        }
    }

    /// `xx >= 0`, `pp >= 0` and `xx pp >= (xp/2)^2`.
    pub fn is_physical(&self) -> bool {
        self.xx >= 0.0
            && self.pp >= 0.0
            && self.xx * self.pp >= 0.25 * self.xp * self.xp * (1.0 - 1e-12)
    }

    fn derivative(&self, lambda: f64, mass: f64, hbar: f64) -> [f64; 3] {
        [
            self.xp / mass,
            2.0 * self.pp / mass,
            2.0 * hbar * hbar * lambda,
        ]
    }
}

/// Classical-RK4 integration of
/// `d<R^2>/dt = <{R,P}>/M`, `d<{R,P}>/dt = 2<P^2>/M`, `d<P^2>/dt = 2 hbar^2 Lambda`.
///
/// The exact solution is a cubic in `t`, which RK4 reproduces to rounding.
/// Returns every step including the initial state; the last step is
/// shortened so the trajectory ends exactly at `t_end`.
pub fn evolve_moments(
    initial: MomentState,
    lambda: f64,
    mass: f64,
    consts: &PhysicalConstants,
    t_end: f64,
    dt: f64,
) -> Result<Vec<MomentState>, DynamicsError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return config(format!("time step must be positive, got {dt}"));
    }
    if !(mass > 0.0) {
        return config(format!("particle mass must be positive, got {mass}"));
    }
    if !(lambda >= 0.0) {
        return config(format!("Lambda must be non-negative, got {lambda}"));
    }
    if !(t_end >= initial.t) {
        return config(format!(
            "t_end {t_end} precedes the initial time {}",
            initial.t
        ));
    }
    let hbar = consts.hbar();
    let span = t_end - initial.t;
    let steps = (span / dt).ceil().max(0.0) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(initial);
    let mut s = initial;
    for i in 0..steps {
        let t_next = if i + 1 == steps {
            t_end
        } else {
            initial.t + (i + 1) as f64 * dt
        };
        let h = t_next - s.t;
        let add = |s: &MomentState, k: [f64; 3], c: f64| MomentState {
            xx: s.xx + c * k[0],
            xp: s.xp + c * k[1],
            pp: s.pp + c * k[2],
            t: s.t + c,
        };
        let k1 = s.derivative(lambda, mass, hbar);
        let k2 = add(&s, k1, 0.5 * h).derivative(lambda, mass, hbar);
        let k3 = add(&s, k2, 0.5 * h).derivative(lambda, mass, hbar);
        let k4 = add(&s, k3, h).derivative(lambda, mass, hbar);
        let comb = |j: usize| (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * h / 6.0;
        s = MomentState {
            xx: s.xx + comb(0),
            xp: s.xp + comb(1),
            pp: s.pp + comb(2),
            t: t_next,
        };
        out.push(s);
    }
    Ok(out)
}

/// `<R_j^2> = 2 Lambda hbar^2 t^3 / (3 M^2)` for a particle starting at rest
/// at the origin.
pub fn msd_quantum(lambda: f64, mass: f64, t: f64, consts: &PhysicalConstants) -> f64 {
    let hbar = consts.hbar();
    2.0 * lambda * hbar * hbar * t * t * t / (3.0 * mass * mass)
}

/// Invert [`msd_quantum`] for `Lambda`.
pub fn lambda_from_msd(msd: f64, mass: f64, t: f64, consts: &PhysicalConstants) -> f64 {
    let hbar = consts.hbar();
    3.0 * mass * mass * msd / (2.0 * hbar * hbar * t * t * t)
}
