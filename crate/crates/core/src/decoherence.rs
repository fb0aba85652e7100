//! The decoherence rate function `F(R)`, its asymptote and the diffusion
//! parameter `Lambda`.
//!
//! Off-diagonal position elements of the particle's density matrix decay as
//! `d rho(R1, R2)/dt = -F(R1 - R2) rho(R1, R2)` with
//!
//! ```text
//! F(R) = n int d^3p mu(p) (p/m) int dn (1 - exp(i (p - p n).R / hbar)) |f(p n, p)|^2
//! ```
//!
//! For an isotropic bath and `|f|^2` depending only on the scattering angle,
//! `F` depends on `|R|` alone. Averaging the exponential over the direction of
//! `R` turns it into `sinc(2 q R sin(theta/2) / hbar)`, which leaves a 2-D
//! integral over `q` and `theta`. That reduced form is the production path.
//! The unreduced form is kept as a Monte-Carlo oracle ([`f_of_r_full`]).

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::Error;
use crate::params::{make_scales, BathParams, ParticleParams, PhysicalConstants, UnitScales};
use crate::quadrature::{
    integrate_1d_with_breaks, integrate_nested, mc_integrate, mc_integrate_many, Estimate, McSpec,
    QuadSpec, SampleSpace, ThermalMomentum, UnitSphere,
};
use crate::scattering::{ScatteringError, ScatteringModel};
use crate::thermal::{self, speed_density, Q_CUTOFF_THERMAL};

/// Validity bound on `T F` for the first-order single-collision factor.
pub const ETA_FIRST_ORDER_LIMIT: f64 = 0.5;

/// Initial outer panels for the radial integral.
const RADIAL_PANELS: usize = 8;

/// One point of an `F(R)` curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub r: f64,
    pub f: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceResult {
    /// Diffusion parameter, rate per area.
    pub lambda: Estimate,
    /// Large-separation rate `n <v sigma>`.
    pub f_infinity: Estimate,
    pub curve: Vec<CurvePoint>,
}

impl DecoherenceResult {
    /// `F(0) = 0` and `0 <= F <= 2 F(inf)`, each up to the reported errors.
    pub fn check_bounds(&self) -> Result<(), String> {
        let finf = self.f_infinity.value;
        for p in &self.curve {
            let eps = p.error + self.f_infinity.error_estimate;
            if p.f < -eps || p.f > 2.0 * finf + eps {
                return Err(format!(
                    "F({}) = {} outside [0, 2 F(inf) = {}]",
                    p.r,
                    p.f,
                    2.0 * finf
                ));
            }
            if p.r == 0.0 && p.f.abs() > eps {
                return Err(format!("F(0) = {} is not zero", p.f));
            }
        }
        if self.lambda.value < 0.0 || finf < 0.0 {
            return Err("negative Lambda or F(inf)".into());
        }
        Ok(())
    }
}

/// `1 - sin(x)/x` without cancellation near zero.
pub fn one_minus_sinc(x: f64) -> f64 {
    let x2 = x * x;
    if x2 < 1e-2 {
        x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        1.0 - x.sin() / x
    }
}

/// The model expressed in dimensionless units.
struct Reduced<'a> {
    model: &'a ScatteringModel,
    scales: UnitScales,
    density: f64,
    x_max: f64,
}

impl<'a> Reduced<'a> {
    fn new(
        model: &'a ScatteringModel,
        bath: &BathParams,
        consts: &PhysicalConstants,
    ) -> Result<Self, ScatteringError> {
        let scales = make_scales(bath, consts);
        let x_max = Q_CUTOFF_THERMAL * std::f64::consts::SQRT_2;
        model.check_covers(scales.momentum_to_si(x_max))?;
        Ok(Self {
            model,
            scales,
            density: scales.density_from_si(bath.density()),
            x_max,
        })
    }

    /// `|f|^2` in `l0^2` at dimensionless momentum `x`.
    fn f2(&self, x: f64, theta: f64) -> f64 {
        let v = self
            .model
            .dsigma_domega(self.scales.momentum_to_si(x), theta)
            .unwrap_or(f64::NAN);
        self.scales.area_from_si(v)
    }

    fn radial_breaks(&self, extra: usize) -> Vec<f64> {
        let n = RADIAL_PANELS.max(extra);
        let mut b: Vec<f64> = (0..=n).map(|i| self.x_max * i as f64 / n as f64).collect();
        for &q in self.model.q_nodes() {
            let x = self.scales.momentum_from_si(q);
            if x > 0.0 && x < self.x_max {
                b.push(x);
            }
        }
        sorted_breaks(b)
    }

    /// `2 pi int_0^pi sin(theta) w(theta) |f|^2 dtheta` at fixed momentum.
    fn angular<W: Fn(f64) -> f64>(
        &self,
        x: f64,
        w: W,
        breaks: &[f64],
        spec: &QuadSpec,
    ) -> Result<Estimate, Error> {
        let e = integrate_1d_with_breaks(|t| t.sin() * w(t) * self.f2(x, t), breaks, spec)?;
        Ok(e.scaled(2.0 * PI))
    }
}

fn sorted_breaks(mut b: Vec<f64>) -> Vec<f64> {
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
    b
}

/// Angles where `2 kappa sin(theta/2)` crosses multiples of pi/2, so that no
/// panel spans more than a quarter period of the sinc kernel.
fn phase_breaks(kappa: f64, model_breaks: &[f64]) -> Vec<f64> {
    let max_phase = 2.0 * kappa;
    let quarter = 0.5 * PI;
    let panels = (max_phase / quarter).ceil() as usize;
    let mut b: Vec<f64> = model_breaks.to_vec();
    for j in 1..panels {
        let s = j as f64 * quarter / max_phase;
        if s < 1.0 {
            b.push(2.0 * s.asin());
        }
    }
    b.push(0.0);
    b.push(PI);
    sorted_breaks(b)
}

fn inner_spec(spec: &QuadSpec) -> QuadSpec {
    QuadSpec {
        rel_tol: spec.rel_tol * 0.1,
        abs_tol: spec.abs_tol * 0.1,
        ..*spec
    }
}

/// `F(R)` from the direction-averaged 2-D integral
/// `n int dq nu(q) (q/m) 2 pi int sin(theta) (1 - sinc(2 q R sin(theta/2)/hbar)) |f|^2 dtheta`.
pub fn f_of_r_reduced(
    model: &ScatteringModel,
    bath: &BathParams,
    consts: &PhysicalConstants,
    r: f64,
    spec: &QuadSpec,
) -> Result<Estimate, Error> {
    if !(r >= 0.0) {
        return Err(crate::error::ParamError::Negative {
            name: "separation R",
            value: r,
        }
        .into());
    }
    let red = Reduced::new(model, bath, consts)?;
    if r == 0.0 || red.density == 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    let rr = red.scales.length_from_si(r);
    let model_breaks = model.theta_breaks();
    let inner = inner_spec(spec);
    // cos(2 q R) oscillation in the radial integrand after the angular step
    let oscillation_panels = ((red.x_max * rr / PI).ceil() as usize).min(spec.max_subdivisions / 4);
    let radial = red.radial_breaks(oscillation_panels.min(RADIAL_PANELS * 4));
    let e = integrate_nested(
        |x| {
            let weight = speed_density(x) * x;
            if weight == 0.0 {
                return Ok(Estimate::exact(0.0));
            }
            let kappa = x * rr;
            let breaks = phase_breaks(kappa, &model_breaks);
            let a = red
                .angular(
                    x,
                    |t| one_minus_sinc(2.0 * kappa * (0.5 * t).sin()),
                    &breaks,
                    &inner,
                )
                .map_err(to_quad)?;
            Ok(a.scaled(weight))
        },
        &radial,
        spec,
    )?;
    Ok(e.scaled(red.density).scaled(1.0 / red.scales.t0))
}

fn to_quad(e: Error) -> crate::quadrature::QuadError {
    match e {
        Error::Quadrature(q) => q,
        other => crate::quadrature::QuadError::InvalidSpec(other.to_string()),
    }
}

/// Real and imaginary parts of the Monte-Carlo `F` estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEstimate {
    pub re: Estimate,
    pub im: Estimate,
}

/// Monte-Carlo estimate of `F(R_vec)` from the unreduced momentum-vector
/// form: `p` drawn from `mu`, the outgoing direction uniform on the sphere.
/// The imaginary part vanishes for isotropic models and is returned so that
/// callers can check it.
pub fn f_of_r_full(
    model: &ScatteringModel,
    bath: &BathParams,
    consts: &PhysicalConstants,
    r_vec: [f64; 3],
    mc: &McSpec,
) -> Result<ComplexEstimate, Error> {
    let space = (ThermalMomentum::new(bath), UnitSphere);
    let m = bath.mass();
    let hbar = consts.hbar();
    let mut failure = None;
    let [re, im] = mc_integrate_many(
        &space,
        |(p, n)| {
            let pm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            if pm == 0.0 {
                return [0.0, 0.0];
            }
            let cos_t = ((p[0] * n[0] + p[1] * n[1] + p[2] * n[2]) / pm).clamp(-1.0, 1.0);
            let f2 = match model.dsigma_domega(pm, cos_t.acos()) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            };
            let k = [p[0] - pm * n[0], p[1] - pm * n[1], p[2] - pm * n[2]];
            let phase = (k[0] * r_vec[0] + k[1] * r_vec[1] + k[2] * r_vec[2]) / hbar;
            let w = pm / m * f2;
            [w * (1.0 - phase.cos()), -w * phase.sin()]
        },
        mc,
    );
    if let Some(e) = failure {
        return Err(e.into());
    }
    let n = bath.density();
    Ok(ComplexEstimate {
        re: re.scaled(n),
        im: im.scaled(n),
    })
}

/// `Lambda = (2/3)(n/hbar^2) int dq nu(q) (q/m) q^2 2 pi int sin(theta) sin^2(theta/2) |f|^2 dtheta`.
pub fn lambda_quadrature(
    model: &ScatteringModel,
    bath: &BathParams,
    consts: &PhysicalConstants,
    spec: &QuadSpec,
) -> Result<Estimate, Error> {
    let red = Reduced::new(model, bath, consts)?;
    if red.density == 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    let breaks = model.theta_breaks();
    let inner = inner_spec(spec);
    let e = integrate_nested(
        |x| {
            let weight = speed_density(x) * x * x * x;
            if weight == 0.0 {
                return Ok(Estimate::exact(0.0));
            }
            let a = red
                .angular(x, |t| (0.5 * t).sin().powi(2), &breaks, &inner)
                .map_err(to_quad)?;
            Ok(a.scaled(weight))
        },
        &red.radial_breaks(RADIAL_PANELS),
        spec,
    )?;
    Ok(e.scaled(2.0 / 3.0 * red.density).scaled(red.scales.lambda0))
}

/// Closed form for the hard sphere, `Lambda = n pi a^2 <q^2 v> / (3 hbar^2)`.
pub fn lambda_hard_sphere(
    bath: &BathParams,
    particle: &ParticleParams,
    consts: &PhysicalConstants,
) -> f64 {
    let a = particle.radius();
    let hbar = consts.hbar();
    bath.density() * PI * a * a * thermal::thermal_average_q2v(bath) / (3.0 * hbar * hbar)
}

/// `F(inf) = n int dq nu(q) (q/m) sigma(q)`.
pub fn f_infinity(
    model: &ScatteringModel,
    bath: &BathParams,
    consts: &PhysicalConstants,
    spec: &QuadSpec,
) -> Result<Estimate, Error> {
    let red = Reduced::new(model, bath, consts)?;
    if red.density == 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    let inner = inner_spec(spec);
    let breaks = model.theta_breaks();
    let e = integrate_nested(
        |x| {
            let weight = speed_density(x) * x;
            let sigma = if model.is_momentum_independent() {
                // sigma_total is exact here; skip the angular quadrature
                let q = red.scales.momentum_to_si(x);
                let s = model
                    .sigma_total(q, &inner)
                    .map_err(|e| to_quad(e.into()))?;
                Estimate::exact(red.scales.area_from_si(s))
            } else {
                red.angular(x, |_| 1.0, &breaks, &inner).map_err(to_quad)?
            };
            Ok(sigma.scaled(weight))
        },
        &red.radial_breaks(RADIAL_PANELS),
        spec,
    )?;
    Ok(e.scaled(red.density).scaled(1.0 / red.scales.t0))
}

/// Closed form `n <v> pi a^2` for the hard sphere.
pub fn f_infinity_hard_sphere(bath: &BathParams, particle: &ParticleParams) -> f64 {
    let a = particle.radius();
    bath.density() * thermal::thermal_average_speed(bath) * PI * a * a
}

/// First-order single-collision coherence factor `eta = 1 - T F`.
///
/// Meaningful only while `T F << 1`: the elapsed time must exceed a single
/// collision time but stay well below the decoherence time. A warning is
/// logged when `T F` exceeds [`ETA_FIRST_ORDER_LIMIT`].
pub fn eta_single_collision(f_value: f64, t_elapsed: f64) -> f64 {
    let tf = t_elapsed * f_value;
    if tf > ETA_FIRST_ORDER_LIMIT {
        log::warn!(
            "eta: T F = {tf:.3} exceeds {ETA_FIRST_ORDER_LIMIT}; first-order result is unreliable"
        );
    }
    1.0 - tf
}

/// Monte-Carlo average of `[(n1 - n2) . R]^2` over directions of unit `R`,
/// for unit vectors separated by `theta`, paired with the closed form
/// `(4/3) sin^2(theta/2)`.
pub fn angular_identity_check(theta: f64, mc: &McSpec) -> (Estimate, f64) {
    let n1 = [0.0, 0.0, 1.0];
    let n2 = [theta.sin(), 0.0, theta.cos()];
    let d = [n1[0] - n2[0], n1[1] - n2[1], n1[2] - n2[2]];
    let lhs = mc_integrate(
        &UnitSphere,
        |r| {
            let x = d[0] * r[0] + d[1] * r[1] + d[2] * r[2];
            x * x
        },
        mc,
    )
    .scaled(1.0 / UnitSphere.measure());
    let rhs = 4.0 / 3.0 * (0.5 * theta).sin().powi(2);
    (lhs, rhs)
}

/// `Lambda`, `F(inf)` and `F` at each requested separation. Curve points are
/// evaluated in parallel and assembled in input order.
pub fn analyze(
    model: &ScatteringModel,
    bath: &BathParams,
    consts: &PhysicalConstants,
    r_values: &[f64],
    spec: &QuadSpec,
) -> Result<DecoherenceResult, Error> {
    let lambda = lambda_quadrature(model, bath, consts, spec)?;
    let finf = f_infinity(model, bath, consts, spec)?;
    let curve = r_values
        .par_iter()
        .map(|&r| {
            f_of_r_reduced(model, bath, consts, r, spec).map(|e| CurvePoint {
                r,
                f: e.value,
                error: e.error_estimate,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DecoherenceResult {
        lambda,
        f_infinity: finf,
        curve,
    })
}
