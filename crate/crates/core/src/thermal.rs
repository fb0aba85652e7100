//! Maxwell-Boltzmann momentum densities and thermal averages.
//!
//! `mu(p)` is the density of bath momentum vectors and `nu(q)` the density of
//! their magnitudes, `nu(q) = 4 pi q^2 mu(|p| = q)`. Every closed-form thermal
//! average here has a quadrature twin that integrates `nu` directly.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::Rng;

use crate::params::BathParams;
use crate::quadrature::{integrate_1d, integrate_nested, Estimate, QuadError, QuadSpec};

/// Radial cutoff in units of the most probable momentum `sqrt(2 m kT)`.
/// The tail mass beyond it is below 1e-30.
pub const Q_CUTOFF_THERMAL: f64 = 12.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("momentum magnitude must be non-negative, got {0}")]
pub struct NegativeMomentum(pub f64);

/// Thermal momentum densities of a bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumDistribution {
    mass: f64,
    beta: f64,
    /// `sqrt(m kT)`; the sampler works in units of this.
    p_scale: f64,
}

impl MomentumDistribution {
    pub fn new(bath: &BathParams) -> Self {
        Self {
            mass: bath.mass(),
            beta: bath.beta(),
            p_scale: (bath.mass() * bath.kt()).sqrt(),
        }
    }

    fn prefactor(&self) -> f64 {
        (self.beta / (2.0 * PI * self.mass)).powf(1.5)
    }

    /// `mu(p) = (beta / 2 pi m)^{3/2} exp(-beta p^2 / 2m)`.
    pub fn mu(&self, p: [f64; 3]) -> f64 {
        let p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        self.prefactor() * (-self.beta * p2 / (2.0 * self.mass)).exp()
    }

    /// `nu(q) = 4 pi q^2 (beta / 2 pi m)^{3/2} exp(-beta q^2 / 2m)`.
    pub fn nu(&self, q: f64) -> Result<f64, NegativeMomentum> {
        if !(q >= 0.0) {
            return Err(NegativeMomentum(q));
        }
        Ok(4.0 * PI * q * q * self.prefactor() * (-self.beta * q * q / (2.0 * self.mass)).exp())
    }

    /// Cumulative distribution of `nu`.
    pub fn cdf(&self, q: f64) -> f64 {
        if q <= 0.0 {
            0.0
        } else {
            speed_cdf(q / self.p_scale)
        }
    }

    /// Upper end of radial quadratures.
    pub fn q_max(&self) -> f64 {
        Q_CUTOFF_THERMAL * std::f64::consts::SQRT_2 * self.p_scale
    }

    /// Draw a momentum magnitude distributed as `nu`, by inverting a
    /// monotone cubic spline of the CDF.
    pub fn sample_q<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.p_scale * SpeedInverse::get().invert(u)
    }

    /// `int d^3p mu(p)` over the cube `|p_i| <= q_max`, by nested quadrature.
    pub fn mu_normalization(&self, spec: &QuadSpec) -> Result<Estimate, QuadError> {
        let c = self.q_max();
        let inner = spec.with_rel_tol(spec.rel_tol * 0.1);
        let innermost = inner.with_rel_tol(inner.rel_tol * 0.1);
        integrate_nested(
            |x| {
                integrate_nested(
                    |y| integrate_1d(|z| self.mu([x, y, z]), -c, c, &innermost),
                    &[-c, c],
                    &inner,
                )
            },
            &[-c, c],
            spec,
        )
    }

    /// `int_0^qmax nu(q) dq`.
    pub fn nu_normalization(&self, spec: &QuadSpec) -> Result<Estimate, QuadError> {
        self.radial_average(|_| 1.0, spec)
    }

    /// `int_0^qmax nu(q) g(q) dq`. Integrates in units of `sqrt(m kT)`, with
    /// `g` divided by its value at the most probable momentum, so the
    /// quadrature tolerances are scale-free.
    pub fn radial_average<G: Fn(f64) -> f64>(
        &self,
        g: G,
        spec: &QuadSpec,
    ) -> Result<Estimate, QuadError> {
        let s = self.p_scale;
        let x_max = self.q_max() / s;
        let peak = g(std::f64::consts::SQRT_2 * s).abs();
        let scale = if peak.is_normal() { peak } else { 1.0 };
        Ok(integrate_1d(|x| speed_density(x) * g(x * s) / scale, 0.0, x_max, spec)?.scaled(scale))
    }
}

/// `nu` in units where `m = kT = 1`: `sqrt(2/pi) x^2 exp(-x^2/2)`.
pub(crate) fn speed_density(x: f64) -> f64 {
    (2.0 / PI).sqrt() * x * x * (-0.5 * x * x).exp()
}

/// CDF of [`speed_density`].
fn speed_cdf(x: f64) -> f64 {
    libm::erf(x / std::f64::consts::SQRT_2) - (2.0 / PI).sqrt() * x * (-0.5 * x * x).exp()
}

/// Closed form `<q^2 v> = 4 (m/pi)^{1/2} (2 kT)^{3/2}`.
pub fn thermal_average_q2v(bath: &BathParams) -> f64 {
    4.0 * (bath.mass() / PI).sqrt() * (2.0 * bath.kt()).powf(1.5)
}

/// `int nu(q) q^3 / m dq` by quadrature.
pub fn thermal_average_q2v_quadrature(
    bath: &BathParams,
    spec: &QuadSpec,
) -> Result<Estimate, QuadError> {
    let m = bath.mass();
    MomentumDistribution::new(bath).radial_average(|q| q * q * q / m, spec)
}

/// Closed form `<v> = sqrt(8 kT / pi m)`.
pub fn thermal_average_speed(bath: &BathParams) -> f64 {
    (8.0 * bath.kt() / (PI * bath.mass())).sqrt()
}

/// `int nu(q) q / m dq` by quadrature.
pub fn thermal_average_speed_quadrature(
    bath: &BathParams,
    spec: &QuadSpec,
) -> Result<Estimate, QuadError> {
    let m = bath.mass();
    MomentumDistribution::new(bath).radial_average(|q| q / m, spec)
}

/// Inverse of the dimensionless speed CDF via a monotone cubic Hermite spline.
struct SpeedInverse {
    x: Vec<f64>,
    cdf: Vec<f64>,
    slope: Vec<f64>,
}

impl SpeedInverse {
    const NODES: usize = 4096;

    fn get() -> &'static SpeedInverse {
        static TABLE: OnceLock<SpeedInverse> = OnceLock::new();
        TABLE.get_or_init(SpeedInverse::build)
    }

    fn build() -> Self {
        let x_max = Q_CUTOFF_THERMAL * std::f64::consts::SQRT_2;
        let h = x_max / (Self::NODES - 1) as f64;
        let x: Vec<f64> = (0..Self::NODES).map(|i| i as f64 * h).collect();
        let cdf: Vec<f64> = x.iter().map(|&x| speed_cdf(x)).collect();
        let mut slope: Vec<f64> = x.iter().map(|&x| speed_density(x)).collect();
        // Fritsch-Carlson limiter keeps every segment monotone.
        for i in 0..Self::NODES - 1 {
            let delta = (cdf[i + 1] - cdf[i]) / h;
            if delta <= 0.0 {
                slope[i] = 0.0;
                slope[i + 1] = 0.0;
                continue;
            }
            let a = slope[i] / delta;
            let b = slope[i + 1] / delta;
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                slope[i] = tau * a * delta;
                slope[i + 1] = tau * b * delta;
            }
        }
        Self { x, cdf, slope }
    }

    fn hermite(&self, i: usize, t: f64) -> (f64, f64) {
        let h = self.x[i + 1] - self.x[i];
        let (y0, y1) = (self.cdf[i], self.cdf[i + 1]);
        let (m0, m1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let deriv = (6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1;
        (value, deriv)
    }

    fn invert(&self, u: f64) -> f64 {
        let last = self.cdf.len() - 1;
        if u <= 0.0 {
            return 0.0;
        }
        if u >= self.cdf[last] {
            return self.x[last];
        }
        // cdf[i] <= u < cdf[i + 1]
        let i = self.cdf.partition_point(|&c| c <= u) - 1;
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut t = (u - self.cdf[i]) / (self.cdf[i + 1] - self.cdf[i]);
        for _ in 0..60 {
            let (v, d) = self.hermite(i, t);
            let r = v - u;
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let newton = if d > 0.0 { t - r / d } else { f64::NAN };
            let next = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - t).abs() < 1e-15 {
                t = next;
                break;
            }
            t = next;
        }
        self.x[i] + t * (self.x[i + 1] - self.x[i])
    }
}

impl std::fmt::Debug for SpeedInverse {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpeedInverse")
            .field("nodes", &self.x.len())
            .finish()
    }
}
