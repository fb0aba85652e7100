//! Classical Brownian motion of a hard sphere in a dilute gas.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::moments::msd_quantum;
use super::{config, DynamicsError};
use crate::decoherence::lambda_hard_sphere;
use crate::params::{BathParams, ParticleParams, PhysicalConstants};

/// `(16/9) sqrt(2 pi)`: coefficient of `(kT)^{3/2} n m^{1/2} a^2 t^3 / M^2`
/// in the mean square displacement.
pub const CROSS_CHECK_CONSTANT: f64 = 16.0 / 9.0 * 2.506_628_274_631_000_5;

/// Drag coefficient `xi = (8/3) n a^2 sqrt(2 pi m kT)`.
pub fn viscosity_hard_sphere(bath: &BathParams, particle: &ParticleParams) -> f64 {
    let a = particle.radius();
    8.0 / 3.0
        * bath.density()
        * a
        * a
        * (2.0 * std::f64::consts::PI * bath.mass() * bath.kt()).sqrt()
}

/// `<R_j^2> = 2 kT xi t^3 / (3 M^2)`, valid for `t << M / xi`.
pub fn msd_classical(bath: &BathParams, particle: &ParticleParams, t: f64) -> f64 {
    let xi = viscosity_hard_sphere(bath, particle);
    let m = particle.mass();
    2.0 * bath.kt() * xi * t * t * t / (3.0 * m * m)
}

/// Both routes to the displacement coefficient for one parameter set:
/// the quantum pipeline (thermal average, hard-sphere `Lambda`, `t^3` law)
/// and the classical drag formula, each divided by
/// `(kT)^{3/2} n m^{1/2} a^2 t^3 / M^2`.
pub fn cross_check_constant_with(
    bath: &BathParams,
    particle: &ParticleParams,
    consts: &PhysicalConstants,
    t: f64,
) -> (f64, f64) {
    let scale = bath.kt().powf(1.5)
        * bath.density()
        * bath.mass().sqrt()
        * particle.radius().powi(2)
        * t.powi(3)
        / particle.mass().powi(2);
    let lambda = lambda_hard_sphere(bath, particle, consts);
    let quantum = msd_quantum(lambda, particle.mass(), t, consts) / scale;
    let classical = msd_classical(bath, particle, t) / scale;
    (quantum, classical)
}

/// [`cross_check_constant_with`] at a fixed reference point in natural units.
pub fn cross_check_constant() -> (f64, f64) {
    let consts = PhysicalConstants::natural();
    let bath = BathParams::new(1.0, 1.0, 1.0, &consts).expect("valid reference bath");
    let particle = ParticleParams::new(1.0, 1.0).expect("valid reference particle");
    cross_check_constant_with(&bath, &particle, &consts, 1.0)
}

/// Langevin ensemble settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangevinSpec {
    /// Drag coefficient.
    pub xi: f64,
    pub n_traj: usize,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    /// Record the ensemble every this many steps.
    pub record_every: usize,
}

impl LangevinSpec {
    /// Checks positivity and `dt <= M / (100 xi)`.
    pub fn validate(&self, particle: &ParticleParams) -> Result<(), DynamicsError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return config(format!("time step must be positive, got {}", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return config(format!("end time must be positive, got {}", self.t_end));
        }
        if self.n_traj == 0 {
            return config("need at least one trajectory");
        }
        if !(self.xi >= 0.0 && self.xi.is_finite()) {
            return config(format!(
                "drag coefficient must be non-negative, got {}",
                self.xi
            ));
        }
        if self.xi > 0.0 {
            let limit = particle.mass() / (100.0 * self.xi);
            if self.dt > limit {
                return config(format!(
                    "time step {:.4e} exceeds M/(100 xi) = {limit:.4e}",
                    self.dt
                ));
            }
        }
        Ok(())
    }
}

/// Ensemble statistics at the recorded times.
#[derive(Debug, Clone, PartialEq)]
pub struct LangevinResult {
    pub t: Vec<f64>,
    pub msd: Vec<f64>,
    pub msd_stderr: Vec<f64>,
    pub v2: Vec<f64>,
    pub v2_stderr: Vec<f64>,
}

const CHUNK: usize = 1024;

#[derive(Clone)]
struct Sums {
    x2: Vec<f64>,
    x4: Vec<f64>,
    v2: Vec<f64>,
    v4: Vec<f64>,
}

impl Sums {
    fn zeros(n: usize) -> Self {
        Self {
            x2: vec![0.0; n],
            x4: vec![0.0; n],
            v2: vec![0.0; n],
            v4: vec![0.0; n],
        }
    }

    fn add(&mut self, other: &Sums) {
        for (a, b) in [
            (&mut self.x2, &other.x2),
            (&mut self.x4, &other.x4),
            (&mut self.v2, &other.v2),
            (&mut self.v4, &other.v4),
        ] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }
}

/// Ensemble of one-axis trajectories of `M dv = -xi v dt + sqrt(2 xi kT) dW`,
/// starting at rest at the origin.
///
/// The velocity is advanced by Euler-Maruyama; the position by the trapezoid
/// rule on the velocity, which removes the `O(dt/t)` bias an explicit
/// position update would add to `<x^2>`. Trajectory `i` draws from ChaCha
/// stream `i` of `seed`, and chunk sums are reduced in a fixed order, so the
/// result does not depend on the thread count.
pub fn langevin_msd(
    bath: &BathParams,
    particle: &ParticleParams,
    spec: &LangevinSpec,
) -> Result<LangevinResult, DynamicsError> {
    spec.validate(particle)?;
    let steps = (spec.t_end / spec.dt).round().max(1.0) as usize;
    let every = spec.record_every.max(1);
    let record_steps: Vec<usize> = (1..=steps)
        .filter(|i| i % every == 0 || *i == steps)
        .collect();
    let n_rec = record_steps.len();

    let mass = particle.mass();
    let gamma_dt = spec.xi / mass * spec.dt;
    let kick = (2.0 * spec.xi * bath.kt()).sqrt() / mass * spec.dt.sqrt();
    let dt = spec.dt;

    let n_chunks = spec.n_traj.div_ceil(CHUNK);
    let partials: Vec<Sums> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut sums = Sums::zeros(n_rec);
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(spec.n_traj);
            for traj in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                rng.set_stream(traj as u64);
                let (mut x, mut v) = (0.0f64, 0.0f64);
                let mut r = 0;
                for i in 1..=steps {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    let v_new = v - gamma_dt * v + kick * z;
                    x += 0.5 * (v + v_new) * dt;
                    v = v_new;
                    if r < n_rec && record_steps[r] == i {
                        let (x2, v2) = (x * x, v * v);
                        sums.x2[r] += x2;
                        sums.x4[r] += x2 * x2;
                        sums.v2[r] += v2;
                        sums.v4[r] += v2 * v2;
                        r += 1;
                    }
                }
            }
            sums
        })
        .collect();

    let mut total = Sums::zeros(n_rec);
    for p in &partials {
        total.add(p);
    }
    let n = spec.n_traj as f64;
    let stats = |s: &[f64], s2: &[f64]| -> (Vec<f64>, Vec<f64>) {
        s.iter()
            .zip(s2)
            .map(|(&a, &b)| {
                let mean = a / n;
                let var = if spec.n_traj > 1 {
                    ((b / n - mean * mean) * n / (n - 1.0)).max(0.0)
                } else {
                    0.0
                };
                (mean, (var / n).sqrt())
            })
            .unzip()
    };
    let (msd, msd_stderr) = stats(&total.x2, &total.x4);
    let (v2, v2_stderr) = stats(&total.v2, &total.v4);
    Ok(LangevinResult {
        t: record_steps.iter().map(|&i| i as f64 * dt).collect(),
        msd,
        msd_stderr,
        v2,
        v2_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat_bath(n: f64) -> BathParams {
        BathParams::new(1.0, 1.0, n, &PhysicalConstants::natural()).unwrap()
    }

    #[test]
    fn viscosity_values_and_scaling() {
        let p = ParticleParams::new(1.0, 1.0).unwrap();
        let xi = viscosity_hard_sphere(&nat_bath(1.0), &p);
        assert!((xi - 6.684_342_065_682_667).abs() < 1e-12);
        let p2 = ParticleParams::new(1.0, 2.0).unwrap();
        assert!((viscosity_hard_sphere(&nat_bath(1.0), &p2) / xi - 4.0).abs() < 1e-14);
        let hot = BathParams::new(1.0, 4.0, 1.0, &PhysicalConstants::natural()).unwrap();
        assert!((viscosity_hard_sphere(&hot, &p) / xi - 2.0).abs() < 1e-14);
    }

    #[test]
    fn classical_msd() {
        let p = ParticleParams::new(1.0, 1.0).unwrap();
        let v = msd_classical(&nat_bath(1.0), &p, 1.0);
        assert!((v - 4.456_228_043_788_444).abs() < 1e-12);
        assert_eq!(msd_classical(&nat_bath(0.0), &p, 1.0), 0.0);
    }

    #[test]
    fn constants_agree() {
        let (q, c) = cross_check_constant();
        assert!(((q - c) / c).abs() < 1e-12);
        assert!((q - CROSS_CHECK_CONSTANT).abs() < 1e-12);
    }

    #[test]
    fn no_drag_means_no_motion() {
        let p = ParticleParams::new(1.0, 1.0).unwrap();
        let spec = LangevinSpec {
            xi: 0.0,
            n_traj: 10,
            dt: 0.01,
            t_end: 1.0,
            seed: 1,
            record_every: 10,
        };
        let r = langevin_msd(&nat_bath(1.0), &p, &spec).unwrap();
        assert!(r.msd.iter().all(|&m| m == 0.0));
        assert_eq!(r.t.len(), 10);
    }

    #[test]
    fn rejects_coarse_step() {
        let p = ParticleParams::new(1.0, 1.0).unwrap();
        let spec = LangevinSpec {
            xi: 10.0,
            n_traj: 10,
            dt: 0.01,
            t_end: 1.0,
            seed: 1,
            record_every: 1,
        };
        assert!(langevin_msd(&nat_bath(1.0), &p, &spec).is_err());
    }

    #[test]
    fn reproducible_across_runs() {
        let p = ParticleParams::new(1.0, 1.0).unwrap();
        let spec = LangevinSpec {
            xi: 1.0,
            n_traj: 3000,
            dt: 0.001,
            t_end: 0.1,
            seed: 77,
            record_every: 25,
        };
        let a = langevin_msd(&nat_bath(1.0), &p, &spec).unwrap();
        let b = langevin_msd(&nat_bath(1.0), &p, &spec).unwrap();
        assert_eq!(a, b);
    }
}
