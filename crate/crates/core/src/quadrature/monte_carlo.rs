use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{Estimate, McSpec};
use crate::params::BathParams;
use crate::thermal::MomentumDistribution;

/// A space that can be sampled uniformly with respect to some measure.
///
/// `mc_integrate` estimates `integral f d(measure)` as
/// `measure() * mean(f(sample))`.
pub trait SampleSpace {
    type Sample;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Sample;

    /// Total measure of the space.
    fn measure(&self) -> f64;
}

/// Unit vectors, solid-angle measure (total 4 pi).
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitSphere;

impl SampleSpace for UnitSphere {
    type Sample = [f64; 3];

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        rand_distr::UnitSphere.sample(rng)
    }

    fn measure(&self) -> f64 {
        4.0 * std::f64::consts::PI
    }
}

/// Momentum magnitudes distributed by the Maxwell speed density `nu(q)`.
#[derive(Debug, Clone)]
pub struct ThermalSpeed {
    dist: MomentumDistribution,
}

impl ThermalSpeed {
    pub fn new(bath: &BathParams) -> Self {
        Self {
            dist: MomentumDistribution::new(bath),
        }
    }
}

impl SampleSpace for ThermalSpeed {
    type Sample = f64;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.dist.sample_q(rng)
    }

    fn measure(&self) -> f64 {
        1.0
    }
}

/// Momentum vectors distributed by `mu(p)`: independent Gaussian components
/// with variance `m kT`. Shares no code with [`ThermalSpeed`].
#[derive(Debug, Clone, Copy)]
pub struct ThermalMomentum {
    component: Normal<f64>,
}

impl ThermalMomentum {
    pub fn new(bath: &BathParams) -> Self {
        let sd = (bath.mass() * bath.kt()).sqrt();
        Self {
            component: Normal::new(0.0, sd).expect("thermal momentum spread is positive"),
        }
    }
}

impl SampleSpace for ThermalMomentum {
    type Sample = [f64; 3];

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        [
            self.component.sample(rng),
            self.component.sample(rng),
            self.component.sample(rng),
        ]
    }

    fn measure(&self) -> f64 {
        1.0
    }
}

impl<A: SampleSpace, B: SampleSpace> SampleSpace for (A, B) {
    type Sample = (A::Sample, B::Sample);

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Sample {
        let a = self.0.sample(rng);
        let b = self.1.sample(rng);
        (a, b)
    }

    fn measure(&self) -> f64 {
        self.0.measure() * self.1.measure()
    }
}

/// Single-stream Monte-Carlo estimate of several integrands sharing the same
/// samples. Standard errors come from Welford's running variance.
pub fn mc_integrate_many<S, F, const K: usize>(space: &S, mut f: F, spec: &McSpec) -> [Estimate; K]
where
    S: SampleSpace,
    F: FnMut(&S::Sample) -> [f64; K],
{
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut mean = [0.0; K];
    let mut m2 = [0.0; K];
    for i in 0..spec.n_samples {
        let s = space.sample(&mut rng);
        let y = f(&s);
        let n = (i + 1) as f64;
        for k in 0..K {
            let d = y[k] - mean[k];
            mean[k] += d / n;
            m2[k] += d * (y[k] - mean[k]);
        }
    }
    let n = spec.n_samples as f64;
    let measure = space.measure();
    std::array::from_fn(|k| {
        let var = if spec.n_samples > 1 {
            m2[k] / (n - 1.0)
        } else {
            0.0
        };
        Estimate {
            value: measure * mean[k],
            error_estimate: measure * (var / n).sqrt(),
            evaluations: spec.n_samples,
        }
    })
}

pub fn mc_integrate<S, F>(space: &S, mut f: F, spec: &McSpec) -> Estimate
where
    S: SampleSpace,
    F: FnMut(&S::Sample) -> f64,
{
    let [e] = mc_integrate_many(space, |s| [f(s)], spec);
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::PhysicalConstants;

    #[test]
    fn constant_integrand_has_zero_variance() {
        let spec = McSpec::new(1000, 1).unwrap();
        let e = mc_integrate(&UnitSphere, |_| 2.5, &spec);
        assert!((e.value - 2.5 * 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(e.error_estimate, 0.0);
    }

    #[test]
    fn sphere_components_average_to_zero() {
        let spec = McSpec::new(100_000, 7).unwrap();
        let [x, y, z] = mc_integrate_many(&UnitSphere, |n| *n, &spec);
        for e in [x, y, z] {
            assert!(e.value.abs() <= 3.0 * e.error_estimate, "{e:?}");
        }
    }

    #[test]
    fn fixed_seed_is_bit_reproducible() {
        let bath = BathParams::new(1.0, 1.0, 1.0, &PhysicalConstants::natural()).unwrap();
        let space = (ThermalMomentum::new(&bath), UnitSphere);
        let spec = McSpec::new(10_000, 42).unwrap();
        let f = |(p, n): &([f64; 3], [f64; 3])| p[0] * n[1] + p[2];
        let a = mc_integrate(&space, f, &spec);
        let b = mc_integrate(&space, f, &spec);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error_estimate.to_bits(), b.error_estimate.to_bits());
    }

    #[test]
    fn thermal_momentum_variance() {
        let bath = BathParams::new(2.0, 3.0, 1.0, &PhysicalConstants::natural()).unwrap();
        let spec = McSpec::new(200_000, 3).unwrap();
        let e = mc_integrate(&ThermalMomentum::new(&bath), |p| p[1] * p[1], &spec);
        assert!((e.value - 6.0).abs() <= 3.0 * e.error_estimate, "{e:?}");
    }
}
