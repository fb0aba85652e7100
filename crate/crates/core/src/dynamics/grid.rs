use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::moments::{evolve_moments, MomentState};
use super::{config, DynamicsError};
use crate::params::PhysicalConstants;

/// Boundary density, relative to the peak, that a run must stay below.
const BOUNDARY_DENSITY: f64 = 1e-10;

/// Density matrix `rho(x1, x2)` on a periodic grid of `n` points spanning
/// `[-L/2, L/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub rho: Array2<Complex64>,
    pub box_l: f64,
    pub t: f64,
}

impl GridState {
    /// Pure Gaussian wave packet centred at the origin with position spread
    /// `sigma`: `psi(x) = (2 pi sigma^2)^{-1/4} exp(-x^2 / 4 sigma^2)`.
    pub fn gaussian(n: usize, box_l: f64, sigma: f64) -> Result<Self, DynamicsError> {
        if n < 4 {
            return config(format!("grid needs at least 4 points, got {n}"));
        }
        if !(box_l > 0.0 && box_l.is_finite()) {
            return config(format!("box length must be positive, got {box_l}"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return config(format!("packet width must be positive, got {sigma}"));
        }
        let dx = box_l / n as f64;
        let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
        let psi: Vec<f64> = (0..n)
            .map(|j| {
                let x = -0.5 * box_l + j as f64 * dx;
                norm * (-x * x / (4.0 * sigma * sigma)).exp()
            })
            .collect();
        let rho = Array2::from_shape_fn((n, n), |(a, b)| Complex64::new(psi[a] * psi[b], 0.0));
        Ok(Self { rho, box_l, t: 0.0 })
    }

    pub fn n(&self) -> usize {
        self.rho.nrows()
    }

    pub fn dx(&self) -> f64 {
        self.box_l / self.n() as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.box_l + j as f64 * self.dx()
    }

    /// `sum_x rho(x, x) dx`.
    pub fn trace(&self) -> f64 {
        self.rho.diag().iter().map(|c| c.re).sum::<f64>() * self.dx()
    }

    /// `<x^2>` from the diagonal, normalized by the trace.
    pub fn x2(&self) -> f64 {
        let dx = self.dx();
        let s: f64 = self
            .rho
            .diag()
            .iter()
            .enumerate()
            .map(|(j, c)| self.x(j).powi(2) * c.re)
            .sum();
        s * dx / self.trace()
    }

    /// `tr rho^2`.
    pub fn purity(&self) -> f64 {
        let dx = self.dx();
        self.rho.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx * dx
    }

    /// `max |rho(x1, x2) - conj rho(x2, x1)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in a..n {
                worst = worst.max((self.rho[[a, b]] - self.rho[[b, a]].conj()).norm());
            }
        }
        worst
    }

    /// Smallest real part on the diagonal.
    pub fn min_diagonal(&self) -> f64 {
        self.rho
            .diag()
            .iter()
            .map(|c| c.re)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest diagonal density in the outer eighth of the box on each side,
    /// relative to the peak.
    pub fn boundary_density(&self) -> f64 {
        let n = self.n();
        let edge = (n / 8).max(1);
        let diag: Vec<f64> = self.rho.diag().iter().map(|c| c.re.abs()).collect();
        let peak = diag.iter().cloned().fold(0.0, f64::max);
        let outer = diag[..edge]
            .iter()
            .chain(&diag[n - edge..])
            .cloned()
            .fold(0.0, f64::max);
        if peak > 0.0 {
            outer / peak
        } else {
            0.0
        }
    }

    /// `<x^2>`, `<{x, p}>` and `<p^2>` of the grid state. Momentum moments use
    /// spectral derivatives.
    pub fn moments(&self, consts: &PhysicalConstants) -> MomentState {
        let n = self.n();
        let hbar = consts.hbar();
        let mut ffts = Fft2::new(n);
        let mut spec = self.rho.clone();
        ffts.forward(&mut spec);
        let k = wavenumbers(n, self.box_l);

        let (mut norm, mut p2) = (0.0, 0.0);
        for j in 0..n {
            let v = spec[[j, (n - j) % n]].re;
            norm += v;
            p2 += hbar * hbar * k[j] * k[j] * v;
        }
        let pp = p2 / norm;

        // -i hbar (d1 - d2) rho, evaluated on the diagonal
        let kd: Vec<f64> = k
            .iter()
            .enumerate()
            .map(|(j, &kj)| if 2 * j == n { 0.0 } else { kj })
            .collect();
        let mut d = Array2::from_shape_fn((n, n), |(a, b)| spec[[a, b]] * (hbar * (kd[a] - kd[b])));
        ffts.inverse(&mut d);
        let dx = self.dx();
        let xp = (0..n).map(|j| self.x(j) * d[[j, j]].re).sum::<f64>() * dx / self.trace();

        MomentState {
            xx: self.x2(),
            xp,
            pp,
            t: self.t,
        }
    }
}

/// FFT angular wavenumbers in standard order.
fn wavenumbers(n: usize, box_l: f64) -> Vec<f64> {
    let dk = 2.0 * PI / box_l;
    (0..n)
        .map(|j| {
            let m = if j <= n / 2 {
                j as isize
            } else {
                j as isize - n as isize
            };
            m as f64 * dk
        })
        .collect()
}

/// Unnormalized forward and normalized inverse 2-D FFT on square arrays.
struct Fft2 {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Array2<Complex64>,
}

impl Fft2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            scratch: Array2::zeros((n, n)),
        }
    }

    fn run(&mut self, a: &mut Array2<Complex64>, fft: &Arc<dyn Fft<f64>>) {
        // rows are contiguous; a buffer of n*n is processed as n transforms
        fft.process(a.as_slice_mut().expect("standard layout"));
        self.scratch.assign(&a.t());
        fft.process(self.scratch.as_slice_mut().expect("standard layout"));
        a.assign(&self.scratch.t());
    }

    fn forward(&mut self, a: &mut Array2<Complex64>) {
        let f = self.fwd.clone();
        self.run(a, &f);
    }

    fn inverse(&mut self, a: &mut Array2<Complex64>) {
        let f = self.inv.clone();
        self.run(a, &f);
        let n = a.nrows() as f64;
        a.mapv_inplace(|c| c / (n * n));
    }
}

/// Strang-split propagator for one axis of the master equation.
///
/// Each step applies half a kinetic step in momentum space, the exact
/// decoherence factor `exp(-Lambda (x1 - x2)^2 dt)` in position space, and
/// another half kinetic step. An infinite mass disables the kinetic term.
pub struct GridEvolver {
    dt: f64,
    kinetic_half: Option<Array2<Complex64>>,
    decay: Array2<f64>,
    ffts: Fft2,
}

impl GridEvolver {
    /// Validates resolution for a run of `n_steps` from `initial`.
    pub fn new(
        initial: &GridState,
        lambda: f64,
        mass: f64,
        consts: &PhysicalConstants,
        dt: f64,
        n_steps: usize,
    ) -> Result<Self, DynamicsError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return config(format!("time step must be positive, got {dt}"));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return config(format!("Lambda must be non-negative, got {lambda}"));
        }
        if !(mass > 0.0) {
            return config(format!("particle mass must be positive, got {mass}"));
        }
        let n = initial.n();
        let dx = initial.dx();
        let duration = dt * n_steps as f64;
        if lambda > 0.0 && duration > 0.0 {
            let decay_length = 1.0 / (lambda * duration).sqrt();
            if dx > decay_length / 8.0 {
                return config(format!(
                    "grid spacing {dx:.4e} does not resolve the coherence length \
                     {decay_length:.4e} (need dx <= length/8)"
                ));
            }
        }
        let boundary = initial.boundary_density();
        if boundary > BOUNDARY_DENSITY {
            return config(format!(
                "initial state reaches the box edge (relative density {boundary:.2e})"
            ));
        }
        let kinetic = mass.is_finite();
        if kinetic {
            let start = initial.moments(consts);
            let end = *evolve_moments(
                start,
                lambda,
                mass,
                consts,
                start.t + duration,
                duration.max(1e-300),
            )?
            .last()
            .expect("trajectory has at least one state");
            let reach = (2.0 * (1.0 / BOUNDARY_DENSITY).ln()).sqrt();
            let half_box = 0.5 * initial.box_l;
            if half_box < reach * end.xx.sqrt() {
                return config(format!(
                    "box half-width {half_box:.4e} is too small for the final spread \
                     sqrt(<x^2>) = {:.4e}",
                    end.xx.sqrt()
                ));
            }
            let p_max = consts.hbar() * PI / dx;
            if p_max < reach * end.pp.sqrt() {
                return config(format!(
                    "grid momentum cutoff {p_max:.4e} is too small for the final spread \
                     sqrt(<p^2>) = {:.4e}",
                    end.pp.sqrt()
                ));
            }
        }

        let kinetic_half = kinetic.then(|| {
            let k = wavenumbers(n, initial.box_l);
            let c = consts.hbar() * dt / (4.0 * mass);
            Array2::from_shape_fn((n, n), |(a, b)| {
                Complex64::from_polar(1.0, -c * (k[a] * k[a] - k[b] * k[b]))
            })
        });
        let decay = Array2::from_shape_fn((n, n), |(a, b)| {
            let d = (a as f64 - b as f64) * dx;
            (-lambda * d * d * dt).exp()
        });
        Ok(Self {
            dt,
            kinetic_half,
            decay,
            ffts: Fft2::new(n),
        })
    }

    fn half_kinetic(&mut self, state: &mut GridState) {
        if let Some(phase) = &self.kinetic_half {
            self.ffts.forward(&mut state.rho);
            state.rho *= phase;
            self.ffts.inverse(&mut state.rho);
        }
    }

    pub fn step(&mut self, state: &mut GridState) {
        self.half_kinetic(state);
        state.rho.zip_mut_with(&self.decay, |r, d| *r *= *d);
        self.half_kinetic(state);
        state.t += self.dt;
    }

    /// Run `n_steps`, calling `observe` on the initial state and after every
    /// `record_every` steps (and after the last step).
    pub fn run<F: FnMut(&GridState)>(
        &mut self,
        state: &mut GridState,
        n_steps: usize,
        record_every: usize,
        mut observe: F,
    ) {
        let every = record_every.max(1);
        observe(state);
        for i in 1..=n_steps {
            self.step(state);
            if i % every == 0 || i == n_steps {
                observe(state);
            }
        }
    }
}

/// Evolve `initial` by `n_steps` of size `dt`. Pass `f64::INFINITY` as the
/// mass to switch off the kinetic term.
pub fn evolve_grid(
    initial: &GridState,
    lambda: f64,
    mass: f64,
    consts: &PhysicalConstants,
    dt: f64,
    n_steps: usize,
) -> Result<GridState, DynamicsError> {
    let mut ev = GridEvolver::new(initial, lambda, mass, consts, dt, n_steps)?;
    let mut state = initial.clone();
    for _ in 0..n_steps {
        ev.step(&mut state);
    }
    Ok(state)
}
