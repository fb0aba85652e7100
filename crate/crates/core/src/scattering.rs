//! Bath-particle cross sections `|f(q, theta)|^2` for an isotropic medium.
//!
//! Only the non-forward part of the cross section is modelled. In the
//! geometric limit the hard sphere also has a forward diffraction peak of
//! area `pi a^2`; it drops out of every decoherence quantity and is not
//! represented here.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

use crate::quadrature::{integrate_1d_with_breaks, QuadError, QuadSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatteringError {
    #[error("scattering angle {0} is outside [0, pi]")]
    AngleOutOfRange(f64),
    #[error("momentum {q} is outside the tabulated range [{lo}, {hi}]")]
    MomentumOutOfDomain { q: f64, lo: f64, hi: f64 },
    #[error("momentum magnitude must be non-negative, got {0}")]
    NegativeMomentum(f64),
    #[error("invalid cross-section table: {0}")]
    InvalidTable(String),
    #[error("reading cross-section table: {0}")]
    Io(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Rectangular `(q, theta)` grid of `|f|^2` values, interpolated bilinearly.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSectionTable {
    q: Vec<f64>,
    theta: Vec<f64>,
    /// Row-major: `f2[iq * theta.len() + itheta]`.
    f2: Vec<f64>,
}

impl CrossSectionTable {
    pub fn new(q: Vec<f64>, theta: Vec<f64>, f2: Vec<f64>) -> Result<Self, ScatteringError> {
        let bad = |m: String| Err(ScatteringError::InvalidTable(m));
        if q.len() < 2 || theta.len() < 2 {
            return bad(format!(
                "need at least 2 momenta and 2 angles, got {} x {}",
                q.len(),
                theta.len()
            ));
        }
        if f2.len() != q.len() * theta.len() {
            return bad(format!(
                "{} values for a {} x {} grid",
                f2.len(),
                q.len(),
                theta.len()
            ));
        }
        if !strictly_increasing(&q) {
            return bad("momentum axis must be strictly increasing".into());
        }
        if q[0] < 0.0 {
            return bad(format!("momentum axis starts at negative value {}", q[0]));
        }
        if !strictly_increasing(&theta) {
            return bad("angle axis must be strictly increasing".into());
        }
        let mut theta = theta;
        let n = theta.len();
        if theta[0].abs() > 1e-9 || (theta[n - 1] - PI).abs() > 1e-9 {
            return bad(format!(
                "angle axis must span [0, pi], got [{}, {}]",
                theta[0],
                theta[n - 1]
            ));
        }
        theta[0] = 0.0;
        theta[n - 1] = PI;
        if let Some(v) = f2.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return bad(format!(
                "cross section values must be finite and >= 0, found {v}"
            ));
        }
        Ok(Self { q, theta, f2 })
    }

    /// Parse `q,theta,f2` CSV rows, ordered by `q` then `theta`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, ScatteringError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| ScatteringError::Io(e.to_string()))?
            .clone();
        let names: Vec<&str> = headers.iter().collect();
        if names != ["q", "theta", "f2"] {
            return Err(ScatteringError::InvalidTable(format!(
                "expected header `q,theta,f2`, got `{}`",
                names.join(",")
            )));
        }

        let mut q_axis: Vec<f64> = Vec::new();
        let mut theta_axis: Vec<f64> = Vec::new();
        let mut values = Vec::new();
        let mut current_q_rows = 0usize;
        for (row, record) in rdr.records().enumerate() {
            let line = row + 2;
            let record = record.map_err(|e| ScatteringError::Io(e.to_string()))?;
            if record.len() != 3 {
                return Err(ScatteringError::InvalidTable(format!(
                    "line {line}: expected 3 fields, got {}",
                    record.len()
                )));
            }
            let parse = |i: usize| -> Result<f64, ScatteringError> {
                record[i].parse::<f64>().map_err(|e| {
                    ScatteringError::InvalidTable(format!("line {line}: `{}`: {e}", &record[i]))
                })
            };
            let (q, theta, f2) = (parse(0)?, parse(1)?, parse(2)?);
            if q_axis.last() != Some(&q) {
                if !q_axis.is_empty() && current_q_rows != theta_axis.len() {
                    return Err(ScatteringError::InvalidTable(format!(
                        "line {line}: grid is not rectangular ({} angles for q = {}, expected {})",
                        current_q_rows,
                        q_axis.last().unwrap(),
                        theta_axis.len()
                    )));
                }
                q_axis.push(q);
                current_q_rows = 0;
            }
            if q_axis.len() == 1 {
                theta_axis.push(theta);
            } else if theta_axis.get(current_q_rows) != Some(&theta) {
                return Err(ScatteringError::InvalidTable(format!(
                    "line {line}: angle {theta} does not match the first block's angle axis"
                )));
            }
            current_q_rows += 1;
            values.push(f2);
        }
        if current_q_rows != theta_axis.len() {
            return Err(ScatteringError::InvalidTable(format!(
                "grid is not rectangular: last block has {} angles, expected {}",
                current_q_rows,
                theta_axis.len()
            )));
        }
        Self::new(q_axis, theta_axis, values)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self, ScatteringError> {
        let file = std::fs::File::open(path)
            .map_err(|e| ScatteringError::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn q_range(&self) -> (f64, f64) {
        (self.q[0], self.q[self.q.len() - 1])
    }

    pub fn theta_axis(&self) -> &[f64] {
        &self.theta
    }

    fn at(&self, iq: usize, it: usize) -> f64 {
        self.f2[iq * self.theta.len() + it]
    }

    fn interpolate(&self, q: f64, theta: f64) -> Result<f64, ScatteringError> {
        let (lo, hi) = self.q_range();
        if !(q >= lo && q <= hi) {
            return Err(ScatteringError::MomentumOutOfDomain { q, lo, hi });
        }
        let (iq, tq) = locate(&self.q, q);
        let (it, tt) = locate(&self.theta, theta);
        let v00 = self.at(iq, it);
        let v01 = self.at(iq, it + 1);
        let v10 = self.at(iq + 1, it);
        let v11 = self.at(iq + 1, it + 1);
        Ok((1.0 - tq) * ((1.0 - tt) * v00 + tt * v01) + tq * ((1.0 - tt) * v10 + tt * v11))
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

/// Segment index and fractional position of `x` in a sorted axis; `x` must
/// lie inside the axis.
fn locate(axis: &[f64], x: f64) -> (usize, f64) {
    let n = axis.len();
    let i = axis.partition_point(|&a| a <= x).clamp(1, n - 1) - 1;
    let t = (x - axis[i]) / (axis[i + 1] - axis[i]);
    (i, t.clamp(0.0, 1.0))
}

/// Differential cross section of the bath-particle collision.
#[derive(Debug, Clone, PartialEq)]
pub enum ScatteringModel {
    /// Geometric-limit hard sphere: `|f|^2 = a^2 / 4` for every `q` and `theta`.
    HardSphere { radius: f64 },
    /// Tabulated `|f|^2(q, theta)`.
    Tabulated(CrossSectionTable),
}

impl ScatteringModel {
    pub fn hard_sphere(radius: f64) -> Self {
        ScatteringModel::HardSphere { radius }
    }

    /// `|f(q, theta)|^2`.
    pub fn dsigma_domega(&self, q: f64, theta: f64) -> Result<f64, ScatteringError> {
        if !(0.0..=PI).contains(&theta) {
            return Err(ScatteringError::AngleOutOfRange(theta));
        }
        if !(q >= 0.0) {
            return Err(ScatteringError::NegativeMomentum(q));
        }
        match self {
            ScatteringModel::HardSphere { radius } => Ok(radius * radius / 4.0),
            ScatteringModel::Tabulated(table) => table.interpolate(q, theta),
        }
    }

    /// Non-forward total cross section. Exact `pi a^2` for the hard sphere,
    /// quadrature otherwise.
    pub fn sigma_total(&self, q: f64, spec: &QuadSpec) -> Result<f64, ScatteringError> {
        match self {
            ScatteringModel::HardSphere { radius } => {
                if !(q >= 0.0) {
                    return Err(ScatteringError::NegativeMomentum(q));
                }
                Ok(PI * radius * radius)
            }
            ScatteringModel::Tabulated(_) => self.sigma_total_quadrature(q, spec),
        }
    }

    /// `2 pi int_0^pi |f(q, theta)|^2 sin(theta) dtheta`, always by quadrature.
    pub fn sigma_total_quadrature(&self, q: f64, spec: &QuadSpec) -> Result<f64, ScatteringError> {
        self.check_momentum(q)?;
        let e = integrate_1d_with_breaks(
            |t| self.dsigma_domega(q, t).unwrap_or(f64::NAN) * t.sin(),
            &self.theta_breaks(),
            spec,
        )?;
        Ok(2.0 * PI * e.value)
    }

    /// Angles where `|f|^2` may have kinks; always starts at 0 and ends at pi.
    pub fn theta_breaks(&self) -> Vec<f64> {
        match self {
            ScatteringModel::HardSphere { .. } => vec![0.0, PI],
            ScatteringModel::Tabulated(t) => t.theta_axis().to_vec(),
        }
    }

    /// Momentum range where the model is defined, `None` if unbounded.
    pub fn q_domain(&self) -> Option<(f64, f64)> {
        match self {
            ScatteringModel::HardSphere { .. } => None,
            ScatteringModel::Tabulated(t) => Some(t.q_range()),
        }
    }

    /// Momentum nodes of a table, used as quadrature break points.
    pub fn q_nodes(&self) -> &[f64] {
        match self {
            ScatteringModel::HardSphere { .. } => &[],
            ScatteringModel::Tabulated(t) => &t.q,
        }
    }

    /// Error unless `q` is inside the model's domain.
    pub fn check_momentum(&self, q: f64) -> Result<(), ScatteringError> {
        if !(q >= 0.0) {
            return Err(ScatteringError::NegativeMomentum(q));
        }
        match self.q_domain() {
            Some((lo, hi)) if q < lo || q > hi => {
                Err(ScatteringError::MomentumOutOfDomain { q, lo, hi })
            }
            _ => Ok(()),
        }
    }

    /// Error unless the whole interval `[0, q_max]` is covered.
    pub fn check_covers(&self, q_max: f64) -> Result<(), ScatteringError> {
        self.check_momentum(0.0)?;
        self.check_momentum(q_max)
    }

    /// True when `|f|^2` does not depend on `q`.
    pub fn is_momentum_independent(&self) -> bool {
        matches!(self, ScatteringModel::HardSphere { .. })
    }
}
