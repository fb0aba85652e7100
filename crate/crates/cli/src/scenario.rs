//! JSON scenario files.
//!
//! ```json
//! {
//!   "units": "natural",
//!   "bath": { "mass": 1.0, "temperature": 1.0, "density": 1.0 },
//!   "particle": { "mass": 1.0, "radius": 1.0 },
//!   "model": { "kind": "hard_sphere" },
//!   "quad": { "rel_tol": 1e-9 },
//!   "mc": { "n_samples": 1000000, "seed": 42 }
//! }
//! ```
//!
//! `units` is mandatory. Every number in the file, and in a tabulated model
//! file it points to, is read in that unit system.

use std::fmt;
use std::path::{Path, PathBuf};

use colldec::{
    BathParams, CrossSectionTable, McSpec, ParticleParams, PhysicalConstants, QuadSpec,
    ScatteringModel,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Si,
    Natural,
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Units::Si => "si",
            Units::Natural => "natural",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub hbar: f64,
    pub k_boltzmann: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub mass: f64,
    pub temperature: f64,
    pub density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleConfig {
    pub mass: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Hard sphere of the particle's radius.
    HardSphere,
    /// `q,theta,f2` table; a relative path is taken from the scenario's directory.
    Tabulated { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub nodes_per_panel: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        let d = QuadSpec::default();
        Self {
            rel_tol: d.rel_tol,
            abs_tol: d.abs_tol,
            max_subdivisions: d.max_subdivisions,
            nodes_per_panel: d.nodes_per_panel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
}

/// The file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub units: Units,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsConfig>,
    pub bath: BathConfig,
    pub particle: ParticleConfig,
    pub model: ModelConfig,
    #[serde(default)]
    pub quad: QuadConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McConfig>,
}

/// A validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub consts: PhysicalConstants,
    pub bath: BathParams,
    pub particle: ParticleParams,
    pub model: ScatteringModel,
    pub quad: QuadSpec,
    pub mc: Option<McSpec>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, &path.display().to_string(), base)
    }

    /// Parse scenario text. `origin` labels error messages; `base` resolves
    /// relative table paths.
    pub fn parse(text: &str, origin: &str, base: &Path) -> Result<Self, CliError> {
        let file: ScenarioFile = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("{origin}:{}:{}: {e}", e.line(), e.column())))?;
        Self::from_file(file, origin, base)
    }

    pub fn from_file(file: ScenarioFile, origin: &str, base: &Path) -> Result<Self, CliError> {
        let bad =
            |what: &str, e: &dyn fmt::Display| CliError::Config(format!("{origin}: {what}: {e}"));
        let consts = match (file.constants, file.units) {
            (Some(c), _) => {
                PhysicalConstants::new(c.hbar, c.k_boltzmann).map_err(|e| bad("constants", &e))?
            }
            (None, Units::Si) => PhysicalConstants::si(),
            (None, Units::Natural) => PhysicalConstants::natural(),
        };
        let b = file.bath;
        let bath = BathParams::new(b.mass, b.temperature, b.density, &consts)
            .map_err(|e| bad("bath", &e))?;
        let particle = ParticleParams::new(file.particle.mass, file.particle.radius)
            .map_err(|e| bad("particle", &e))?;
        let model = match &file.model {
            ModelConfig::HardSphere => ScatteringModel::hard_sphere(particle.radius()),
            ModelConfig::Tabulated { path } => {
                let full = if path.is_absolute() {
                    path.clone()
                } else {
                    base.join(path)
                };
                let table = CrossSectionTable::from_csv_path(&full)
                    .map_err(|e| bad(&format!("model table {}", full.display()), &e))?;
                ScatteringModel::Tabulated(table)
            }
        };
        let q = file.quad;
        let quad = QuadSpec {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            max_subdivisions: q.max_subdivisions,
            nodes_per_panel: q.nodes_per_panel,
        };
        quad.validate().map_err(|e| bad("quad", &e))?;
        let mc = file
            .mc
            .map(|m| McSpec::new(m.n_samples, m.seed))
            .transpose()
            .map_err(|e| bad("mc", &e))?;
        if matches!(file.model, ModelConfig::HardSphere) {
            colldec::params::geometric_limit_quality(&bath, &particle, &consts);
        }
        Ok(Self {
            file,
            consts,
            bath,
            particle,
            model,
            quad,
            mc,
        })
    }

    pub fn units(&self) -> Units {
        self.file.units
    }

    pub fn is_hard_sphere(&self) -> bool {
        matches!(self.file.model, ModelConfig::HardSphere)
    }

    /// The scenario as one line of JSON, for CSV headers.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&self.file).expect("scenario serializes")
    }
}
