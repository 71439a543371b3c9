//! TOML run configuration.
//!
//! Unknown keys anywhere are rejected. Units are Gaussian; moduli are per
//! unit reference volume and `rho_r` converts them to per-unit-mass
//! quantities.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::constitutive::{ConductivityScaling, Fault, FourierHeatModel, Material, ModelParameters, QuadraticCoupledModel};
use crate::error::{Error, Result};
use crate::kinematics::MaterialState;
use crate::process::{time_grid, AffineProcess, Horizon, MatPath, ScalarPath, VecPath};
use crate::tensor::{Mat3, Vec3};
use crate::verification::{CheckName, NamedProcess, SuiteSettings, Tolerances};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("config {path}: {source}")]
    Invalid { path: PathBuf, source: Error },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Seed for every random sample; required so runs never depend on the clock.
    pub seed: u64,
    pub model: ModelParameters,
    /// Deliberate corruption of the model, for fault-sensitivity runs.
    #[serde(default)]
    pub fault: Option<Fault>,
    #[serde(default)]
    pub heat: HeatSection,
    #[serde(default)]
    pub samples: SamplesSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub suite: SuiteSection,
    #[serde(default)]
    pub output: OutputSection,
    /// State evaluated by `derive`; defaults to the reference state at θ₀.
    #[serde(default)]
    pub state: Option<StateSection>,
    #[serde(default, rename = "process")]
    pub processes: Vec<ProcessSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatSection {
    /// Conductivity tensor κ (symmetric positive semidefinite).
    pub kappa: [[f64; 3]; 3],
    #[serde(default)]
    pub scaling: ConductivityScaling,
}

impl Default for HeatSection {
    fn default() -> Self {
        HeatSection {
            kappa: Mat3::<f64>::identity().to_array(),
            scaling: ConductivityScaling::Constant,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplesSection {
    pub states: usize,
    pub rotations: usize,
}

impl Default for SamplesSection {
    fn default() -> Self {
        SamplesSection {
            states: 10_000,
            rotations: 1_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSection {
    pub checks: Vec<CheckName>,
}

impl Default for SuiteSection {
    fn default() -> Self {
        SuiteSection {
            checks: CheckName::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// NDJSON report written by `verify`.
    pub report: Option<PathBuf>,
    /// CSV log written by `simulate`.
    pub log: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    #[serde(default = "identity_rows")]
    pub f: [[f64; 3]; 3],
    pub theta: f64,
    #[serde(default)]
    pub em: [f64; 3],
    #[serde(default)]
    pub g: [f64; 3],
}

fn identity_rows() -> [[f64; 3]; 3] {
    Mat3::<f64>::identity().to_array()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

/// One `[[process]]` entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSpec {
    pub name: String,
    /// Anchor material point `Y`.
    #[serde(default)]
    pub anchor: [f64; 3],
    /// Material points `X` at which the process is sampled.
    pub points: Vec<[f64; 3]>,
    pub times: TimeSpec,
    /// `A(t)`; identity when omitted.
    #[serde(default = "MatPath::identity")]
    pub deformation: MatPath,
    /// `α(t)`, temperature at the anchor.
    pub alpha: ScalarPath,
    /// `a(t)`, spatial temperature gradient.
    #[serde(default)]
    pub temp_gradient: VecPath,
    /// `b(t)`, spatial potential gradient; `Eᴹ = −b`.
    #[serde(default)]
    pub potential_gradient: VecPath,
    /// `β(t)`, potential at the anchor.
    #[serde(default)]
    pub beta: ScalarPath,
}

impl ProcessSpec {
    pub fn to_named(&self) -> Result<NamedProcess> {
        let TimeSpec { start, end, count } = self.times;
        if count == 0 {
            return Err(Error::param("times.count", "must be at least 1"));
        }
        if self.points.is_empty() {
            return Err(Error::param("points", "at least one material point is required"));
        }
        let process = AffineProcess {
            deformation: self.deformation.clone(),
            alpha: self.alpha,
            temp_gradient: self.temp_gradient,
            potential_gradient: self.potential_gradient,
            beta: self.beta,
            anchor: Vec3(self.anchor),
            horizon: Horizon { start, end },
        };
        process.validate()?;
        if self.points.iter().any(|p| !Vec3(*p).is_finite()) {
            return Err(Error::param("points", "must be finite"));
        }
        let times = time_grid(start, end, count);
        process.check_times(&times)?;
        Ok(NamedProcess {
            name: self.name.clone(),
            process,
            points: self.points.iter().map(|p| Vec3(*p)).collect(),
            times,
        })
    }
}

impl Config {
    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Reads, parses and validates a config file.
    pub fn load(path: &Path) -> std::result::Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg = Self::from_toml(&text).map_err(|message| ConfigError::Parse {
            path: path.to_path_buf(),
            message,
        })?;
        cfg.validate().map_err(|source| ConfigError::Invalid {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(cfg)
    }

    /// Re-validates model parameters, process definitions and name uniqueness.
    pub fn validate(&self) -> Result<()> {
        self.material()?;
        let mut names = HashSet::new();
        for p in &self.processes {
            if !names.insert(p.name.as_str()) {
                return Err(Error::param("process", format!("duplicate process name `{}`", p.name)));
            }
            p.to_named().map_err(|e| Error::param(&format!("process `{}`", p.name), e.to_string()))?;
        }
        Ok(())
    }

    pub fn material(&self) -> Result<Material> {
        let model = QuadraticCoupledModel::new(self.model.clone())?;
        let heat = FourierHeatModel::new(self.heat.kappa, self.heat.scaling)?;
        Ok(Material::new(model, heat).with_fault(self.fault))
    }

    pub fn named_processes(&self) -> Result<Vec<NamedProcess>> {
        self.processes.iter().map(ProcessSpec::to_named).collect()
    }

    pub fn process(&self, name: &str) -> Option<&ProcessSpec> {
        self.processes.iter().find(|p| p.name == name)
    }

    pub fn suite_settings(&self) -> SuiteSettings {
        SuiteSettings {
            seed: self.seed,
            state_samples: self.samples.states,
            rotation_samples: self.samples.rotations,
            tolerances: self.tolerances.clone(),
        }
    }

    /// The `[state]` section, unvalidated; the reference state at θ₀ if absent.
    pub fn derive_state(&self) -> MaterialState {
        match &self.state {
            Some(s) => MaterialState {
                f: Mat3(s.f),
                theta: s.theta,
                em: Vec3(s.em),
                g: Vec3(s.g),
            },
            None => MaterialState::reference(self.model.theta0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 3
[model]
lambda = 1.0
mu = 0.5
c = 1.0
theta0 = 1.0
rho_r = 1.0

[[process]]
name = "spin"
points = [[0.1, 0.2, 0.3]]
times = { start = 0.0, end = 1.0, count = 3 }
deformation = { axis = [0, 0, 1], omega = 2.0 }
alpha = 1
temp_gradient = [0.1, { cubic = [0, 1, 0, 0] }, { mean = 0.0, sin = 0.1, omega = 3 }]
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = Config::from_toml(MINIMAL).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.suite.checks.len(), CheckName::ALL.len());
        assert_eq!(cfg.samples.states, 10_000);
        assert_eq!(cfg.fault, None);
        let p = &cfg.named_processes().unwrap()[0];
        assert_eq!(p.times, vec![0.0, 0.5, 1.0]);
        assert!(matches!(p.process.deformation, MatPath::Rotation { .. }));
        assert_eq!(p.process.temp_gradient[1], ScalarPath::Cubic { cubic: [0.0, 1.0, 0.0, 0.0] });
    }

    #[test]
    fn unknown_key_rejected_with_location() {
        let text = MINIMAL.replace("mu = 0.5", "mu = 0.5\nmuu = 1.0");
        let err = Config::from_toml(&text).unwrap_err();
        assert!(err.contains("muu"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn seed_is_required() {
        assert!(Config::from_toml(&MINIMAL.replace("seed = 3", "")).is_err());
    }

    #[test]
    fn fault_and_checks_parse() {
        let text = format!("fault = \"entropy_sign_flip\"\n{MINIMAL}\n[suite]\nchecks = [\"objectivity\"]\n");
        let cfg = Config::from_toml(&text).unwrap();
        assert_eq!(cfg.fault, Some(Fault::EntropySignFlip));
        assert_eq!(cfg.suite.checks, vec![CheckName::Objectivity]);
        let bad = text.replace("\"objectivity\"", "\"objectivty\"");
        assert!(Config::from_toml(&bad).is_err());
    }

    #[test]
    fn invalid_model_fails_validation() {
        let cfg = Config::from_toml(&MINIMAL.replace("mu = 0.5", "mu = -0.5")).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn duplicate_process_names_rejected() {
        let dup = MINIMAL.to_string() + &MINIMAL[MINIMAL.find("[[process]]").unwrap()..];
        let cfg = Config::from_toml(&dup).unwrap();
        assert!(cfg.validate().unwrap_err().to_string().contains("duplicate"));
    }

    #[test]
    fn cold_process_rejected() {
        let cfg = Config::from_toml(&MINIMAL.replace("alpha = 1", "alpha = -1")).unwrap();
        assert!(cfg.validate().is_err());
    }
}
