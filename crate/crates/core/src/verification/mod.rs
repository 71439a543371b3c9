//! Executable checks of the thermodynamic restrictions, each producing a
//! [`CheckReport`] with an explicit tolerance.

mod dissipation;
mod process_checks;
pub mod sampling;
mod state_checks;
mod suite;

use serde::{Deserialize, Serialize};

use crate::kinematics::MaterialState;
use crate::tensor::Vec3;

pub use dissipation::{
    dissipation_residual_referential, dissipation_residual_spatial, dissipation_terms_referential,
    dissipation_terms_spatial, DissipationTerms,
};
pub use process_checks::{
    balance_residuals, check_balance_closure, check_continuity_identity, check_cross_description,
    check_entropy_equality, check_entropy_identity, check_internal_dissipation, entropy_equality_residual,
    internal_dissipation, BalanceResiduals, ProcessRun,
};
pub use state_checks::{
    check_antisymmetric_stress, check_dissipation_referential, check_dissipation_spatial,
    check_fourier_inequality, check_gradient_independence, check_objectivity, check_referential_restrictions,
    check_restrictions_spatial, check_static_heat_flux, check_transform_identities,
};
pub use suite::{run_suite, CheckName, NamedProcess, SuiteSettings, Tolerances};

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_input: Option<WorstInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl CheckReport {
    /// `pass` is derived: `max_residual <= tolerance`.
    pub fn new(name: impl Into<String>, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        CheckReport {
            name: name.into(),
            samples,
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            worst_input: None,
            notes: None,
        }
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        format!(
            "{} {:<40} residual {:.3e} (tol {:.1e}, {} samples)",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.max_residual,
            self.tolerance,
            self.samples
        )
    }
}

/// The state (and process location, if any) at which a check's residual
/// peaked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorstInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<[f64; 3]>,
    pub f: [[f64; 3]; 3],
    pub theta: f64,
    pub em: [f64; 3],
    pub g: [f64; 3],
}

impl WorstInput {
    pub fn from_state(s: &MaterialState) -> Self {
        WorstInput {
            process: None,
            t: None,
            x: None,
            f: s.f.to_array(),
            theta: s.theta,
            em: s.em.to_array(),
            g: s.g.to_array(),
        }
    }

    pub fn at(mut self, process: &str, t: f64, x: &Vec3) -> Self {
        self.process = Some(process.to_string());
        self.t = Some(t);
        self.x = Some(x.to_array());
        self
    }
}

/// `|a − b|∞ / max(|a|∞, |b|∞, 1)`.
pub fn relative_residual(diff: f64, a: f64, b: f64) -> f64 {
    diff / a.max(b).max(1.0)
}

/// `|residual| / scale`, or 0 when every contributing term vanishes.
pub fn scaled_residual(residual: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        residual.abs()
    } else {
        residual.abs() / scale
    }
}

/// Running maximum of a residual with the input that produced it.
pub(crate) struct Tracker {
    name: String,
    tolerance: f64,
    samples: usize,
    max: f64,
    worst: Option<WorstInput>,
    non_finite: usize,
}

impl Tracker {
    pub(crate) fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Tracker {
            name: name.into(),
            tolerance,
            samples: 0,
            max: 0.0,
            worst: None,
            non_finite: 0,
        }
    }

    pub(crate) fn observe(&mut self, residual: f64, input: impl FnOnce() -> WorstInput) {
        self.samples += 1;
        let r = if residual.is_finite() {
            residual
        } else {
            self.non_finite += 1;
            f64::MAX
        };
        if r > self.max || self.worst.is_none() {
            self.max = self.max.max(r);
            self.worst = Some(input());
        }
    }

    pub(crate) fn finish(self, notes: Option<String>) -> CheckReport {
        let mut notes = notes;
        if self.non_finite > 0 {
            let msg = format!("{} non-finite residuals", self.non_finite);
            notes = Some(match notes {
                Some(n) => format!("{n}; {msg}"),
                None => msg,
            });
        }
        CheckReport {
            worst_input: self.worst,
            notes,
            ..CheckReport::new(self.name, self.samples, self.max, self.tolerance)
        }
    }
}
