use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::process_checks::*;
use super::state_checks::*;
use super::CheckReport;
use crate::constitutive::Constitutive;
use crate::error::{Error, Result};
use crate::process::AffineProcess;
use crate::tensor::Vec3;

/// Every check the suite knows, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Theorem1Restrictions,
    ReferentialRestrictions,
    DissipationSpatial,
    DissipationReferential,
    GradientIndependence,
    AntisymmetricStress,
    Objectivity,
    StaticHeatFlux,
    FourierInequality,
    TransformIdentities,
    InternalDissipation,
    EntropyEquality,
    EntropyIdentity,
    BalanceClosure,
    ContinuityIdentity,
    CrossDescription,
}

impl CheckName {
    pub const ALL: [CheckName; 16] = [
        CheckName::Theorem1Restrictions,
        CheckName::ReferentialRestrictions,
        CheckName::DissipationSpatial,
        CheckName::DissipationReferential,
        CheckName::GradientIndependence,
        CheckName::AntisymmetricStress,
        CheckName::Objectivity,
        CheckName::StaticHeatFlux,
        CheckName::FourierInequality,
        CheckName::TransformIdentities,
        CheckName::InternalDissipation,
        CheckName::EntropyEquality,
        CheckName::EntropyIdentity,
        CheckName::BalanceClosure,
        CheckName::ContinuityIdentity,
        CheckName::CrossDescription,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckName::Theorem1Restrictions => "theorem1_restrictions",
            CheckName::ReferentialRestrictions => "referential_restrictions",
            CheckName::DissipationSpatial => "dissipation_spatial",
            CheckName::DissipationReferential => "dissipation_referential",
            CheckName::GradientIndependence => "gradient_independence",
            CheckName::AntisymmetricStress => "antisymmetric_stress",
            CheckName::Objectivity => "objectivity",
            CheckName::StaticHeatFlux => "static_heat_flux",
            CheckName::FourierInequality => "fourier_inequality",
            CheckName::TransformIdentities => "transform_identities",
            CheckName::InternalDissipation => "internal_dissipation",
            CheckName::EntropyEquality => "entropy_equality",
            CheckName::EntropyIdentity => "entropy_identity",
            CheckName::BalanceClosure => "balance_closure",
            CheckName::ContinuityIdentity => "continuity_identity",
            CheckName::CrossDescription => "cross_description",
        }
    }

    /// Whether the check runs along configured processes rather than on
    /// random states.
    pub fn uses_processes(self) -> bool {
        self >= CheckName::InternalDissipation
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::param("suite", format!("unknown check `{s}`")))
    }
}

/// Per-check tolerances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub theorem1_restrictions: f64,
    pub referential_restrictions: f64,
    pub dissipation_spatial: f64,
    pub dissipation_referential: f64,
    pub gradient_independence: f64,
    pub antisymmetric_stress: f64,
    pub objectivity: f64,
    pub static_heat_flux: f64,
    pub fourier_inequality: f64,
    pub transform_identities: f64,
    pub internal_dissipation: f64,
    pub entropy_equality: f64,
    pub entropy_identity: f64,
    pub balance_closure: f64,
    pub continuity_identity: f64,
    pub polarization_work: f64,
    pub heat_flux_transform: f64,
    pub flux_term: f64,
    pub stress_power: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            theorem1_restrictions: 1e-5,
            referential_restrictions: 1e-5,
            dissipation_spatial: 1e-10,
            dissipation_referential: 1e-10,
            gradient_independence: 0.0,
            antisymmetric_stress: 1e-12,
            objectivity: 1e-12,
            static_heat_flux: 0.0,
            fourier_inequality: 1e-12,
            transform_identities: 1e-12,
            internal_dissipation: 1e-7,
            entropy_equality: 1e-7,
            entropy_identity: 1e-12,
            balance_closure: 1e-8,
            continuity_identity: 1e-8,
            polarization_work: 1e-12,
            heat_flux_transform: 1e-12,
            flux_term: 1e-10,
            stress_power: 1e-10,
        }
    }
}

/// Sampling controls for a suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteSettings {
    pub seed: u64,
    /// Random states per state-based check.
    pub state_samples: usize,
    /// Random (state, rotation) pairs for the objectivity check.
    pub rotation_samples: usize,
    pub tolerances: Tolerances,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        SuiteSettings {
            seed: 0,
            state_samples: 10_000,
            rotation_samples: 1_000,
            tolerances: Tolerances::default(),
        }
    }
}

/// A process with the material points and times at which it is sampled.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedProcess {
    pub name: String,
    pub process: AffineProcess,
    pub points: Vec<Vec3>,
    pub times: Vec<f64>,
}

/// Runs the selected checks in canonical order (duplicates ignored).
pub fn run_suite<M: Constitutive>(
    m: &M,
    checks: &[CheckName],
    settings: &SuiteSettings,
    processes: &[NamedProcess],
) -> Result<Vec<CheckReport>> {
    let mut selected = checks.to_vec();
    selected.sort();
    selected.dedup();
    if selected.is_empty() {
        return Err(Error::param("suite", "no checks selected"));
    }
    let runs = if selected.iter().any(|c| c.uses_processes()) {
        if processes.is_empty() {
            return Err(Error::param("process", "process checks selected but no processes are defined"));
        }
        processes
            .iter()
            .map(|p| {
                log::info!("running process `{}` ({} samples)", p.name, p.points.len() * p.times.len());
                ProcessRun::new(m, p)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let n = settings.state_samples;
    let seed = settings.seed;
    let tol = &settings.tolerances;
    let mut reports = Vec::new();
    for check in selected {
        log::info!("check {check}");
        match check {
            CheckName::Theorem1Restrictions => reports.push(check_restrictions_spatial(m, n, seed, tol.theorem1_restrictions)?),
            CheckName::ReferentialRestrictions => {
                reports.push(check_referential_restrictions(m, n, seed, tol.referential_restrictions)?)
            }
            CheckName::DissipationSpatial => reports.push(check_dissipation_spatial(m, n, seed, tol.dissipation_spatial)?),
            CheckName::DissipationReferential => {
                reports.push(check_dissipation_referential(m, n, seed, tol.dissipation_referential)?)
            }
            CheckName::GradientIndependence => {
                reports.push(check_gradient_independence(m, n, seed, tol.gradient_independence)?)
            }
            CheckName::AntisymmetricStress => reports.push(check_antisymmetric_stress(m, n, seed, tol.antisymmetric_stress)?),
            CheckName::Objectivity => reports.push(check_objectivity(m, settings.rotation_samples, seed, tol.objectivity)?),
            CheckName::StaticHeatFlux => reports.push(check_static_heat_flux(m, n, seed, tol.static_heat_flux)?),
            CheckName::FourierInequality => reports.push(check_fourier_inequality(m, n, seed, tol.fourier_inequality)?),
            CheckName::TransformIdentities => reports.push(check_transform_identities(m, n, seed, tol.transform_identities)?),
            CheckName::InternalDissipation => reports.push(check_internal_dissipation(&runs, tol.internal_dissipation)?),
            CheckName::EntropyEquality => reports.push(check_entropy_equality(&runs, tol.entropy_equality)?),
            CheckName::EntropyIdentity => reports.push(check_entropy_identity(&runs, tol.entropy_identity)?),
            CheckName::BalanceClosure => reports.push(check_balance_closure(m, &runs, tol.balance_closure)?),
            CheckName::ContinuityIdentity => reports.push(check_continuity_identity(&runs, tol.continuity_identity)?),
            CheckName::CrossDescription => reports.extend(check_cross_description(
                m,
                &runs,
                [tol.polarization_work, tol.heat_flux_transform, tol.flux_term, tol.stress_power],
            )?),
        }
    }
    Ok(reports)
}
