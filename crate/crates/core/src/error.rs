use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix: |det| = {det:e} does not exceed threshold {threshold:e}")]
    SingularMatrix { det: f64, threshold: f64 },

    #[error("temperature must be positive (θ > 0), got {0}")]
    InvalidTemperature(f64),

    #[error("deformation gradient must have positive determinant (det F > 0), got {0}")]
    NonPositiveJacobian(f64),

    #[error(
        "affine temperature {theta} at X = {x:?}, t = {t} is not above the positivity floor {floor}"
    )]
    NonPositiveTemperature {
        theta: f64,
        x: [f64; 3],
        t: f64,
        floor: f64,
    },

    #[error("inconsistent densities: rho_R = {rho_r}, rho·J = {rho_j}")]
    InconsistentDensity { rho_r: f64, rho_j: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("time {t} lies outside the process horizon [{start}, {end}]")]
    OutsideHorizon { t: f64, start: f64, end: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty sampling grid")]
    EmptyGrid,

    #[error("sample {index}: {source}")]
    Sample { index: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// Innermost error, unwrapping per-sample context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Sample { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for violations of the physical state domain (θ ≤ 0, det F ≤ 0, ...).
    pub fn is_invalid_state(&self) -> bool {
        matches!(
            self.root(),
            Error::InvalidTemperature(_)
                | Error::NonPositiveJacobian(_)
                | Error::NonPositiveTemperature { .. }
                | Error::SingularMatrix { .. }
                | Error::InconsistentDensity { .. }
                | Error::NonFinite(_)
        )
    }
}
