//! Thermo-electroelastic constitutive toolkit.
//!
//! A finitely deforming, electrically polarizable, heat-conducting elastic
//! material is described by a free energy `ψ̃(E, θ, W)`; entropy, stress,
//! polarization and heat flux follow from it. The crate evaluates those
//! responses, builds admissible affine processes that back-solve body force
//! and radiant heating from the balance laws, and checks every thermodynamic
//! restriction numerically (dissipation inequality, Fourier inequality,
//! internal dissipation, entropy equality, objectivity, spatial/referential
//! consistency).

pub mod cli;
pub mod config;
pub mod constitutive;
pub mod error;
pub mod kinematics;
pub mod process;
pub mod processlog;
pub mod tensor;
pub mod verification;

pub use error::{Error, Result};
