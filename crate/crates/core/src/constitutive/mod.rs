//! Free-energy model, heat conduction law and every response derived from
//! them, in spatial and referential form.

mod heat;
mod material;
mod model;

pub use heat::{ConductivityScaling, FourierHeatModel};
pub use material::{full_response, Constitutive, Fault, Material, ResponseSet, GRADIENT_FAULT_STRENGTH};
pub use model::{ModelParameters, Partials, Piezo, Polarization, QuadraticCoupledModel};
