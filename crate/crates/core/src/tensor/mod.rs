//! Fixed-size vector/tensor algebra and the two differentiation engines:
//! forward-mode dual numbers and central finite differences.

mod fd;
mod matrix;
mod scalar;
mod vector;

pub use fd::{default_step, fd_derivative, fd_gradient};
pub use matrix::{Mat3, Sym3, SINGULAR_REL};
pub use scalar::{derivative, Dual, Real};
pub use vector::Vec3;
