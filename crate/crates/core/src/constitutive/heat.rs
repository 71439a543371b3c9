use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::MaterialState;
use crate::tensor::{Mat3, Real, Sym3, Vec3};

/// Scalar temperature dependence `k(θ)` of the conductivity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConductivityScaling {
    /// `k(θ) ≡ 1`.
    #[default]
    Constant,
    /// `k(θ) = k₀ θ₀ / θ`.
    InverseTemperature { k0: f64, theta0: f64 },
}

impl ConductivityScaling {
    pub fn factor<T: Real>(&self, theta: T) -> T {
        match *self {
            ConductivityScaling::Constant => T::one(),
            ConductivityScaling::InverseTemperature { k0, theta0 } => theta.recip() * (k0 * theta0),
        }
    }
}

/// Fourier law `q = −k(θ) κ g`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierHeatModel {
    kappa: Sym3,
    scaling: ConductivityScaling,
}

impl FourierHeatModel {
    /// Rejects a conductivity that is not symmetric positive semidefinite.
    pub fn new(kappa: [[f64; 3]; 3], scaling: ConductivityScaling) -> Result<Self> {
        let kappa = Sym3::try_from_mat(&Mat3(kappa)).map_err(|_| Error::param("kappa", "must be symmetric"))?;
        if !kappa.as_mat().is_finite() {
            return Err(Error::param("kappa", "must be finite"));
        }
        if !kappa.is_psd(1e-12) {
            return Err(Error::param(
                "kappa",
                format!("must be positive semidefinite (eigenvalues {:?})", kappa.eigenvalues()),
            ));
        }
        if let ConductivityScaling::InverseTemperature { k0, theta0 } = scaling {
            if !(k0 > 0.0) || !(theta0 > 0.0) {
                return Err(Error::param("conductivity scaling", "k0 and theta0 must be positive"));
            }
        }
        Ok(FourierHeatModel { kappa, scaling })
    }

    pub fn isotropic(k: f64) -> Result<Self> {
        Self::new(Mat3::<f64>::identity().scale(k).to_array(), ConductivityScaling::Constant)
    }

    /// Thermally insulating material, `κ = 0`.
    pub fn adiabatic() -> Self {
        FourierHeatModel {
            kappa: Sym3::zeros(),
            scaling: ConductivityScaling::Constant,
        }
    }

    pub fn kappa(&self) -> &Sym3 {
        &self.kappa
    }

    pub fn scaling(&self) -> ConductivityScaling {
        self.scaling
    }

    /// Spatial heat flux `q = −k(θ) κ g`.
    pub fn heat_flux<T: Real>(&self, state: &MaterialState<T>) -> Vec3<T> {
        self.flux_with(self.kappa.as_mat(), state)
    }

    pub(crate) fn flux_with<T: Real>(&self, kappa: &Mat3, state: &MaterialState<T>) -> Vec3<T> {
        let k = self.scaling.factor(state.theta);
        -kappa.lift::<T>().mul_vec(&state.g).scale(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(g: Vec3) -> MaterialState {
        MaterialState::new(Mat3::from_diagonal([1.1, 0.9, 1.0]), 1.3, Vec3::new(0.1, 0.2, 0.3), g).unwrap()
    }

    #[test]
    fn static_flux_vanishes() {
        let h = FourierHeatModel::isotropic(2.0).unwrap();
        assert_eq!(h.heat_flux(&state(Vec3::zeros())), Vec3::zeros());
    }

    #[test]
    fn isotropic_unit_conductivity() {
        let h = FourierHeatModel::isotropic(1.0).unwrap();
        assert_eq!(h.heat_flux(&state(Vec3::new(1.0, 0.0, 0.0))), Vec3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn inverse_temperature_scaling() {
        let h = FourierHeatModel::new(
            Mat3::<f64>::identity().to_array(),
            ConductivityScaling::InverseTemperature { k0: 2.0, theta0: 1.0 },
        )
        .unwrap();
        let q = h.heat_flux(&state(Vec3::new(0.0, 1.3, 0.0)));
        assert!((q[1] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn indefinite_conductivity_rejected() {
        let k = [[1.0, 0.0, 0.0], [0.0, -0.5, 0.0], [0.0, 0.0, 1.0]];
        assert!(FourierHeatModel::new(k, ConductivityScaling::Constant).is_err());
        let skew = [[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(FourierHeatModel::new(skew, ConductivityScaling::Constant).is_err());
    }
}
