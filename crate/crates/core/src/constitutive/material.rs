use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::heat::FourierHeatModel;
use super::model::QuadraticCoupledModel;
use crate::error::{Error, Result};
use crate::kinematics::{green_lagrange, piola_vector, Densities, MaterialState, ReferentialState};
use crate::tensor::{Dual, Mat3, Real, Vec3};

/// Strength of the `|G|²` term injected by [`Fault::GradientDependentPsi`].
pub const GRADIENT_FAULT_STRENGTH: f64 = 0.05;

/// Deliberate model corruptions used to prove that the checks detect
/// violations of the thermodynamic restrictions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Entropy returned as `+∂ψ/∂θ`.
    EntropySignFlip,
    /// Cauchy stress without the `−P ⊗ Eᴹ` term.
    MissingPolarizationStress,
    /// Free energy picks up `γ|G|²/ρ_R`; responses keep the compliant forms.
    GradientDependentPsi,
    /// Heat flux evaluated with `−κ`.
    NonPsdConductivity,
}

impl Fault {
    pub const ALL: [Fault; 4] = [
        Fault::EntropySignFlip,
        Fault::MissingPolarizationStress,
        Fault::GradientDependentPsi,
        Fault::NonPsdConductivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fault::EntropySignFlip => "entropy_sign_flip",
            Fault::MissingPolarizationStress => "missing_polarization_stress",
            Fault::GradientDependentPsi => "gradient_dependent_psi",
            Fault::NonPsdConductivity => "non_psd_conductivity",
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fault {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Fault::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::param("fault", format!("unknown fault `{s}`")))
    }
}

/// Every derived field at one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResponseSet<T = f64> {
    /// Free energy per unit mass ψ.
    pub psi: T,
    /// Entropy per unit mass η.
    pub eta: T,
    /// Cauchy stress τ.
    pub tau: Mat3<T>,
    /// Nominal stress S = ρ_R ∂ψ̂/∂F at fixed W.
    pub s: Mat3<T>,
    /// Polarization per unit mass π.
    pub pi: Vec3<T>,
    /// Polarization per unit spatial volume P.
    pub p: Vec3<T>,
    /// Referential polarization per unit mass Π.
    pub pi_ref: Vec3<T>,
    /// Referential polarization per unit reference volume ℙ.
    pub p_ref: Vec3<T>,
    pub q: Vec3<T>,
    pub q_ref: Vec3<T>,
    /// Internal energy per unit mass ε = ψ + θη + Eᴹ·π.
    pub eps: T,
}

impl ResponseSet<Dual> {
    pub fn values(&self) -> ResponseSet {
        ResponseSet {
            psi: self.psi.value,
            eta: self.eta.value,
            tau: self.tau.values(),
            s: self.s.values(),
            pi: self.pi.values(),
            p: self.p.values(),
            pi_ref: self.pi_ref.values(),
            p_ref: self.p_ref.values(),
            q: self.q.values(),
            q_ref: self.q_ref.values(),
            eps: self.eps.value,
        }
    }

    /// Componentwise derivative parts (material time rates when the state
    /// was seeded with rates).
    pub fn derivs(&self) -> ResponseSet {
        ResponseSet {
            psi: self.psi.deriv,
            eta: self.eta.deriv,
            tau: self.tau.derivs(),
            s: self.s.derivs(),
            pi: self.pi.derivs(),
            p: self.p.derivs(),
            pi_ref: self.pi_ref.derivs(),
            p_ref: self.p_ref.derivs(),
            q: self.q.derivs(),
            q_ref: self.q_ref.derivs(),
            eps: self.eps.deriv,
        }
    }
}

/// Response functions of a thermo-electroelastic material.
///
/// Everything is generic over [`Real`] so responses can be evaluated on dual
/// numbers to obtain directional and time derivatives.
pub trait Constitutive: Sync {
    fn rho_r(&self) -> f64;

    /// Reference temperature, used to centre state sampling.
    fn theta0(&self) -> f64;

    /// `ψ̂(F, θ, W, G)` per unit mass.
    fn free_energy_referential<T: Real>(&self, s: &ReferentialState<T>) -> Result<T>;

    /// `ψ̄(F, θ, Eᴹ, g)` per unit mass.
    fn free_energy<T: Real>(&self, s: &MaterialState<T>) -> Result<T> {
        self.free_energy_referential(&s.to_referential())
    }

    fn entropy<T: Real>(&self, s: &MaterialState<T>) -> Result<T>;

    /// Polarization per unit mass π.
    fn polarization_per_mass<T: Real>(&self, s: &MaterialState<T>) -> Result<Vec3<T>>;

    fn cauchy_stress<T: Real>(&self, s: &MaterialState<T>) -> Result<Mat3<T>>;

    fn heat_flux<T: Real>(&self, s: &MaterialState<T>) -> Result<Vec3<T>>;

    fn referential_entropy<T: Real>(&self, s: &ReferentialState<T>) -> Result<T> {
        self.entropy(&s.to_spatial()?)
    }

    /// Nominal stress `S = ρ_R ∂ψ̂/∂F` with `W` held fixed.
    fn nominal_stress<T: Real>(&self, s: &ReferentialState<T>) -> Result<Mat3<T>>;

    /// Referential polarization per unit mass Π.
    fn referential_polarization_per_mass<T: Real>(&self, s: &ReferentialState<T>) -> Result<Vec3<T>>;

    /// Referential heat flux `Q = J F⁻¹ q̄(F, θ, F⁻ᵀW, F⁻ᵀG)`.
    fn referential_heat_flux<T: Real>(&self, s: &ReferentialState<T>) -> Result<Vec3<T>> {
        let q = self.heat_flux(&s.to_spatial()?)?;
        piola_vector(&s.f, &q)
    }

    /// Full response set at a spatial state.
    fn response<T: Real>(&self, s: &MaterialState<T>) -> Result<ResponseSet<T>> {
        s.validate()?;
        let dens = Densities::from_reference(T::from_f64(self.rho_r()), &s.f)?;
        let psi = self.free_energy(s)?;
        let eta = self.entropy(s)?;
        let pi = self.polarization_per_mass(s)?;
        let p = pi.scale(dens.rho);
        let p_ref = piola_vector(&s.f, &p)?;
        let q = self.heat_flux(s)?;
        Ok(ResponseSet {
            psi,
            eta,
            tau: self.cauchy_stress(s)?,
            s: self.nominal_stress(&s.to_referential())?,
            pi,
            p,
            pi_ref: p_ref.scale(T::from_f64(1.0 / self.rho_r())),
            p_ref,
            q,
            q_ref: piola_vector(&s.f, &q)?,
            eps: psi + s.theta * eta + s.em.dot(&pi),
        })
    }
}

/// Quadratic coupled free energy plus Fourier conduction, optionally with an
/// injected [`Fault`].
#[derive(Clone, Debug, PartialEq)]
pub struct Material {
    pub model: QuadraticCoupledModel,
    pub heat: FourierHeatModel,
    pub fault: Option<Fault>,
}

impl Material {
    pub fn new(model: QuadraticCoupledModel, heat: FourierHeatModel) -> Self {
        Material {
            model,
            heat,
            fault: None,
        }
    }

    pub fn with_fault(mut self, fault: Option<Fault>) -> Self {
        self.fault = fault;
        self
    }

    fn has(&self, fault: Fault) -> bool {
        self.fault == Some(fault)
    }
}

impl Constitutive for Material {
    fn rho_r(&self) -> f64 {
        self.model.rho_r()
    }

    fn theta0(&self) -> f64 {
        self.model.theta0()
    }

    fn free_energy_referential<T: Real>(&self, s: &ReferentialState<T>) -> Result<T> {
        s.validate()?;
        let psi = self.model.psi(&green_lagrange(&s.f), s.theta, &s.w)?;
        if self.has(Fault::GradientDependentPsi) {
            return Ok(psi + s.g_ref.dot(&s.g_ref) * (GRADIENT_FAULT_STRENGTH / self.rho_r()));
        }
        Ok(psi)
    }

    fn entropy<T: Real>(&self, s: &MaterialState<T>) -> Result<T> {
        let eta = self.model.entropy(s)?;
        Ok(if self.has(Fault::EntropySignFlip) { -eta } else { eta })
    }

    fn polarization_per_mass<T: Real>(&self, s: &MaterialState<T>) -> Result<Vec3<T>> {
        self.model.polarization_per_mass(s)
    }

    fn cauchy_stress<T: Real>(&self, s: &MaterialState<T>) -> Result<Mat3<T>> {
        let dens = Densities::from_reference(T::from_f64(self.rho_r()), &s.f)?;
        if self.has(Fault::MissingPolarizationStress) {
            return self.model.cauchy_stress_unchecked(s, dens.rho);
        }
        self.model.cauchy_stress(s, &dens)
    }

    fn heat_flux<T: Real>(&self, s: &MaterialState<T>) -> Result<Vec3<T>> {
        s.validate()?;
        if self.has(Fault::NonPsdConductivity) {
            return Ok(self.heat.flux_with(&self.heat.kappa().as_mat().scale(-1.0), s));
        }
        Ok(self.heat.heat_flux(s))
    }

    fn referential_entropy<T: Real>(&self, s: &ReferentialState<T>) -> Result<T> {
        s.validate()?;
        let eta = -self.model.partials(&green_lagrange(&s.f), s.theta, &s.w)?.d_theta;
        Ok(if self.has(Fault::EntropySignFlip) { -eta } else { eta })
    }

    fn nominal_stress<T: Real>(&self, s: &ReferentialState<T>) -> Result<Mat3<T>> {
        self.model.referential_stress(s)
    }

    fn referential_polarization_per_mass<T: Real>(&self, s: &ReferentialState<T>) -> Result<Vec3<T>> {
        s.validate()?;
        Ok(-self.model.partials(&green_lagrange(&s.f), s.theta, &s.w)?.d_field)
    }
}

/// Full response from separately held free-energy and heat models, with the
/// caller's densities validated against `ρ_R = ρ det F`.
pub fn full_response(
    model: &QuadraticCoupledModel,
    heat: &FourierHeatModel,
    state: &MaterialState,
    dens: &Densities,
) -> Result<ResponseSet> {
    dens.check(&state.f)?;
    if (dens.rho_r - model.rho_r()).abs() > 1e-12 * model.rho_r() {
        return Err(Error::InconsistentDensity {
            rho_r: model.rho_r(),
            rho_j: dens.rho_r,
        });
    }
    Material::new(model.clone(), heat.clone()).response(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::ModelParameters;

    fn material() -> Material {
        let model = QuadraticCoupledModel::new(ModelParameters::elastic(1.0, 0.5, 2.0, 1.0, 2.0)).unwrap();
        Material::new(model, FourierHeatModel::isotropic(1.0).unwrap())
    }

    #[test]
    fn fault_names_round_trip() {
        for f in Fault::ALL {
            assert_eq!(f.name().parse::<Fault>().unwrap(), f);
        }
        assert!("bogus".parse::<Fault>().is_err());
    }

    #[test]
    fn reference_response_is_zero() {
        let r = material().response(&MaterialState::reference(1.0)).unwrap();
        assert_eq!(r.psi, 0.0);
        assert_eq!(r.eta, 0.0);
        assert_eq!(r.eps, 0.0);
        assert_eq!(r.tau, Mat3::zeros());
        assert_eq!(r.s, Mat3::zeros());
        assert_eq!(r.p, Vec3::zeros());
        assert_eq!(r.q, Vec3::zeros());
    }

    #[test]
    fn entropy_fault_flips_sign() {
        let s = MaterialState::reference(1.5);
        let good = material().entropy(&s).unwrap();
        let bad = material().with_fault(Some(Fault::EntropySignFlip)).entropy(&s).unwrap();
        assert!(good != 0.0);
        assert_eq!(bad, -good);
    }

    #[test]
    fn full_response_checks_densities() {
        let m = material();
        let s = MaterialState::reference(1.0);
        let bad = Densities { rho_r: 2.0, rho: 1.0 };
        assert!(full_response(&m.model, &m.heat, &s, &bad).is_err());
        let ok = Densities::from_reference(2.0, &s.f).unwrap();
        assert!(full_response(&m.model, &m.heat, &s, &ok).is_ok());
    }
}
