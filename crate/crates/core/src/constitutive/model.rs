use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{green_lagrange, piola_vector, Densities, MaterialState, ReferentialState};
use crate::tensor::{Mat3, Real, Sym3, Vec3};

/// Rank-3 electro-mechanical coupling `d_ijk`, symmetric in `(j, k)`.
pub type Piezo = [[[f64; 3]; 3]; 3];

/// Raw parameters of [`QuadraticCoupledModel`], as read from a config file.
///
/// Energetic moduli are per unit reference volume; the model divides by
/// `rho_r` to obtain a free energy per unit mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParameters {
    pub lambda: f64,
    pub mu: f64,
    /// Heat-capacity coefficient.
    pub c: f64,
    pub theta0: f64,
    /// Thermo-mechanical coupling.
    #[serde(default)]
    pub beta: f64,
    /// Dielectric susceptibility-like tensor (symmetric PSD).
    #[serde(default = "zero_mat")]
    pub chi: [[f64; 3]; 3],
    #[serde(default)]
    pub pyro: [f64; 3],
    #[serde(default = "zero_piezo")]
    pub piezo: Piezo,
    pub rho_r: f64,
}

fn zero_mat() -> [[f64; 3]; 3] {
    [[0.0; 3]; 3]
}

fn zero_piezo() -> Piezo {
    [[[0.0; 3]; 3]; 3]
}

impl ModelParameters {
    /// Pure St. Venant–Kirchhoff thermoelastic parameters with every electric
    /// coupling switched off.
    pub fn elastic(lambda: f64, mu: f64, c: f64, theta0: f64, rho_r: f64) -> Self {
        ModelParameters {
            lambda,
            mu,
            c,
            theta0,
            beta: 0.0,
            chi: zero_mat(),
            pyro: [0.0; 3],
            piezo: zero_piezo(),
            rho_r,
        }
    }
}

/// Partial derivatives of `ψ̃(E, θ, W)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Partials<T = f64> {
    pub d_strain: Sym3<T>,
    pub d_theta: T,
    pub d_field: Vec3<T>,
}

/// Polarization in all four normalizations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Polarization<T = f64> {
    /// Per unit mass, spatial (π).
    pub per_mass: Vec3<T>,
    /// Per unit spatial volume (P).
    pub spatial: Vec3<T>,
    /// Per unit reference volume (ℙ).
    pub referential: Vec3<T>,
    /// Per unit mass, referential (Π).
    pub referential_per_mass: Vec3<T>,
}

/// Objective free energy
///
/// ```text
/// ρ_R ψ̃ = ½λ(tr E)² + μ E·E − (c/2θ₀)(θ−θ₀)² − β(θ−θ₀) tr E
///         − ½ W·χW − (θ−θ₀) p·W − W·(d:E)
/// ```
///
/// St. Venant–Kirchhoff elasticity with a quadratic thermal term and linear
/// thermo-mechanical, pyroelectric, piezoelectric and dielectric couplings.
/// There is no temperature-gradient argument.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticCoupledModel {
    params: ModelParameters,
    chi: Sym3,
    pyro: Vec3,
}

impl QuadraticCoupledModel {
    pub fn new(params: ModelParameters) -> Result<Self> {
        let p = &params;
        let scalars = [
            ("lambda", p.lambda),
            ("mu", p.mu),
            ("c", p.c),
            ("theta0", p.theta0),
            ("beta", p.beta),
            ("rho_r", p.rho_r),
        ];
        for (name, v) in scalars {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        for (name, v) in [("mu", p.mu), ("c", p.c), ("theta0", p.theta0), ("rho_r", p.rho_r)] {
            if v <= 0.0 {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        let chi = Sym3::try_from_mat(&Mat3(p.chi)).map_err(|_| Error::param("chi", "must be symmetric"))?;
        if !chi.is_psd(1e-12) {
            return Err(Error::param("chi", "must be positive semidefinite"));
        }
        if p.pyro.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("pyro", "must be finite"));
        }
        for i in 0..3 {
            let slab = Mat3(p.piezo[i]);
            if !slab.is_finite() {
                return Err(Error::param("piezo", "must be finite"));
            }
            if slab.antisymmetric_part().max_abs() > 1e-12 * slab.max_abs().max(1.0) {
                return Err(Error::param(
                    "piezo",
                    format!("d[{i}][j][k] must be symmetric in (j, k)"),
                ));
            }
        }
        Ok(QuadraticCoupledModel {
            chi,
            pyro: Vec3(p.pyro),
            params,
        })
    }

    pub fn params(&self) -> &ModelParameters {
        &self.params
    }

    pub fn rho_r(&self) -> f64 {
        self.params.rho_r
    }

    pub fn theta0(&self) -> f64 {
        self.params.theta0
    }

    fn check_theta<T: Real>(theta: T) -> Result<()> {
        let th = theta.value();
        if !(th > 0.0) {
            return Err(Error::InvalidTemperature(th));
        }
        Ok(())
    }

    /// `(d:E)_i = d_ijk E_jk`.
    fn piezo_strain<T: Real>(&self, e: &Sym3<T>) -> Vec3<T> {
        let e = e.as_mat();
        Vec3::from_fn(|i| {
            let mut s = T::zero();
            for j in 0..3 {
                for k in 0..3 {
                    s += e[(j, k)] * self.params.piezo[i][j][k];
                }
            }
            s
        })
    }

    /// `Σ_i W_i d_ijk`, symmetric in `(j, k)`.
    fn piezo_field<T: Real>(&self, w: &Vec3<T>) -> Mat3<T> {
        Mat3::from_fn(|j, k| {
            let mut s = T::zero();
            for i in 0..3 {
                s += w[i] * self.params.piezo[i][j][k];
            }
            s
        })
    }

    /// Free energy per unit mass `ψ̃(E, θ, W)`.
    pub fn psi<T: Real>(&self, e: &Sym3<T>, theta: T, w: &Vec3<T>) -> Result<T> {
        Self::check_theta(theta)?;
        let p = &self.params;
        let dt = theta - p.theta0;
        let tr = e.trace();
        let chi_w = self.chi.lift::<T>().mul_vec(w);
        let vol = tr * tr * (0.5 * p.lambda) + e.ddot(e) * p.mu
            - dt * dt * (0.5 * p.c / p.theta0)
            - dt * tr * p.beta
            - w.dot(&chi_w) * 0.5
            - dt * w.dot(&self.pyro.lift())
            - w.dot(&self.piezo_strain(e));
        Ok(vol / p.rho_r)
    }

    /// Closed-form `(∂ψ̃/∂E, ∂ψ̃/∂θ, ∂ψ̃/∂W)`.
    pub fn partials<T: Real>(&self, e: &Sym3<T>, theta: T, w: &Vec3<T>) -> Result<Partials<T>> {
        Self::check_theta(theta)?;
        let p = &self.params;
        let inv_rho = 1.0 / p.rho_r;
        let dt = theta - p.theta0;
        let tr = e.trace();
        let iso = tr * p.lambda - dt * p.beta;
        let d_strain = Mat3::from_fn(|j, k| {
            let diag = if j == k { iso } else { T::zero() };
            diag + e.as_mat()[(j, k)] * (2.0 * p.mu)
        }) - self.piezo_field(w);
        let d_theta = (-(dt * (p.c / p.theta0)) - tr * p.beta - w.dot(&self.pyro.lift())) * inv_rho;
        let d_field =
            (-self.chi.lift::<T>().mul_vec(w) - self.pyro.lift::<T>().scale(dt) - self.piezo_strain(e))
                .scale(T::from_f64(inv_rho));
        Ok(Partials {
            d_strain: Sym3::from_symmetric_part(&d_strain.scale(T::from_f64(inv_rho))),
            d_theta,
            d_field,
        })
    }

    /// `ψ̄(F, θ, Eᴹ) = ψ̃(E(F), θ, FᵀEᴹ)`.
    pub fn psi_spatial<T: Real>(&self, state: &MaterialState<T>) -> Result<T> {
        let r = state.to_referential();
        self.psi(&green_lagrange(&r.f), r.theta, &r.w)
    }

    fn partials_at<T: Real>(&self, state: &MaterialState<T>) -> Result<Partials<T>> {
        let r = state.to_referential();
        self.partials(&green_lagrange(&r.f), r.theta, &r.w)
    }

    /// Entropy per unit mass `η = −∂ψ̃/∂θ`.
    pub fn entropy<T: Real>(&self, state: &MaterialState<T>) -> Result<T> {
        state.validate()?;
        Ok(-self.partials_at(state)?.d_theta)
    }

    /// Polarization per unit mass `π = −F ∂ψ̃/∂W`, without any normalization.
    pub fn polarization_per_mass<T: Real>(&self, state: &MaterialState<T>) -> Result<Vec3<T>> {
        state.validate()?;
        Ok(-state.f.mul_vec(&self.partials_at(state)?.d_field))
    }

    fn check_densities<T: Real>(&self, state: &MaterialState<T>, dens: &Densities<T>) -> Result<()> {
        dens.check(&state.f)?;
        let rho_r = dens.rho_r.value();
        if (rho_r - self.params.rho_r).abs() > 1e-12 * self.params.rho_r {
            return Err(Error::InconsistentDensity {
                rho_r: self.params.rho_r,
                rho_j: rho_r,
            });
        }
        Ok(())
    }

    /// π, `P = ρπ`, `ℙ = JF⁻¹P` and `Π = ℙ/ρ_R`.
    pub fn polarization<T: Real>(
        &self,
        state: &MaterialState<T>,
        dens: &Densities<T>,
    ) -> Result<Polarization<T>> {
        self.check_densities(state, dens)?;
        let per_mass = self.polarization_per_mass(state)?;
        let spatial = per_mass.scale(dens.rho);
        let referential = piola_vector(&state.f, &spatial)?;
        Ok(Polarization {
            per_mass,
            spatial,
            referential,
            referential_per_mass: referential.scale(dens.rho_r.recip()),
        })
    }

    /// Cauchy stress `τ = ρ F (∂ψ̃/∂E) Fᵀ − P ⊗ Eᴹ` (first index: face normal).
    pub fn cauchy_stress<T: Real>(&self, state: &MaterialState<T>, dens: &Densities<T>) -> Result<Mat3<T>> {
        self.check_densities(state, dens)?;
        Ok(self.cauchy_stress_unchecked(state, dens.rho)? - self.polarization_per_mass(state)?.scale(dens.rho).outer(&state.em))
    }

    /// Symmetric part `ρ F (∂ψ̃/∂E) Fᵀ` only.
    pub(crate) fn cauchy_stress_unchecked<T: Real>(&self, state: &MaterialState<T>, rho: T) -> Result<Mat3<T>> {
        state.validate()?;
        let d = self.partials_at(state)?.d_strain;
        let f = &state.f;
        Ok(f.matmul(d.as_mat()).matmul(&f.transpose()).scale(rho))
    }

    /// Nominal stress `S = ρ_R ∂ψ̂/∂F = ρ_R F ∂ψ̃/∂E`, holding `W` fixed.
    pub fn referential_stress<T: Real>(&self, rstate: &ReferentialState<T>) -> Result<Mat3<T>> {
        rstate.validate()?;
        let d = self.partials(&green_lagrange(&rstate.f), rstate.theta, &rstate.w)?.d_strain;
        Ok(rstate.f.matmul(d.as_mat()).scale(T::from_f64(self.params.rho_r)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelParameters {
        ModelParameters::elastic(1.0, 0.5, 2.0, 1.0, 2.0)
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut p = base();
        p.mu = 0.0;
        assert!(QuadraticCoupledModel::new(p).is_err());
        let mut p = base();
        p.chi = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(QuadraticCoupledModel::new(p).is_err());
        let mut p = base();
        p.piezo[0][0][1] = 0.3;
        assert!(QuadraticCoupledModel::new(p).is_err());
        let mut p = base();
        p.c = f64::NAN;
        assert!(QuadraticCoupledModel::new(p).is_err());
    }

    #[test]
    fn reference_state_is_zero() {
        let m = QuadraticCoupledModel::new(base()).unwrap();
        let psi = m.psi(&Sym3::zeros(), 1.0, &Vec3::zeros()).unwrap();
        assert_eq!(psi, 0.0);
        let d = m.partials(&Sym3::zeros(), 1.0, &Vec3::zeros()).unwrap();
        assert_eq!(d.d_theta, 0.0);
        assert_eq!(d.d_field, Vec3::zeros());
        assert_eq!(*d.d_strain.as_mat(), Mat3::zeros());
    }

    #[test]
    fn pure_shear_without_lambda() {
        let mut p = base();
        p.lambda = 0.0;
        let m = QuadraticCoupledModel::new(p).unwrap();
        let e = Sym3::try_from_mat(&Mat3([[0.0, 0.1, 0.0], [0.1, 0.0, 0.0], [0.0, 0.0, 0.0]])).unwrap();
        let psi = m.psi(&e, 1.0, &Vec3::zeros()).unwrap();
        assert!((psi - 0.5 * 0.02 / 2.0).abs() < 1e-16);
    }

    #[test]
    fn dielectric_only_partial() {
        let mut p = base();
        p.chi = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let m = QuadraticCoupledModel::new(p).unwrap();
        let w = Vec3::new(0.2, -0.4, 0.6);
        let d = m.partials(&Sym3::zeros(), 1.0, &w).unwrap();
        assert_eq!(d.d_field, -w.scale(0.5));
    }

    #[test]
    fn entropy_closed_form() {
        // c/(ρ_R θ₀) = 0.1 and θ − θ₀ = 10 give η = 1.
        let p = ModelParameters::elastic(1.0, 0.5, 0.2, 1.0, 2.0);
        let m = QuadraticCoupledModel::new(p).unwrap();
        let s = MaterialState::reference(11.0);
        assert!((m.entropy(&s).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(m.entropy(&MaterialState::reference(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn nonpositive_temperature_is_an_error() {
        let m = QuadraticCoupledModel::new(base()).unwrap();
        assert_eq!(
            m.psi(&Sym3::zeros(), 0.0, &Vec3::zeros()),
            Err(Error::InvalidTemperature(0.0))
        );
        assert!(m.partials(&Sym3::zeros(), -2.0, &Vec3::zeros()).is_err());
    }

    #[test]
    fn mismatched_density_is_rejected() {
        let m = QuadraticCoupledModel::new(base()).unwrap();
        let s = MaterialState::reference(1.0);
        let dens = Densities::from_reference(3.0, &s.f).unwrap();
        assert!(matches!(m.cauchy_stress(&s, &dens), Err(Error::InconsistentDensity { .. })));
    }
}
