//! Checks over independently sampled random states.

use rayon::prelude::*;

use super::dissipation::{dissipation_terms_referential, dissipation_terms_spatial};
use super::sampling::{
    random_referential_rates, random_rates, random_rotation, random_state, rng, sub_seed, uniform_vec,
};
use super::{relative_residual, scaled_residual, CheckReport, Tracker, WorstInput};
use crate::constitutive::Constitutive;
use crate::error::Result;
use crate::kinematics::{
    electric_displacement, piola_vector, referential_displacement, MaterialState, ReferentialState,
};
use crate::tensor::{fd_gradient, Mat3, Vec3};

fn rel_v(a: &Vec3, b: &Vec3) -> f64 {
    relative_residual((*a - *b).max_abs(), a.max_abs(), b.max_abs())
}

fn rel_m(a: &Mat3, b: &Mat3) -> f64 {
    relative_residual((*a - *b).max_abs(), a.max_abs(), b.max_abs())
}

fn rel_s(a: f64, b: f64) -> f64 {
    relative_residual((a - b).abs(), a.abs(), b.abs())
}

/// Evaluates `residual` on every input in parallel and folds the results in
/// input order.
fn sweep<I: Sync>(
    name: &str,
    tolerance: f64,
    inputs: &[I],
    state_of: impl Fn(&I) -> &MaterialState,
    residual: impl Fn(&I) -> Result<f64> + Sync,
) -> Result<CheckReport> {
    let values: Vec<Result<f64>> = inputs.par_iter().map(&residual).collect();
    let mut tracker = Tracker::new(name, tolerance);
    for (input, value) in inputs.iter().zip(values) {
        tracker.observe(value?, || WorstInput::from_state(state_of(input)));
    }
    Ok(tracker.finish(None))
}

fn states(seed: u64, label: &str, n: usize, theta0: f64) -> Vec<MaterialState> {
    let mut r = rng(sub_seed(seed, label));
    (0..n).map(|_| random_state(&mut r, theta0)).collect()
}

fn flatten(f: &Mat3, theta: f64, v: &Vec3) -> Vec<f64> {
    let mut x = f.to_flat().to_vec();
    x.push(theta);
    x.extend_from_slice(&v.0);
    x
}

fn unflatten(x: &[f64]) -> (Mat3, f64, Vec3) {
    (Mat3::from_flat(&x[..9]), x[9], Vec3::new(x[10], x[11], x[12]))
}

/// Analytic η, τ, π against central differences of `ψ̄(F, θ, Eᴹ)` at fixed
/// `g`: `η = −∂ψ̄/∂θ`, `τ_ij = ρ Σ_K F_iK ∂ψ̄/∂F_jK`, `π = −∂ψ̄/∂Eᴹ`.
pub fn check_restrictions_spatial<M: Constitutive>(m: &M, samples: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let name = "theorem1_restrictions";
    let inputs = states(seed, name, samples, m.theta0());
    sweep(name, tol, &inputs, |s| s, |s| {
        let grad = fd_gradient(
            |x| {
                let (f, theta, em) = unflatten(x);
                m.free_energy(&MaterialState { f, theta, em, g: s.g })
            },
            &flatten(&s.f, s.theta, &s.em),
            None,
        )?;
        let (d, psi_theta, psi_em) = unflatten(&grad);
        let rho = m.rho_r() / s.jacobian();
        let tau_fd = s.f.matmul(&d.transpose()).scale(rho);
        let eta = m.entropy(s)?;
        let tau = m.cauchy_stress(s)?;
        let pi = m.polarization_per_mass(s)?;
        Ok(rel_s(eta, -psi_theta).max(rel_m(&tau, &tau_fd)).max(rel_v(&pi, &-psi_em)))
    })
}

/// Referential η, S, Π against central differences of `ψ̂(F, θ, W)` at
/// fixed `G`.
pub fn check_referential_restrictions<M: Constitutive>(
    m: &M,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CheckReport> {
    let name = "referential_restrictions";
    let inputs = states(seed, name, samples, m.theta0());
    sweep(name, tol, &inputs, |s| s, |s| {
        let r = s.to_referential();
        let grad = fd_gradient(
            |x| {
                let (f, theta, w) = unflatten(x);
                m.free_energy_referential(&ReferentialState { f, theta, w, g_ref: r.g_ref })
            },
            &flatten(&r.f, r.theta, &r.w),
            None,
        )?;
        let (d, psi_theta, psi_w) = unflatten(&grad);
        let eta = m.referential_entropy(&r)?;
        let stress = m.nominal_stress(&r)?;
        let pi_ref = m.referential_polarization_per_mass(&r)?;
        Ok(rel_s(eta, -psi_theta)
            .max(rel_m(&stress, &d.scale(m.rho_r())))
            .max(rel_v(&pi_ref, &-psi_w)))
    })
}

/// `D` must equal its heat term and be non-positive; the residual is the
/// larger of the cancellation error and the positive part, both scaled by
/// the largest term.
fn dissipation_residual(d: &super::DissipationTerms) -> f64 {
    let total = d.total();
    let scale = d.scale();
    scaled_residual(total - d.heat, scale).max(scaled_residual(total.max(0.0), scale))
}

pub fn check_dissipation_spatial<M: Constitutive>(m: &M, samples: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let name = "dissipation_spatial";
    let mut r = rng(sub_seed(seed, name));
    let inputs: Vec<_> = (0..samples)
        .map(|_| (random_state(&mut r, m.theta0()), random_rates(&mut r)))
        .collect();
    sweep(name, tol, &inputs, |(s, _)| s, |(s, rates)| {
        Ok(dissipation_residual(&dissipation_terms_spatial(m, s, rates)?))
    })
}

pub fn check_dissipation_referential<M: Constitutive>(
    m: &M,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CheckReport> {
    let name = "dissipation_referential";
    let mut r = rng(sub_seed(seed, name));
    let inputs: Vec<_> = (0..samples)
        .map(|_| (random_state(&mut r, m.theta0()), random_referential_rates(&mut r)))
        .collect();
    sweep(name, tol, &inputs, |(s, _)| s, |(s, rates)| {
        Ok(dissipation_residual(&dissipation_terms_referential(m, &s.to_referential(), rates)?))
    })
}

/// `|ψ̄(…, g + δ) − ψ̄(…, g)|` and its referential analogue; any nonzero
/// difference fails.
pub fn check_gradient_independence<M: Constitutive>(m: &M, samples: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let name = "gradient_independence";
    let mut r = rng(sub_seed(seed, name));
    let inputs: Vec<_> = (0..samples)
        .map(|_| (random_state(&mut r, m.theta0()), uniform_vec(&mut r, -1.0, 1.0)))
        .collect();
    sweep(name, tol, &inputs, |(s, _)| s, |(s, delta)| {
        let shifted = MaterialState { g: s.g + *delta, ..*s };
        let spatial = (m.free_energy(&shifted)? - m.free_energy(s)?).abs();
        let rs = s.to_referential();
        let rshift = ReferentialState { g_ref: rs.g_ref + *delta, ..rs };
        let referential = (m.free_energy_referential(&rshift)? - m.free_energy_referential(&rs)?).abs();
        Ok(spatial.max(referential))
    })
}

/// `τ − τᵀ = Eᴹ⊗P − P⊗Eᴹ`.
pub fn check_antisymmetric_stress<M: Constitutive>(m: &M, samples: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let name = "antisymmetric_stress";
    let inputs = states(seed, name, samples, m.theta0());
    sweep(name, tol, &inputs, |s| s, |s| {
        let tau = m.cauchy_stress(s)?;
        let p = m.polarization_per_mass(s)?.scale(m.rho_r() / s.jacobian());
        let expected = (s.em.outer(&p) - p.outer(&s.em)).scale(0.5);
        Ok(rel_m(&tau.antisymmetric_part(), &expected))
    })
}

/// Superposed rigid rotation `(F, Eᴹ, g) → (QF, QEᴹ, Qg)`: ψ unchanged,
/// `τ → QτQᵀ`, `π → Qπ`.
pub fn check_objectivity<M: Constitutive>(m: &M, samples: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let name = "objectivity";
    let mut r = rng(sub_seed(seed, name));
    let inputs: Vec<_> = (0..samples)
        .map(|_| (random_state(&mut r, m.theta0()), random_rotation(&mut r)))
        .collect();
    sweep(name, tol, &inputs, |(s, _)| s, |(s, q)| {
        let rotated = MaterialState {
            f: q.matmul(&s.f),
            theta: s.theta,
            em: q.mul_vec(&s.em),
            g: q.mul_vec(&s.g),
        };
        let psi = rel_s(m.free_energy(&rotated)?, m.free_energy(s)?);
        let tau = rel_m(
            &m.cauchy_stress(&rotated)?,
            &q.matmul(&m.cauchy_stress(s)?).matmul(&q.transpose()),
        );
        let pi = rel_v(&m.polarization_per_mass(&rotated)?, &q.mul_vec(&m.polarization_per_mass(s)?));
        Ok(psi.max(tau).max(pi))
    })
}

/// Heat flux at `g = 0`, spatial and referential; must vanish exactly.
pub fn check_static_heat_flux<M: Constitutive>(m: &M, samples: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let name = "static_heat_flux";
    let inputs: Vec<_> = states(seed, name, samples, m.theta0())
        .into_iter()
        .map(|s| MaterialState { g: Vec3::zeros(), ..s })
        .collect();
    sweep(name, tol, &inputs, |s| s, |s| {
        let q = m.heat_flux(s)?;
        let q_ref = m.referential_heat_flux(&s.to_referential())?;
        Ok(q.max_abs().max(q_ref.max_abs()))
    })
}

/// Positive parts of `q·g` and `Q·G`, scaled by `|q||g|` and `|Q||G|`.
pub fn check_fourier_inequality<M: Constitutive>(m: &M, samples: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let name = "fourier_inequality";
    let inputs = states(seed, name, samples, m.theta0());
    sweep(name, tol, &inputs, |s| s, |s| {
        let q = m.heat_flux(s)?;
        let r = s.to_referential();
        let q_ref = m.referential_heat_flux(&r)?;
        let spatial = scaled_residual(q.dot(&s.g).max(0.0), q.norm() * s.g.norm());
        let referential = scaled_residual(q_ref.dot(&r.g_ref).max(0.0), q_ref.norm() * r.g_ref.norm());
        Ok(spatial.max(referential))
    })
}

/// `Q·G = J q·g`, `W·Π = Eᴹ·π` and `J F⁻¹ D = J F⁻¹ Eᴹ + 4π ℙ`.
pub fn check_transform_identities<M: Constitutive>(m: &M, samples: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let name = "transform_identities";
    let inputs = states(seed, name, samples, m.theta0());
    sweep(name, tol, &inputs, |s| s, |s| {
        let j = s.jacobian();
        let r = s.to_referential();
        let q = m.heat_flux(s)?;
        let q_ref = m.referential_heat_flux(&r)?;
        let heat = rel_s(q_ref.dot(&r.g_ref), j * q.dot(&s.g));
        let pi = m.polarization_per_mass(s)?;
        let pi_ref = m.referential_polarization_per_mass(&r)?;
        let work = rel_s(r.w.dot(&pi_ref), s.em.dot(&pi));
        let p = pi.scale(m.rho_r() / j);
        let displacement = rel_v(
            &piola_vector(&s.f, &electric_displacement(&s.em, &p))?,
            &referential_displacement(&s.f, &s.em, &p)?,
        );
        Ok(heat.max(work).max(displacement))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{Fault, FourierHeatModel, Material, ModelParameters, QuadraticCoupledModel};

    fn material(fault: Option<Fault>) -> Material {
        let mut p = ModelParameters::elastic(1.4, 0.9, 1.2, 1.0, 1.3);
        p.beta = 0.15;
        p.chi = [[0.5, 0.1, 0.0], [0.1, 0.4, 0.05], [0.0, 0.05, 0.3]];
        p.pyro = [0.1, -0.1, 0.05];
        p.piezo[0][0][0] = 0.2;
        p.piezo[1][1][2] = 0.1;
        p.piezo[1][2][1] = 0.1;
        let heat = FourierHeatModel::new([[1.0, 0.2, 0.0], [0.2, 0.8, 0.0], [0.0, 0.0, 0.5]], Default::default()).unwrap();
        Material::new(QuadraticCoupledModel::new(p).unwrap(), heat).with_fault(fault)
    }

    #[test]
    fn compliant_model_passes_every_state_check() {
        let m = material(None);
        let reports = [
            check_restrictions_spatial(&m, 200, 1, 1e-5).unwrap(),
            check_referential_restrictions(&m, 200, 1, 1e-5).unwrap(),
            check_dissipation_spatial(&m, 200, 1, 1e-10).unwrap(),
            check_dissipation_referential(&m, 200, 1, 1e-10).unwrap(),
            check_gradient_independence(&m, 200, 1, 0.0).unwrap(),
            check_antisymmetric_stress(&m, 200, 1, 1e-12).unwrap(),
            check_objectivity(&m, 200, 1, 1e-12).unwrap(),
            check_static_heat_flux(&m, 200, 1, 0.0).unwrap(),
            check_fourier_inequality(&m, 200, 1, 1e-12).unwrap(),
            check_transform_identities(&m, 200, 1, 1e-12).unwrap(),
        ];
        for r in reports {
            assert!(r.pass, "{}", r.summary());
            assert_eq!(r.samples, 200);
        }
    }

    #[test]
    fn entropy_flip_caught_by_restrictions() {
        let r = check_restrictions_spatial(&material(Some(Fault::EntropySignFlip)), 50, 2, 1e-5).unwrap();
        assert!(!r.pass);
        assert!(r.worst_input.is_some());
    }

    #[test]
    fn missing_polarization_stress_caught() {
        let m = material(Some(Fault::MissingPolarizationStress));
        assert!(!check_antisymmetric_stress(&m, 50, 2, 1e-12).unwrap().pass);
        assert!(!check_restrictions_spatial(&m, 50, 2, 1e-5).unwrap().pass);
        assert!(!check_dissipation_spatial(&m, 50, 2, 1e-10).unwrap().pass);
    }

    #[test]
    fn gradient_dependence_caught() {
        let m = material(Some(Fault::GradientDependentPsi));
        assert!(!check_gradient_independence(&m, 50, 2, 0.0).unwrap().pass);
    }

    #[test]
    fn non_psd_conductivity_caught() {
        let m = material(Some(Fault::NonPsdConductivity));
        assert!(!check_fourier_inequality(&m, 50, 2, 1e-12).unwrap().pass);
        assert!(!check_dissipation_spatial(&m, 50, 2, 1e-10).unwrap().pass);
    }

    #[test]
    fn pure_elastic_model_has_no_polarization() {
        let m = Material::new(
            QuadraticCoupledModel::new(ModelParameters::elastic(1.0, 1.0, 1.0, 1.0, 1.0)).unwrap(),
            FourierHeatModel::isotropic(1.0).unwrap(),
        );
        assert!(check_restrictions_spatial(&m, 50, 4, 1e-5).unwrap().pass);
        let s = random_state(&mut rng(4), 1.0);
        assert_eq!(m.polarization_per_mass(&s).unwrap(), Vec3::zeros());
        assert!(m.cauchy_stress(&s).unwrap().antisymmetric_part().max_abs() < 1e-15);
    }

    #[test]
    fn checks_are_deterministic() {
        let m = material(None);
        assert_eq!(
            check_objectivity(&m, 100, 9, 1e-12).unwrap(),
            check_objectivity(&m, 100, 9, 1e-12).unwrap()
        );
    }
}
