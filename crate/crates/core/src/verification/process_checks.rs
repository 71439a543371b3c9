//! Checks along affine processes.

use super::dissipation::{dissipation_terms_referential, dissipation_terms_spatial};
use super::{relative_residual, scaled_residual, CheckReport, Tracker, WorstInput};
use crate::constitutive::Constitutive;
use crate::error::Result;
use crate::kinematics::{stress_power, velocity_gradient, MaterialState};
use crate::process::{run_process, AffineProcess, ProcessSample};
use crate::tensor::{Dual, Vec3};

use super::NamedProcess;

/// A named process together with its evaluated samples.
#[derive(Clone, Debug)]
pub struct ProcessRun {
    pub name: String,
    pub process: AffineProcess,
    pub samples: Vec<ProcessSample>,
}

impl ProcessRun {
    pub fn new<M: Constitutive>(m: &M, p: &NamedProcess) -> Result<Self> {
        p.process.check_times(&p.times)?;
        Ok(ProcessRun {
            name: p.name.clone(),
            process: p.process.clone(),
            samples: run_process(&p.process, m, &p.points, &p.times)?,
        })
    }

    fn input(&self, s: &ProcessSample) -> WorstInput {
        WorstInput::from_state(&s.state).at(&self.name, s.t, &s.x)
    }
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// `δ₀ = θη̇ − r + (div q)/ρ` and the largest of its three terms.
pub fn internal_dissipation(s: &ProcessSample) -> (f64, f64) {
    let terms = [s.state.theta * s.terms.eta_dot, -s.r, s.terms.div_q / s.terms.rho];
    (terms[0] + terms[1] + terms[2], max_abs(&terms))
}

/// `ρη̇ − ρr/θ + (div q)/θ` and the largest of its three terms.
pub fn entropy_equality_residual(s: &ProcessSample) -> (f64, f64) {
    let th = s.state.theta;
    let rho = s.terms.rho;
    let terms = [rho * s.terms.eta_dot, -rho * s.r / th, s.terms.div_q / th];
    (terms[0] + terms[1] + terms[2], max_abs(&terms))
}

fn fold_samples(
    name: &str,
    tol: f64,
    runs: &[ProcessRun],
    mut residual: impl FnMut(&ProcessRun, &ProcessSample) -> Result<f64>,
) -> Result<CheckReport> {
    let mut tracker = Tracker::new(name, tol);
    for run in runs {
        for s in &run.samples {
            tracker.observe(residual(run, s)?, || run.input(s));
        }
    }
    Ok(tracker.finish(None))
}

/// Largest `|δ₀|` scaled by its term magnitudes.
pub fn check_internal_dissipation(runs: &[ProcessRun], tol: f64) -> Result<CheckReport> {
    fold_samples("internal_dissipation", tol, runs, |_, s| {
        let (d, scale) = internal_dissipation(s);
        Ok(scaled_residual(d, scale))
    })
}

pub fn check_entropy_equality(runs: &[ProcessRun], tol: f64) -> Result<CheckReport> {
    fold_samples("entropy_equality", tol, runs, |_, s| {
        let (e, scale) = entropy_equality_residual(s);
        Ok(scaled_residual(e, scale))
    })
}

/// `δ₀ρ/θ` against the entropy-equality residual.
pub fn check_entropy_identity(runs: &[ProcessRun], tol: f64) -> Result<CheckReport> {
    fold_samples("entropy_identity", tol, runs, |_, s| {
        let (d, d_scale) = internal_dissipation(s);
        let (e, e_scale) = entropy_equality_residual(s);
        let lhs = d * s.terms.rho / s.state.theta;
        let scale = e_scale.max(d_scale * s.terms.rho / s.state.theta);
        Ok(scaled_residual(lhs - e, scale))
    })
}

/// Scaled residuals of the momentum and energy balances with the sample's
/// back-solved `b` and `r` reinserted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BalanceResiduals {
    pub momentum: f64,
    pub energy: f64,
}

/// Recomputes every balance ingredient by a route independent of the
/// harness: spatial divergences by forward-mode derivatives along `θ(x)`,
/// `ε̇` and `π̇` by a five-point time stencil.
pub fn balance_residuals<M: Constitutive>(
    m: &M,
    process: &AffineProcess,
    s: &ProcessSample,
) -> Result<BalanceResiduals> {
    let state = &s.state;
    let rho = m.rho_r() / state.jacobian();
    let mut div_tau = Vec3::zeros();
    let mut div_q = 0.0;
    for i in 0..3 {
        let probe = MaterialState {
            f: state.f.lift(),
            theta: Dual::new(state.theta, state.g[i]),
            em: state.em.lift(),
            g: state.g.lift(),
        };
        let d_tau = m.cauchy_stress(&probe)?.derivs();
        for j in 0..3 {
            div_tau[j] += d_tau[(i, j)];
        }
        div_q += m.heat_flux(&probe)?.derivs()[i];
    }

    let h = 1e-3 * s.t.abs().max(1.0);
    let mut eps = [0.0; 4];
    let mut pi = [Vec3::zeros(); 4];
    for (k, off) in [-2.0, -1.0, 1.0, 2.0].into_iter().enumerate() {
        let r = m.response(&process.state_unchecked(&s.x, s.t + off * h)?)?;
        eps[k] = r.eps;
        pi[k] = r.pi;
    }
    let eps_dot = (eps[0] - 8.0 * eps[1] + 8.0 * eps[2] - eps[3]) / (12.0 * h);
    let pi_dot = (pi[0] - pi[1].scale(8.0) + pi[2].scale(8.0) - pi[3]).scale(1.0 / (12.0 * h));

    let tau = m.cauchy_stress(state)?;
    let power = stress_power(&tau, &state.f, &s.rates.f_dot)?;
    let inertia = s.terms.acceleration.scale(rho);
    let body = s.b.scale(rho);
    let momentum = inertia - div_tau - body;
    let momentum_scale = inertia.max_abs().max(div_tau.max_abs()).max(body.max_abs());

    let energy_terms = [rho * eps_dot, -power, div_q, -rho * state.em.dot(&pi_dot), -rho * s.r];
    let energy: f64 = energy_terms.iter().sum();
    Ok(BalanceResiduals {
        momentum: scaled_residual(momentum.max_abs(), momentum_scale),
        energy: scaled_residual(energy, max_abs(&energy_terms)),
    })
}

pub fn check_balance_closure<M: Constitutive>(m: &M, runs: &[ProcessRun], tol: f64) -> Result<CheckReport> {
    fold_samples("balance_closure", tol, runs, |run, s| {
        let b = balance_residuals(m, &run.process, s)?;
        Ok(b.momentum.max(b.energy))
    })
}

/// `Eᴹ·ρπ̇ = Eᴹ·(Ṗ + P div v)`.
pub fn check_continuity_identity(runs: &[ProcessRun], tol: f64) -> Result<CheckReport> {
    fold_samples("continuity_identity", tol, runs, |_, s| {
        let l = velocity_gradient(&s.state.f, &s.rates.f_dot)?;
        let em = &s.state.em;
        let lhs = s.terms.rho * em.dot(&s.terms.pi_dot);
        let p_dot = em.dot(&s.terms.p_dot);
        let convective = em.dot(&s.response.p) * l.trace();
        let scale = lhs.abs().max(p_dot.abs()).max(convective.abs());
        Ok(scaled_residual(lhs - p_dot - convective, scale))
    })
}

/// Velocity gradients whose spin is below this (relative to `|∇v|`) count
/// as spin-free for the stress-power comparison.
const SPIN_FREE_REL: f64 = 1e-12;

/// Spatial ↔ referential consistency along processes, as four reports:
/// `W·Π = Eᴹ·π`, `F Q = J q`, `J·D_spatial = D_referential`, and the two
/// stress-power pairings `ddot(JτF⁻ᵀ, Ḟ)` vs `J τ·∇v` on spin-free samples.
pub fn check_cross_description<M: Constitutive>(
    m: &M,
    runs: &[ProcessRun],
    tol: [f64; 4],
) -> Result<Vec<CheckReport>> {
    let mut work = Tracker::new("cross_description/polarization_work", tol[0]);
    let mut heat = Tracker::new("cross_description/heat_flux_transform", tol[1]);
    let mut flux = Tracker::new("cross_description/flux_term", tol[2]);
    let mut power = Tracker::new("cross_description/stress_power", tol[3]);
    let mut skipped = 0usize;
    let mut max_spin_gap = 0.0_f64;

    for run in runs {
        for s in &run.samples {
            let st = &s.state;
            let r = &s.response;
            let j = st.jacobian();
            let w = st.f.tr_mul_vec(&st.em);
            let (a, b) = (w.dot(&r.pi_ref), st.em.dot(&r.pi));
            work.observe(relative_residual((a - b).abs(), a.abs(), b.abs()), || run.input(s));

            let (fq, jq) = (st.f.mul_vec(&r.q_ref), r.q.scale(j));
            heat.observe(relative_residual((fq - jq).max_abs(), fq.max_abs(), jq.max_abs()), || run.input(s));

            let ds = j * dissipation_terms_spatial(m, st, &s.rates)?.total();
            let dr = dissipation_terms_referential(m, &st.to_referential(), &s.rates.to_referential(st))?.total();
            flux.observe(relative_residual((ds - dr).abs(), ds.abs(), dr.abs()), || run.input(s));

            let l = velocity_gradient(&st.f, &s.rates.f_dot)?;
            let nominal = r.tau.matmul(&st.f.inverse()?.transpose()).scale(j);
            let (pa, pb) = (nominal.ddot(&s.rates.f_dot), j * s.terms.stress_power);
            let gap = relative_residual((pa - pb).abs(), pa.abs(), pb.abs());
            if l.antisymmetric_part().max_abs() <= SPIN_FREE_REL * l.max_abs().max(1.0) {
                power.observe(gap, || run.input(s));
            } else {
                skipped += 1;
                max_spin_gap = max_spin_gap.max(gap);
            }
        }
    }

    let power_note = (skipped > 0).then(|| {
        format!("{skipped} samples with spin skipped; largest pairing discrepancy there {max_spin_gap:.3e}")
    });
    Ok(vec![
        work.finish(None),
        heat.finish(None),
        flux.finish(None),
        power.finish(power_note),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{Fault, FourierHeatModel, Material, ModelParameters, QuadraticCoupledModel};
    use crate::process::{time_grid, Horizon, MatPath, ScalarPath};
    use crate::tensor::Mat3;

    fn material(fault: Option<Fault>) -> Material {
        let mut p = ModelParameters::elastic(1.2, 0.8, 1.5, 1.0, 2.0);
        p.beta = 0.1;
        p.chi = [[0.3, 0.05, 0.0], [0.05, 0.2, 0.0], [0.0, 0.0, 0.25]];
        p.pyro = [0.05, -0.02, 0.03];
        p.piezo[0][0][0] = 0.1;
        p.piezo[2][2][2] = -0.06;
        Material::new(QuadraticCoupledModel::new(p).unwrap(), FourierHeatModel::isotropic(0.7).unwrap()).with_fault(fault)
    }

    fn coupled() -> NamedProcess {
        let a0 = Mat3([[1.05, 0.1, 0.0], [-0.05, 0.95, 0.02], [0.0, 0.03, 1.1]]);
        let a1 = Mat3([[0.1, -0.2, 0.05], [0.15, 0.0, 0.1], [-0.05, 0.1, -0.1]]);
        NamedProcess {
            name: "coupled".into(),
            process: AffineProcess {
                deformation: MatPath::linear(&a0, &a1),
                alpha: ScalarPath::Trig { mean: 1.1, sin: 0.1, cos: 0.0, omega: 2.0 },
                temp_gradient: [ScalarPath::linear(0.1, 0.2), ScalarPath::Constant(-0.05), ScalarPath::Constant(0.1)],
                potential_gradient: [ScalarPath::linear(0.3, -0.4), ScalarPath::Constant(0.2), ScalarPath::Constant(0.1)],
                beta: ScalarPath::Constant(0.0),
                anchor: Vec3::zeros(),
                horizon: Horizon { start: 0.0, end: 1.0 },
            },
            points: vec![Vec3::zeros(), Vec3::new(0.3, -0.2, 0.4), Vec3::new(-0.5, 0.1, 0.2)],
            times: time_grid(0.0, 1.0, 4),
        }
    }

    fn rest() -> NamedProcess {
        NamedProcess {
            name: "rest".into(),
            process: AffineProcess::rest(1.0, Horizon { start: 0.0, end: 1.0 }),
            points: vec![Vec3::new(0.2, 0.2, 0.2)],
            times: time_grid(0.0, 1.0, 3),
        }
    }

    #[test]
    fn compliant_process_checks_pass() {
        let m = material(None);
        let runs = [ProcessRun::new(&m, &coupled()).unwrap()];
        for r in [
            check_internal_dissipation(&runs, 1e-7).unwrap(),
            check_entropy_equality(&runs, 1e-7).unwrap(),
            check_entropy_identity(&runs, 1e-12).unwrap(),
            check_balance_closure(&m, &runs, 1e-8).unwrap(),
            check_continuity_identity(&runs, 1e-8).unwrap(),
        ] {
            assert!(r.pass, "{}", r.summary());
            assert_eq!(r.samples, 12);
        }
        let cross = check_cross_description(&m, &runs, [1e-12, 1e-12, 1e-10, 1e-10]).unwrap();
        for r in &cross[..3] {
            assert!(r.pass, "{}", r.summary());
        }
        assert!(cross[3].notes.as_deref().unwrap().contains("skipped"));
    }

    #[test]
    fn static_process_has_zero_internal_dissipation() {
        let m = material(None);
        let run = ProcessRun::new(&m, &rest()).unwrap();
        for s in &run.samples {
            assert_eq!(internal_dissipation(s).0, 0.0);
            assert_eq!(entropy_equality_residual(s).0, 0.0);
        }
        let cross = check_cross_description(&m, &[run], [0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(cross.iter().all(|r| r.pass));
    }

    #[test]
    fn missing_polarization_stress_gives_internal_dissipation() {
        let m = material(Some(Fault::MissingPolarizationStress));
        let runs = [ProcessRun::new(&m, &coupled()).unwrap()];
        assert!(!check_internal_dissipation(&runs, 1e-7).unwrap().pass);
    }

    #[test]
    fn entropy_flip_breaks_entropy_equality() {
        let m = material(Some(Fault::EntropySignFlip));
        let runs = [ProcessRun::new(&m, &coupled()).unwrap()];
        assert!(!check_entropy_equality(&runs, 1e-7).unwrap().pass);
    }
}
