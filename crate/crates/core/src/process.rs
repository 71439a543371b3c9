//! Affine electro-thermodynamic processes and balance-law back-solves.
//!
//! A process is `x = Y + A(t)(X − Y)`, `θ = α(t) + (Aᵀa)·(X − Y)` and
//! `φ = β(t) + (Aᵀb)·(X − Y)`. Along it `F = A`, `g = a` and `Eᴹ = −b`
//! uniformly in space; body force and radiant heating are whatever the
//! momentum and energy balances require.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constitutive::{Constitutive, ResponseSet};
use crate::error::{Error, Result};
use crate::kinematics::{stress_power, MaterialState, SpatialRates, DEFAULT_SPATIAL_STEP_REL};
use crate::tensor::{Mat3, Vec3};

/// Temperatures at or below this are rejected rather than clamped.
pub const THETA_MIN: f64 = 1e-6;

/// A scalar function of time with analytic first and second derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ScalarPath {
    Constant(f64),
    /// `c₀ + c₁t + c₂t² + c₃t³`.
    Cubic { cubic: [f64; 4] },
    /// `mean + sin·sin(ωt) + cos·cos(ωt)`.
    Trig {
        mean: f64,
        #[serde(default)]
        sin: f64,
        #[serde(default)]
        cos: f64,
        omega: f64,
    },
}

impl ScalarPath {
    pub fn linear(c0: f64, c1: f64) -> Self {
        ScalarPath::Cubic { cubic: [c0, c1, 0.0, 0.0] }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            ScalarPath::Constant(c) => c,
            ScalarPath::Cubic { cubic: [c0, c1, c2, c3] } => c0 + t * (c1 + t * (c2 + t * c3)),
            ScalarPath::Trig { mean, sin, cos, omega } => {
                let (s, c) = (omega * t).sin_cos();
                mean + sin * s + cos * c
            }
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match *self {
            ScalarPath::Constant(_) => 0.0,
            ScalarPath::Cubic { cubic: [_, c1, c2, c3] } => c1 + t * (2.0 * c2 + t * 3.0 * c3),
            ScalarPath::Trig { sin, cos, omega, .. } => {
                let (s, c) = (omega * t).sin_cos();
                omega * (sin * c - cos * s)
            }
        }
    }

    pub fn accel(&self, t: f64) -> f64 {
        match *self {
            ScalarPath::Constant(_) => 0.0,
            ScalarPath::Cubic { cubic: [_, _, c2, c3] } => 2.0 * c2 + 6.0 * c3 * t,
            ScalarPath::Trig { sin, cos, omega, .. } => {
                let (s, c) = (omega * t).sin_cos();
                -omega * omega * (sin * s + cos * c)
            }
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            ScalarPath::Constant(c) => c.is_finite(),
            ScalarPath::Cubic { cubic } => cubic.iter().all(|c| c.is_finite()),
            ScalarPath::Trig { mean, sin, cos, omega } => [mean, sin, cos, omega].iter().all(|c| c.is_finite()),
        }
    }
}

impl Default for ScalarPath {
    fn default() -> Self {
        ScalarPath::Constant(0.0)
    }
}

impl From<f64> for ScalarPath {
    fn from(c: f64) -> Self {
        ScalarPath::Constant(c)
    }
}

/// Componentwise vector path.
pub type VecPath = [ScalarPath; 3];

fn vec_eval(p: &VecPath, f: impl Fn(&ScalarPath) -> f64) -> Vec3 {
    Vec3::new(f(&p[0]), f(&p[1]), f(&p[2]))
}

/// Time path of the affine deformation `A(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum MatPath {
    /// Nine component paths in row-major order.
    Components([ScalarPath; 9]),
    /// Rigid rotation by angle `ωt + phase` about `axis`, optionally after a
    /// constant `stretch`: `A = Q(t) U`.
    Rotation {
        axis: [f64; 3],
        omega: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default = "identity_rows")]
        stretch: [[f64; 3]; 3],
    },
}

fn identity_rows() -> [[f64; 3]; 3] {
    Mat3::<f64>::identity().to_array()
}

impl MatPath {
    pub fn identity() -> Self {
        let mut c = [ScalarPath::Constant(0.0); 9];
        for i in 0..3 {
            c[4 * i] = ScalarPath::Constant(1.0);
        }
        MatPath::Components(c)
    }

    /// `A(t) = A₀ + t A₁`.
    pub fn linear(a0: &Mat3, a1: &Mat3) -> Self {
        let (a0, a1) = (a0.to_flat(), a1.to_flat());
        MatPath::Components(std::array::from_fn(|k| ScalarPath::linear(a0[k], a1[k])))
    }

    /// Value, first and second time derivative.
    pub fn eval(&self, t: f64) -> [Mat3; 3] {
        match self {
            MatPath::Components(c) => [
                Mat3::from_fn(|i, j| c[3 * i + j].value(t)),
                Mat3::from_fn(|i, j| c[3 * i + j].rate(t)),
                Mat3::from_fn(|i, j| c[3 * i + j].accel(t)),
            ],
            MatPath::Rotation { axis, omega, phase, stretch } => {
                let n = Vec3(*axis).scale(1.0 / Vec3(*axis).norm());
                let k = Mat3([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]]);
                let k2 = k.matmul(&k);
                let (s, c) = (omega * t + phase).sin_cos();
                let u = Mat3(*stretch);
                let q = Mat3::identity() + k.scale(s) + k2.scale(1.0 - c);
                let q_dot = (k.scale(c) + k2.scale(s)).scale(*omega);
                let q_ddot = (k2.scale(c) - k.scale(s)).scale(omega * omega);
                [q.matmul(&u), q_dot.matmul(&u), q_ddot.matmul(&u)]
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            MatPath::Components(c) => {
                if !c.iter().all(|p| p.is_finite()) {
                    return Err(Error::param("deformation", "coefficients must be finite"));
                }
            }
            MatPath::Rotation { axis, omega, phase, stretch } => {
                let n = Vec3(*axis).norm();
                if !(n > 0.0) || !n.is_finite() {
                    return Err(Error::param("deformation", "rotation axis must be a non-zero finite vector"));
                }
                if !omega.is_finite() || !phase.is_finite() || !Mat3(*stretch).is_finite() {
                    return Err(Error::param("deformation", "rotation parameters must be finite"));
                }
                if !(Mat3(*stretch).det() > 0.0) {
                    return Err(Error::param("deformation", "stretch must have positive determinant"));
                }
            }
        }
        Ok(())
    }
}

/// Closed time interval on which a process may be evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    pub start: f64,
    pub end: f64,
}

impl Horizon {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}

/// The affine process family, with `Y` the anchor material point.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineProcess {
    /// `A(t)`.
    pub deformation: MatPath,
    /// `α(t)`, the temperature at `Y`.
    pub alpha: ScalarPath,
    /// `a(t)`, the spatial temperature gradient.
    pub temp_gradient: VecPath,
    /// `b(t)`, the spatial gradient of the electric potential.
    pub potential_gradient: VecPath,
    /// `β(t)`, the potential at `Y`. Only gradients enter the constitutive
    /// state, so β never affects responses.
    pub beta: ScalarPath,
    pub anchor: Vec3,
    pub horizon: Horizon,
}

/// Temporal and spatial derivatives of the motion at one material point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Motion {
    pub position: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
}

impl AffineProcess {
    /// Homogeneous rest state at temperature `theta` over `horizon`.
    pub fn rest(theta: f64, horizon: Horizon) -> Self {
        AffineProcess {
            deformation: MatPath::identity(),
            alpha: ScalarPath::Constant(theta),
            temp_gradient: Default::default(),
            potential_gradient: Default::default(),
            beta: ScalarPath::Constant(0.0),
            anchor: Vec3::zeros(),
            horizon,
        }
    }

    /// Rigid rotation about `axis` at angular speed `omega`, uniform
    /// temperature and no electric field.
    pub fn rigid_rotation(axis: [f64; 3], omega: f64, theta: f64, horizon: Horizon) -> Self {
        AffineProcess {
            deformation: MatPath::Rotation {
                axis,
                omega,
                phase: 0.0,
                stretch: identity_rows(),
            },
            ..Self::rest(theta, horizon)
        }
    }

    /// Rejects non-finite coefficients and an empty or reversed horizon.
    pub fn validate(&self) -> Result<()> {
        self.deformation.validate()?;
        let scalars = [&self.alpha, &self.beta]
            .into_iter()
            .chain(self.temp_gradient.iter())
            .chain(self.potential_gradient.iter());
        for p in scalars {
            if !p.is_finite() {
                return Err(Error::param("process", "path coefficients must be finite"));
            }
        }
        if !self.anchor.is_finite() {
            return Err(Error::param("anchor", "must be finite"));
        }
        let Horizon { start, end } = self.horizon;
        if !(start.is_finite() && end.is_finite() && start <= end) {
            return Err(Error::param("times", "horizon must satisfy start <= end"));
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !self.horizon.contains(t) {
            return Err(Error::OutsideHorizon {
                t,
                start: self.horizon.start,
                end: self.horizon.end,
            });
        }
        Ok(())
    }

    /// Constitutive state at material point `x` and time `t`.
    pub fn state_at(&self, x: &Vec3, t: f64) -> Result<MaterialState> {
        self.check_time(t)?;
        self.state_unchecked(x, t)
    }

    /// As [`state_at`](Self::state_at) without the horizon check, for
    /// difference stencils that straddle the ends of the horizon.
    pub(crate) fn state_unchecked(&self, x: &Vec3, t: f64) -> Result<MaterialState> {
        let [a, _, _] = self.deformation.eval(t);
        let j = a.det();
        if !(j > 0.0) {
            return Err(Error::NonPositiveJacobian(j));
        }
        let grad = vec_eval(&self.temp_gradient, |p| p.value(t));
        let theta = self.alpha.value(t) + a.tr_mul_vec(&grad).dot(&(*x - self.anchor));
        if !(theta > THETA_MIN) {
            return Err(Error::NonPositiveTemperature {
                theta,
                x: x.to_array(),
                t,
                floor: THETA_MIN,
            });
        }
        MaterialState::new(a, theta, -vec_eval(&self.potential_gradient, |p| p.value(t)), grad)
    }

    /// Material time derivatives `(Ḟ, θ̇, Ėᴹ, ġ)` at `(x, t)`.
    pub fn rates_at(&self, x: &Vec3, t: f64) -> Result<SpatialRates> {
        self.state_at(x, t)?;
        Ok(self.rates_unchecked(x, t))
    }

    pub(crate) fn rates_unchecked(&self, x: &Vec3, t: f64) -> SpatialRates {
        let [a, a_dot, _] = self.deformation.eval(t);
        let grad = vec_eval(&self.temp_gradient, |p| p.value(t));
        let grad_dot = vec_eval(&self.temp_gradient, |p| p.rate(t));
        let dx = *x - self.anchor;
        SpatialRates {
            f_dot: a_dot,
            theta_dot: self.alpha.rate(t) + (a_dot.tr_mul_vec(&grad) + a.tr_mul_vec(&grad_dot)).dot(&dx),
            em_dot: -vec_eval(&self.potential_gradient, |p| p.rate(t)),
            g_dot: grad_dot,
        }
    }

    /// Position, velocity and acceleration of material point `x`.
    pub fn motion(&self, x: &Vec3, t: f64) -> Result<Motion> {
        self.check_time(t)?;
        let [a, a_dot, a_ddot] = self.deformation.eval(t);
        let dx = *x - self.anchor;
        Ok(Motion {
            position: self.anchor + a.mul_vec(&dx),
            velocity: a_dot.mul_vec(&dx),
            acceleration: a_ddot.mul_vec(&dx),
        })
    }

    /// Material point occupying spatial position `pos` at time `t`.
    pub fn material_point(&self, pos: &Vec3, t: f64) -> Result<Vec3> {
        let [a, _, _] = self.deformation.eval(t);
        Ok(self.anchor + a.inverse()?.mul_vec(&(*pos - self.anchor)))
    }

    /// Every sampled time must keep `det A > 0` and `α > θ_min`.
    pub fn check_times(&self, times: &[f64]) -> Result<()> {
        for &t in times {
            self.check_time(t)?;
            self.state_unchecked(&self.anchor, t)?;
        }
        Ok(())
    }
}

/// Divergence `(div T)_j = Σ_i ∂T_ij/∂x_i` of a tensor field by central
/// differences.
pub fn spatial_divergence_fd_mat(
    field: impl Fn(&Vec3) -> Result<Mat3>,
    x: &Vec3,
    h: f64,
) -> Result<Vec3> {
    let mut div = Vec3::zeros();
    for i in 0..3 {
        let mut xp = *x;
        let mut xm = *x;
        xp[i] += h;
        xm[i] -= h;
        let (tp, tm) = (field(&xp)?, field(&xm)?);
        for j in 0..3 {
            div[j] += (tp[(i, j)] - tm[(i, j)]) / (2.0 * h);
        }
    }
    Ok(div)
}

/// Spatial difference step at position `pos`.
fn spatial_step(pos: &Vec3, anchor: &Vec3) -> f64 {
    DEFAULT_SPATIAL_STEP_REL * (*pos - *anchor).norm().max(1.0)
}

/// Ingredients of the balance laws at one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BalanceTerms {
    pub rho: f64,
    /// `v̇ = Ä(X − Y)`.
    pub acceleration: Vec3,
    pub div_tau: Vec3,
    pub div_q: f64,
    /// `τ·∇v`.
    pub stress_power: f64,
    pub psi_dot: f64,
    pub eta_dot: f64,
    pub eps_dot: f64,
    pub pi_dot: Vec3,
    /// Rate of `P = ρπ`.
    pub p_dot: Vec3,
}

/// Everything known at one `(t, X)` along a process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessSample {
    pub t: f64,
    pub x: Vec3,
    pub state: MaterialState,
    pub rates: SpatialRates,
    pub response: ResponseSet,
    pub terms: BalanceTerms,
    /// Body force per unit mass.
    pub b: Vec3,
    /// Radiant heating per unit mass.
    pub r: f64,
}

fn div_tau<M: Constitutive>(proc: &AffineProcess, material: &M, pos: &Vec3, t: f64) -> Result<Vec3> {
    let h = spatial_step(pos, &proc.anchor);
    spatial_divergence_fd_mat(
        |p| material.cauchy_stress(&proc.state_unchecked(&proc.material_point(p, t)?, t)?),
        pos,
        h,
    )
}

fn div_q<M: Constitutive>(proc: &AffineProcess, material: &M, pos: &Vec3, t: f64) -> Result<f64> {
    let h = spatial_step(pos, &proc.anchor);
    crate::kinematics::spatial_divergence_fd(
        |p| material.heat_flux(&proc.state_unchecked(&proc.material_point(p, t)?, t)?),
        pos,
        h,
    )
}

/// `b = v̇ − (div τ)/ρ`; the `P·∇Eᴹ` term vanishes because `Eᴹ` is uniform.
pub fn body_force_from_momentum<M: Constitutive>(
    proc: &AffineProcess,
    material: &M,
    x: &Vec3,
    t: f64,
) -> Result<Vec3> {
    Ok(evaluate_sample(proc, material, x, t)?.b)
}

/// `r = ε̇ − (τ·∇v)/ρ + (div q)/ρ − Eᴹ·π̇`.
pub fn heating_from_energy<M: Constitutive>(proc: &AffineProcess, material: &M, x: &Vec3, t: f64) -> Result<f64> {
    Ok(evaluate_sample(proc, material, x, t)?.r)
}

/// Full sample at `(x, t)`: state, rates, responses with their time rates,
/// and the back-solved body force and heating.
pub fn evaluate_sample<M: Constitutive>(proc: &AffineProcess, material: &M, x: &Vec3, t: f64) -> Result<ProcessSample> {
    let state = proc.state_at(x, t)?;
    let rates = proc.rates_unchecked(x, t);
    let motion = proc.motion(x, t)?;
    let dual = material.response(&state.with_rates(&rates))?;
    let response = dual.values();
    let dot = dual.derivs();
    let rho = material.rho_r() / state.jacobian();

    let div_tau = div_tau(proc, material, &motion.position, t)?;
    let div_q = div_q(proc, material, &motion.position, t)?;
    let power = stress_power(&response.tau, &state.f, &rates.f_dot)?;

    let b = motion.acceleration - div_tau.scale(1.0 / rho);
    let r = dot.eps - power / rho + div_q / rho - state.em.dot(&dot.pi);
    Ok(ProcessSample {
        t,
        x: *x,
        state,
        rates,
        response,
        terms: BalanceTerms {
            rho,
            acceleration: motion.acceleration,
            div_tau,
            div_q,
            stress_power: power,
            psi_dot: dot.psi,
            eta_dot: dot.eta,
            eps_dot: dot.eps,
            pi_dot: dot.pi,
            p_dot: dot.p,
        },
        b,
        r,
    })
}

/// Evenly spaced times over `[start, end]`; one point gives `[start]`.
pub fn time_grid(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|k| if k + 1 == n { end } else { start + (end - start) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// Samples on the grid `times × points`, ordered by time then point.
/// Evaluation is parallel; the output order does not depend on scheduling.
pub fn run_process<M: Constitutive>(
    proc: &AffineProcess,
    material: &M,
    points: &[Vec3],
    times: &[f64],
) -> Result<Vec<ProcessSample>> {
    if points.is_empty() || times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let n = points.len();
    let results: Vec<Result<ProcessSample>> = (0..n * times.len())
        .into_par_iter()
        .map(|k| evaluate_sample(proc, material, &points[k % n], times[k / n]))
        .collect();
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|e| Error::Sample { index, source: Box::new(e) }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{FourierHeatModel, Material, ModelParameters, QuadraticCoupledModel};
    use crate::tensor::fd_derivative;

    fn horizon() -> Horizon {
        Horizon { start: 0.0, end: 1.0 }
    }

    fn material() -> Material {
        let mut p = ModelParameters::elastic(1.2, 0.8, 1.5, 1.0, 2.0);
        p.beta = 0.1;
        p.chi = [[0.3, 0.05, 0.0], [0.05, 0.2, 0.0], [0.0, 0.0, 0.25]];
        p.pyro = [0.05, -0.02, 0.03];
        p.piezo[0][0][0] = 0.1;
        p.piezo[1][0][1] = 0.04;
        p.piezo[1][1][0] = 0.04;
        p.piezo[2][2][2] = -0.06;
        Material::new(QuadraticCoupledModel::new(p).unwrap(), FourierHeatModel::isotropic(0.7).unwrap())
    }

    fn coupled() -> AffineProcess {
        let a0 = Mat3([[1.05, 0.1, 0.0], [-0.05, 0.95, 0.02], [0.0, 0.03, 1.1]]);
        let a1 = Mat3([[0.1, -0.2, 0.05], [0.15, 0.0, 0.1], [-0.05, 0.1, -0.1]]);
        AffineProcess {
            deformation: MatPath::linear(&a0, &a1),
            alpha: ScalarPath::Trig { mean: 1.1, sin: 0.1, cos: 0.0, omega: 2.0 },
            temp_gradient: [ScalarPath::linear(0.1, 0.2), ScalarPath::Constant(-0.05), ScalarPath::Cubic { cubic: [0.0, 0.1, 0.0, -0.1] }],
            potential_gradient: [ScalarPath::linear(0.3, -0.4), ScalarPath::Trig { mean: 0.0, sin: 0.2, cos: 0.1, omega: 3.0 }, ScalarPath::Constant(0.1)],
            beta: ScalarPath::Constant(0.0),
            anchor: Vec3::new(0.1, 0.0, -0.1),
            horizon: horizon(),
        }
    }

    #[test]
    fn scalar_path_derivatives_match_fd() {
        let paths = [
            ScalarPath::Constant(2.0),
            ScalarPath::Cubic { cubic: [1.0, -2.0, 0.5, 0.3] },
            ScalarPath::Trig { mean: 1.0, sin: 0.4, cos: -0.3, omega: 2.5 },
        ];
        for p in paths {
            for t in [0.0, 0.3, 0.9] {
                let v = fd_derivative(|s| Ok::<_, ()>(p.value(s)), t, None).unwrap();
                let a = fd_derivative(|s| Ok::<_, ()>(p.rate(s)), t, None).unwrap();
                assert!((v - p.rate(t)).abs() < 1e-8);
                assert!((a - p.accel(t)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rotation_path_is_orthogonal_with_matching_rates() {
        let p = MatPath::Rotation { axis: [1.0, 2.0, -0.5], omega: 1.7, phase: 0.3, stretch: identity_rows() };
        for t in [0.0, 0.4, 1.0] {
            let [q, q_dot, q_ddot] = p.eval(t);
            assert!((q.matmul(&q.transpose()) - Mat3::identity()).max_abs() < 1e-14);
            assert!((q.det() - 1.0).abs() < 1e-14);
            let h = 1e-6;
            let fd = (p.eval(t + h)[0] - p.eval(t - h)[0]).scale(0.5 / h);
            let fd2 = (p.eval(t + h)[1] - p.eval(t - h)[1]).scale(0.5 / h);
            assert!((fd - q_dot).max_abs() < 1e-8);
            assert!((fd2 - q_ddot).max_abs() < 1e-8);
        }
    }

    #[test]
    fn state_at_anchor() {
        let p = coupled();
        let s = p.state_at(&p.anchor, 0.5).unwrap();
        let [a, _, _] = p.deformation.eval(0.5);
        assert_eq!(s.f, a);
        assert_eq!(s.theta, p.alpha.value(0.5));
        assert_eq!(s.g, vec_eval(&p.temp_gradient, |c| c.value(0.5)));
        assert_eq!(s.em, -vec_eval(&p.potential_gradient, |c| c.value(0.5)));
    }

    #[test]
    fn temperature_off_anchor_matches_formula() {
        let p = coupled();
        let x = Vec3::new(0.4, -0.3, 0.2);
        let t = 0.7;
        let s = p.state_at(&x, t).unwrap();
        let a = p.deformation.eval(t)[0].to_array();
        let g: Vec<f64> = p.temp_gradient.iter().map(|c| c.value(t)).collect();
        let dx = [x[0] - 0.1, x[1], x[2] + 0.1];
        let mut theta = p.alpha.value(t);
        for k in 0..3 {
            for i in 0..3 {
                theta += a[i][k] * g[i] * dx[k];
            }
        }
        assert!((s.theta - theta).abs() < 1e-15);
    }

    #[test]
    fn rest_state_and_horizon() {
        let p = AffineProcess::rest(1.0, horizon());
        let s = p.state_at(&Vec3::new(1.0, 2.0, 3.0), 0.5).unwrap();
        assert_eq!(s, MaterialState::reference(1.0));
        assert_eq!(p.rates_at(&Vec3::zeros(), 0.5).unwrap(), SpatialRates::zero());
        assert!(matches!(p.state_at(&Vec3::zeros(), 1.5), Err(Error::OutsideHorizon { .. })));
    }

    #[test]
    fn linear_path_rate() {
        let l = Mat3([[0.1, 0.2, 0.0], [0.0, -0.1, 0.3], [0.2, 0.0, 0.0]]);
        let p = AffineProcess { deformation: MatPath::linear(&Mat3::identity(), &l), ..AffineProcess::rest(1.0, horizon()) };
        assert_eq!(p.rates_at(&Vec3::zeros(), 0.0).unwrap().f_dot, l);
    }

    #[test]
    fn rates_match_fd_in_time() {
        let p = coupled();
        let x = Vec3::new(-0.3, 0.5, 0.2);
        let t = 0.4;
        let r = p.rates_at(&x, t).unwrap();
        let h = 1e-6;
        let (sp, sm) = (p.state_at(&x, t + h).unwrap(), p.state_at(&x, t - h).unwrap());
        assert!(((sp.f - sm.f).scale(0.5 / h) - r.f_dot).max_abs() < 1e-8);
        assert!(((sp.theta - sm.theta) * 0.5 / h - r.theta_dot).abs() < 1e-8);
        assert!(((sp.g - sm.g).scale(0.5 / h) - r.g_dot).max_abs() < 1e-8);
        assert!(((sp.em - sm.em).scale(0.5 / h) - r.em_dot).max_abs() < 1e-8);
    }

    #[test]
    fn cold_point_is_rejected() {
        let p = AffineProcess {
            temp_gradient: [ScalarPath::Constant(1.0), ScalarPath::Constant(0.0), ScalarPath::Constant(0.0)],
            ..AffineProcess::rest(1.0, horizon())
        };
        let err = p.state_at(&Vec3::new(-1.0, 0.0, 0.0), 0.0).unwrap_err();
        assert!(matches!(err, Error::NonPositiveTemperature { .. }));
        assert!(err.is_invalid_state());
    }

    #[test]
    fn static_process_needs_no_body_force_or_heating() {
        let m = material();
        let p = AffineProcess {
            deformation: MatPath::linear(&Mat3::from_diagonal([1.1, 0.9, 1.05]), &Mat3::zeros()),
            potential_gradient: [ScalarPath::Constant(0.2), ScalarPath::Constant(-0.1), ScalarPath::Constant(0.3)],
            ..AffineProcess::rest(1.2, horizon())
        };
        let x = Vec3::new(0.3, 0.2, -0.4);
        assert!(body_force_from_momentum(&p, &m, &x, 0.5).unwrap().max_abs() < 1e-10);
        assert!(heating_from_energy(&p, &m, &x, 0.5).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rigid_rotation_body_force_is_inertia() {
        let m = material();
        let p = AffineProcess::rigid_rotation([0.0, 0.3, 1.0], 2.0, 1.0, horizon());
        let x = Vec3::new(0.5, -0.2, 0.1);
        let b = body_force_from_momentum(&p, &m, &x, 0.3).unwrap();
        let expected = p.deformation.eval(0.3)[2].mul_vec(&(x - p.anchor));
        assert!((b - expected).max_abs() < 1e-12);
    }

    #[test]
    fn run_process_layout() {
        let m = material();
        let p = coupled();
        let points = [Vec3::zeros(), Vec3::new(0.2, 0.1, -0.3)];
        let times = time_grid(0.0, 1.0, 3);
        let samples = run_process(&p, &m, &points, &times).unwrap();
        assert_eq!(samples.len(), 6);
        for (k, s) in samples.iter().enumerate() {
            assert_eq!(s.t, times[k / 2]);
            assert_eq!(s.x, points[k % 2]);
            assert_eq!(*s, evaluate_sample(&p, &m, &points[k % 2], times[k / 2]).unwrap());
        }
        assert!(matches!(run_process(&p, &m, &[], &times), Err(Error::EmptyGrid)));
    }

    #[test]
    fn rest_samples_identical() {
        let m = material();
        let p = AffineProcess::rest(1.3, horizon());
        let s = run_process(&p, &m, &[Vec3::zeros()], &time_grid(0.0, 1.0, 3)).unwrap();
        assert_eq!(s[0].response, s[2].response);
        assert_eq!(s[0].b, s[1].b);
        assert_eq!(s[0].r, s[2].r);
    }

    #[test]
    fn time_grid_endpoints() {
        assert_eq!(time_grid(0.0, 1.0, 1), vec![0.0]);
        assert_eq!(time_grid(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(time_grid(0.0, 1.0, 0).is_empty());
    }
}
