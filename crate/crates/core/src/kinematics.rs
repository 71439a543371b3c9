//! Kinematic measures and spatial ↔ referential field transforms.
//!
//! Index convention: `F[i][K] = ∂x_i/∂X_K` (spatial leg first). Spatial
//! stress tensors carry the face-normal index first, so the stress power is
//! `Σ τ_kl ∂v_l/∂x_k`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tensor::{Dual, Mat3, Real, Sym3, Vec3, SINGULAR_REL};

/// Default relative step for spatial finite differences (times a characteristic length).
pub const DEFAULT_SPATIAL_STEP_REL: f64 = 1e-5;

/// Spatial constitutive state `(F, θ, Eᴹ, g)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialState<T = f64> {
    pub f: Mat3<T>,
    pub theta: T,
    pub em: Vec3<T>,
    pub g: Vec3<T>,
}

/// Referential constitutive state `(F, θ, W, G)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferentialState<T = f64> {
    pub f: Mat3<T>,
    pub theta: T,
    pub w: Vec3<T>,
    pub g_ref: Vec3<T>,
}

fn validate_domain<T: Real>(f: &Mat3<T>, theta: T) -> Result<()> {
    let th = theta.value();
    if !th.is_finite() || !f.is_finite() {
        return Err(Error::NonFinite("state"));
    }
    if th <= 0.0 {
        return Err(Error::InvalidTemperature(th));
    }
    let j = f.det().value();
    if j <= 0.0 {
        return Err(Error::NonPositiveJacobian(j));
    }
    Ok(())
}

impl<T: Real> MaterialState<T> {
    pub fn new(f: Mat3<T>, theta: T, em: Vec3<T>, g: Vec3<T>) -> Result<Self> {
        let s = MaterialState { f, theta, em, g };
        s.validate()?;
        Ok(s)
    }

    /// Checks `θ > 0`, `det F > 0` and finiteness.
    pub fn validate(&self) -> Result<()> {
        validate_domain(&self.f, self.theta)?;
        if !self.em.is_finite() || !self.g.is_finite() {
            return Err(Error::NonFinite("state"));
        }
        Ok(())
    }

    pub fn jacobian(&self) -> T {
        self.f.det()
    }

    /// `W = Fᵀ Eᴹ`, `G = Fᵀ g`.
    pub fn to_referential(&self) -> ReferentialState<T> {
        ReferentialState {
            f: self.f,
            theta: self.theta,
            w: pull_back_electric(&self.f, &self.em),
            g_ref: pull_back_tempgrad(&self.f, &self.g),
        }
    }
}

impl MaterialState<f64> {
    /// Reference configuration at temperature `theta`.
    pub fn reference(theta: f64) -> Self {
        MaterialState {
            f: Mat3::identity(),
            theta,
            em: Vec3::zeros(),
            g: Vec3::zeros(),
        }
    }

    pub fn lift<T: Real>(&self) -> MaterialState<T> {
        MaterialState {
            f: self.f.lift(),
            theta: T::from_f64(self.theta),
            em: self.em.lift(),
            g: self.g.lift(),
        }
    }

    /// Dual-valued state whose infinitesimal parts are the given rates, so
    /// every response evaluated on it carries its material time derivative.
    pub fn with_rates(&self, rates: &SpatialRates) -> MaterialState<Dual> {
        MaterialState {
            f: Mat3::with_rates(&self.f, &rates.f_dot),
            theta: Dual::new(self.theta, rates.theta_dot),
            em: Vec3::with_rates(&self.em, &rates.em_dot),
            g: Vec3::with_rates(&self.g, &rates.g_dot),
        }
    }
}

impl MaterialState<Dual> {
    pub fn values(&self) -> MaterialState<f64> {
        MaterialState {
            f: self.f.values(),
            theta: self.theta.value,
            em: self.em.values(),
            g: self.g.values(),
        }
    }
}

impl<T: Real> ReferentialState<T> {
    pub fn new(f: Mat3<T>, theta: T, w: Vec3<T>, g_ref: Vec3<T>) -> Result<Self> {
        let s = ReferentialState { f, theta, w, g_ref };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        validate_domain(&self.f, self.theta)?;
        if !self.w.is_finite() || !self.g_ref.is_finite() {
            return Err(Error::NonFinite("state"));
        }
        Ok(())
    }

    /// `Eᴹ = F⁻ᵀ W`, `g = F⁻ᵀ G`.
    pub fn to_spatial(&self) -> Result<MaterialState<T>> {
        let f_inv_t = self.f.inverse()?.transpose();
        Ok(MaterialState {
            f: self.f,
            theta: self.theta,
            em: f_inv_t.mul_vec(&self.w),
            g: f_inv_t.mul_vec(&self.g_ref),
        })
    }
}

impl ReferentialState<f64> {
    pub fn with_rates(&self, rates: &ReferentialRates) -> ReferentialState<Dual> {
        ReferentialState {
            f: Mat3::with_rates(&self.f, &rates.f_dot),
            theta: Dual::new(self.theta, rates.theta_dot),
            w: Vec3::with_rates(&self.w, &rates.w_dot),
            g_ref: Vec3::with_rates(&self.g_ref, &rates.g_ref_dot),
        }
    }
}

/// Material time derivatives of the spatial state variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialRates {
    pub f_dot: Mat3,
    pub theta_dot: f64,
    pub em_dot: Vec3,
    pub g_dot: Vec3,
}

impl SpatialRates {
    pub fn zero() -> Self {
        SpatialRates {
            f_dot: Mat3::zeros(),
            theta_dot: 0.0,
            em_dot: Vec3::zeros(),
            g_dot: Vec3::zeros(),
        }
    }

    /// Referential rates at `state`: `Ẇ = Ḟᵀ Eᴹ + Fᵀ Ėᴹ`, `Ġ = Ḟᵀ g + Fᵀ ġ`.
    pub fn to_referential(&self, state: &MaterialState) -> ReferentialRates {
        ReferentialRates {
            f_dot: self.f_dot,
            theta_dot: self.theta_dot,
            w_dot: self.f_dot.tr_mul_vec(&state.em) + state.f.tr_mul_vec(&self.em_dot),
            g_ref_dot: self.f_dot.tr_mul_vec(&state.g) + state.f.tr_mul_vec(&self.g_dot),
        }
    }
}

/// Material time derivatives of the referential state variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferentialRates {
    pub f_dot: Mat3,
    pub theta_dot: f64,
    pub w_dot: Vec3,
    pub g_ref_dot: Vec3,
}

/// Mass densities tied by `ρ_R = ρ J`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Densities<T = f64> {
    pub rho_r: T,
    pub rho: T,
}

impl<T: Real> Densities<T> {
    /// Spatial density from conservation of mass, `ρ = ρ_R / det F`.
    pub fn from_reference(rho_r: T, f: &Mat3<T>) -> Result<Self> {
        if !(rho_r.value() > 0.0) {
            return Err(Error::param("rho_r", "must be positive"));
        }
        let j = f.det();
        if !(j.value() > 0.0) {
            return Err(Error::NonPositiveJacobian(j.value()));
        }
        Ok(Densities { rho_r, rho: rho_r / j })
    }

    /// Stored pair, rejected unless `ρ_R = ρ det F` within `1e-12` relative.
    pub fn new(rho_r: T, rho: T, f: &Mat3<T>) -> Result<Self> {
        let d = Densities { rho_r, rho };
        d.check(f)?;
        Ok(d)
    }

    pub fn check(&self, f: &Mat3<T>) -> Result<()> {
        let rho_r = self.rho_r.value();
        let rho_j = self.rho.value() * f.det().value();
        if !(rho_r > 0.0) || !(self.rho.value() > 0.0) || (rho_r - rho_j).abs() > 1e-12 * rho_r {
            return Err(Error::InconsistentDensity { rho_r, rho_j });
        }
        Ok(())
    }
}

/// Green–Lagrange strain `E = ½(FᵀF − I)`.
pub fn green_lagrange<T: Real>(f: &Mat3<T>) -> Sym3<T> {
    let c = Mat3::from_fn(|l, m| f[(0, l)] * f[(0, m)] + f[(1, l)] * f[(1, m)] + f[(2, l)] * f[(2, m)]);
    Sym3::from_symmetric_part(&Mat3::from_fn(|l, m| {
        let delta = if l == m { T::one() } else { T::zero() };
        (c[(l, m)] - delta) * 0.5
    }))
}

/// Referential electric field `W = Fᵀ Eᴹ`.
pub fn pull_back_electric<T: Real>(f: &Mat3<T>, em: &Vec3<T>) -> Vec3<T> {
    f.tr_mul_vec(em)
}

/// Referential temperature gradient `G = Fᵀ g`.
pub fn pull_back_tempgrad<T: Real>(f: &Mat3<T>, g: &Vec3<T>) -> Vec3<T> {
    f.tr_mul_vec(g)
}

fn check_invertible<T: Real>(f: &Mat3<T>) -> Result<T> {
    let j = f.det();
    let scale = f.norm().value();
    let threshold = SINGULAR_REL * scale * scale * scale;
    if !(j.value().abs() > threshold) {
        return Err(Error::SingularMatrix {
            det: j.value(),
            threshold,
        });
    }
    if j.value() < 0.0 {
        return Err(Error::NonPositiveJacobian(j.value()));
    }
    Ok(j)
}

/// Piola transform of a spatial flux vector, `ℍ = J F⁻¹ h` (= adj(F) h).
pub fn piola_vector<T: Real>(f: &Mat3<T>, h: &Vec3<T>) -> Result<Vec3<T>> {
    check_invertible(f)?;
    Ok(f.adjugate().mul_vec(h))
}

/// Inverse Piola transform `h = J⁻¹ F ℍ`.
pub fn push_forward_vector<T: Real>(f: &Mat3<T>, h_ref: &Vec3<T>) -> Result<Vec3<T>> {
    let j = check_invertible(f)?;
    Ok(f.mul_vec(h_ref).scale(j.recip()))
}

/// Eulerian electric displacement in Gaussian units, `D = Eᴹ + 4πP`.
pub fn electric_displacement<T: Real>(em: &Vec3<T>, p: &Vec3<T>) -> Vec3<T> {
    *em + p.scale(T::from_f64(4.0 * PI))
}

/// Referential electric displacement `Δ = J F⁻¹ Eᴹ + 4π ℙ`, with `ℙ = J F⁻¹ P`.
pub fn referential_displacement<T: Real>(f: &Mat3<T>, em: &Vec3<T>, p: &Vec3<T>) -> Result<Vec3<T>> {
    let em_ref = piola_vector(f, em)?;
    let p_ref = piola_vector(f, p)?;
    Ok(em_ref + p_ref.scale(T::from_f64(4.0 * PI)))
}

/// Velocity gradient `(∇v)_ij = ∂v_i/∂x_j = Ḟ_iK (F⁻¹)_Kj`.
pub fn velocity_gradient<T: Real>(f: &Mat3<T>, f_dot: &Mat3<T>) -> Result<Mat3<T>> {
    let f_inv = f.inverse()?;
    Ok(f_dot.matmul(&f_inv))
}

/// Stress power `Σ τ_kl ∂v_l/∂x_k = tr(τ ∇v)`.
///
/// Agrees with `ddot(τ, ∇v)` whenever τ or ∇v is symmetric; the two differ by
/// `2 τᴬ · spin` otherwise.
pub fn stress_power<T: Real>(tau: &Mat3<T>, f: &Mat3<T>, f_dot: &Mat3<T>) -> Result<T> {
    let l = velocity_gradient(f, f_dot)?;
    Ok(tau.ddot(&l.transpose()))
}

/// Central-difference divergence `Σ_i (f_i(x + h e_i) − f_i(x − h e_i)) / 2h`.
pub fn spatial_divergence_fd<E>(
    field: impl Fn(&Vec3) -> Result<Vec3, E>,
    x: &Vec3,
    h: f64,
) -> Result<f64, E> {
    let mut div = 0.0;
    for i in 0..3 {
        let mut xp = *x;
        let mut xm = *x;
        xp[i] += h;
        xm[i] -= h;
        div += (field(&xp)?[i] - field(&xm)?[i]) / (2.0 * h);
    }
    Ok(div)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot_z(angle: f64) -> Mat3 {
        let (s, c) = angle.sin_cos();
        Mat3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    }

    fn close_v(a: &Vec3, b: &Vec3, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol
    }

    #[test]
    fn green_lagrange_examples() {
        assert_eq!(green_lagrange(&Mat3::<f64>::identity()), Sym3::zeros());
        let e = green_lagrange(&Mat3::from_diagonal([2.0, 1.0, 1.0]));
        assert_eq!(*e.as_mat(), Mat3::from_diagonal([1.5, 0.0, 0.0]));
        let e = green_lagrange(&rot_z(0.7));
        assert!(e.as_mat().max_abs() < 1e-15);
    }

    #[test]
    fn pull_back_electric_examples() {
        let em = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(pull_back_electric(&Mat3::identity(), &em), em);
        assert_eq!(
            pull_back_electric(&Mat3::identity().scale(2.0), &em),
            Vec3::new(2.0, 0.0, 0.0)
        );
        // Q = [[0,-1,0],[1,0,0],[0,0,1]]; Qᵀ e1 is the first row of Q.
        let w = pull_back_electric(&rot_z(std::f64::consts::FRAC_PI_2), &em);
        assert!(close_v(&w, &Vec3::new(0.0, -1.0, 0.0), 1e-15));
    }

    #[test]
    fn pull_back_tempgrad_examples() {
        let g = Vec3::new(0.3, -0.2, 0.9);
        assert_eq!(pull_back_tempgrad(&Mat3::identity(), &g), g);
        assert_eq!(pull_back_tempgrad(&Mat3::from_diagonal([2.0, 3.0, 4.0]), &Vec3::zeros()), Vec3::zeros());
        assert_eq!(
            pull_back_tempgrad(&Mat3::from_diagonal([1.0, 2.0, 3.0]), &Vec3::new(1.0, 1.0, 1.0)),
            Vec3::new(1.0, 2.0, 3.0)
        );
    }

    #[test]
    fn piola_examples() {
        let h = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(piola_vector(&Mat3::identity(), &h).unwrap(), h);
        assert_eq!(
            piola_vector(&Mat3::identity().scale(2.0), &h).unwrap(),
            Vec3::new(4.0, 0.0, 0.0)
        );
        let f = Mat3::from_diagonal([2.0, 0.5, 3.0]);
        let back = push_forward_vector(&f, &piola_vector(&f, &h).unwrap()).unwrap();
        assert!(close_v(&back, &h, 1e-15));
        let singular = Mat3::from_diagonal([1.0, 0.0, 1.0]);
        assert!(matches!(piola_vector(&singular, &h), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn displacement_examples() {
        let em = Vec3::new(1.0, 1.0, 1.0);
        assert_eq!(electric_displacement(&em, &Vec3::zeros()), em);
        let p = Vec3::new(1.0, 0.0, 0.0);
        assert_eq!(electric_displacement(&Vec3::zeros(), &p), Vec3::new(4.0 * PI, 0.0, 0.0));
        assert_eq!(electric_displacement(&em, &p), Vec3::new(1.0 + 4.0 * PI, 1.0, 1.0));

        let i = Mat3::identity();
        assert_eq!(referential_displacement(&i, &em, &Vec3::zeros()).unwrap(), em);
        assert!(close_v(
            &referential_displacement(&i, &em, &p).unwrap(),
            &electric_displacement(&em, &p),
            1e-15
        ));
    }

    #[test]
    fn velocity_gradient_examples() {
        let f = Mat3::from_diagonal([2.0, 1.0, 1.0]);
        assert_eq!(velocity_gradient(&f, &Mat3::zeros()).unwrap(), Mat3::zeros());
        let l = Mat3([[0.1, 0.2, -0.3], [0.0, 0.5, 0.4], [0.7, -0.1, 0.2]]);
        assert_eq!(velocity_gradient(&Mat3::identity(), &l).unwrap(), l);
        assert_eq!(
            velocity_gradient(&f, &Mat3::from_diagonal([1.0, 0.0, 0.0])).unwrap(),
            Mat3::from_diagonal([0.5, 0.0, 0.0])
        );
    }

    #[test]
    fn stress_power_examples() {
        let l = Mat3([[0.1, 0.2, -0.3], [0.0, 0.5, 0.4], [0.7, -0.1, 0.2]]);
        let i = Mat3::identity();
        assert_eq!(stress_power(&i, &i, &Mat3::zeros()).unwrap(), 0.0);
        assert!((stress_power(&i, &i, &l).unwrap() - l.trace()).abs() < 1e-15);
    }

    #[test]
    fn divergence_examples() {
        let c = |_: &Vec3| -> Result<Vec3, ()> { Ok(Vec3::new(1.0, 2.0, 3.0)) };
        let x = Vec3::new(0.3, 0.1, -0.4);
        assert!(spatial_divergence_fd(c, &x, 1e-5).unwrap().abs() < 1e-10);
        let id = |x: &Vec3| -> Result<Vec3, ()> { Ok(*x) };
        assert!((spatial_divergence_fd(id, &x, 1e-5).unwrap() - 3.0).abs() < 1e-8);
        let quad = |x: &Vec3| -> Result<Vec3, ()> { Ok(Vec3::new(x[0] * x[0], 0.0, 0.0)) };
        let d = spatial_divergence_fd(quad, &Vec3::new(2.0, 0.0, 0.0), 1e-5).unwrap();
        assert!((d - 4.0).abs() < 1e-6);
    }

    #[test]
    fn densities_enforce_mass_conservation() {
        let f = Mat3::from_diagonal([2.0, 1.0, 1.5]);
        let d = Densities::from_reference(3.0, &f).unwrap();
        assert!((d.rho - 1.0).abs() < 1e-15);
        assert!(Densities::new(3.0, 1.0, &f).is_ok());
        assert!(matches!(
            Densities::new(3.0, 1.1, &f),
            Err(Error::InconsistentDensity { .. })
        ));
    }

    #[test]
    fn state_domain_is_enforced() {
        let i = Mat3::identity();
        assert!(matches!(
            MaterialState::new(i, -1.0, Vec3::zeros(), Vec3::zeros()),
            Err(Error::InvalidTemperature(_))
        ));
        assert!(matches!(
            MaterialState::new(Mat3::from_diagonal([-1.0, 1.0, 1.0]), 1.0, Vec3::zeros(), Vec3::zeros()),
            Err(Error::NonPositiveJacobian(_))
        ));
    }
}
