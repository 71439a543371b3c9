use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::scalar::{Dual, Real};
use super::vector::Vec3;
use crate::error::{Error, Result};

/// Default relative singularity threshold: `|det M| > SINGULAR_REL · ‖M‖³`.
pub const SINGULAR_REL: f64 = 1e-12;

/// Real 3×3 tensor, row index = first leg, column index = second leg.
///
/// For the deformation gradient this means `F[i][K] = ∂x_i/∂X_K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3<T = f64>(pub [[T; 3]; 3]);

impl<T: Real> Mat3<T> {
    #[inline]
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        Mat3(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn zeros() -> Self {
        Mat3([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_diagonal(d: [T; 3]) -> Self {
        Self::from_fn(|i, j| if i == j { d[i] } else { T::zero() })
    }

    pub fn from_rows(rows: [[T; 3]; 3]) -> Self {
        Mat3(rows)
    }

    pub fn row(&self, i: usize) -> Vec3<T> {
        Vec3(self.0[i])
    }

    pub fn column(&self, j: usize) -> Vec3<T> {
        Vec3::from_fn(|i| self.0[i][j])
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> T {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Transposed cofactor matrix, `adj(M) M = det(M) I`.
    pub fn adjugate(&self) -> Self {
        let m = &self.0;
        let c = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        Mat3([
            [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
            [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
            [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
        ])
    }

    /// Inverse with the default threshold `|det| > 1e-12 ‖M‖³`.
    pub fn inverse(&self) -> Result<Self> {
        self.inverse_with(SINGULAR_REL)
    }

    /// Inverse, rejecting `|det| ≤ rel · ‖M‖_F³`.
    pub fn inverse_with(&self, rel: f64) -> Result<Self> {
        let det = self.det();
        let scale = self.norm().value();
        let threshold = rel * scale * scale * scale;
        if !(det.value().abs() > threshold) {
            return Err(Error::SingularMatrix {
                det: det.value(),
                threshold,
            });
        }
        let inv_det = det.recip();
        let adj = self.adjugate();
        Ok(Self::from_fn(|i, j| adj.0[i][j] * inv_det))
    }

    /// Full double contraction `A · B = Σ_ij A_ij B_ij`.
    pub fn ddot(&self, o: &Self) -> T {
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * o.0[i][j];
            }
        }
        s
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.ddot(self).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        Vec3::from_fn(|i| self.0[i][0] * v.0[0] + self.0[i][1] * v.0[1] + self.0[i][2] * v.0[2])
    }

    /// `Mᵀ v` without forming the transpose.
    pub fn tr_mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        Vec3::from_fn(|j| self.0[0][j] * v.0[0] + self.0[1][j] * v.0[1] + self.0[2][j] * v.0[2])
    }

    pub fn matmul(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| {
            self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j] + self.0[i][2] * o.0[2][j]
        })
    }

    pub fn symmetric_part(&self) -> Self {
        Self::from_fn(|i, j| (self.0[i][j] + self.0[j][i]) * 0.5)
    }

    pub fn antisymmetric_part(&self) -> Self {
        Self::from_fn(|i, j| (self.0[i][j] - self.0[j][i]) * 0.5)
    }

    pub fn values(&self) -> Mat3<f64> {
        Mat3::from_fn(|i, j| self.0[i][j].value())
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|v| v.value().abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.value().is_finite())
    }
}

impl Mat3<f64> {
    pub fn lift<T: Real>(&self) -> Mat3<T> {
        Mat3::from_fn(|i, j| T::from_f64(self.0[i][j]))
    }

    pub fn to_array(self) -> [[f64; 3]; 3] {
        self.0
    }

    /// Flattened row-major components.
    pub fn to_flat(&self) -> [f64; 9] {
        std::array::from_fn(|k| self.0[k / 3][k % 3])
    }

    pub fn from_flat(v: &[f64]) -> Self {
        Mat3::from_fn(|i, j| v[3 * i + j])
    }
}

impl Mat3<Dual> {
    pub fn with_rates(value: &Mat3<f64>, rate: &Mat3<f64>) -> Self {
        Mat3::from_fn(|i, j| Dual::new(value.0[i][j], rate.0[i][j]))
    }

    pub fn derivs(&self) -> Mat3<f64> {
        Mat3::from_fn(|i, j| self.0[i][j].deriv)
    }
}

impl<T> Index<(usize, usize)> for Mat3<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat3<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Mat3<T>;
    fn add(self, o: Self) -> Self {
        Mat3::from_fn(|i, j| self.0[i][j] + o.0[i][j])
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Mat3<T>;
    fn sub(self, o: Self) -> Self {
        Mat3::from_fn(|i, j| self.0[i][j] - o.0[i][j])
    }
}

impl<T: Real> Neg for Mat3<T> {
    type Output = Mat3<T>;
    fn neg(self) -> Self {
        Mat3::from_fn(|i, j| -self.0[i][j])
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Mat3<T>;
    fn mul(self, o: Self) -> Self {
        self.matmul(&o)
    }
}

impl<T: Real> Mul<Vec3<T>> for Mat3<T> {
    type Output = Vec3<T>;
    fn mul(self, v: Vec3<T>) -> Vec3<T> {
        self.mul_vec(&v)
    }
}

/// Symmetric 3×3 tensor. Symmetry holds by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sym3<T = f64>(Mat3<T>);

impl<T: Real> Sym3<T> {
    /// Symmetric part `½(M + Mᵀ)`.
    pub fn from_symmetric_part(m: &Mat3<T>) -> Self {
        Sym3(m.symmetric_part())
    }

    pub fn zeros() -> Self {
        Sym3(Mat3::zeros())
    }

    pub fn identity() -> Self {
        Sym3(Mat3::identity())
    }

    pub fn from_diagonal(d: [T; 3]) -> Self {
        Sym3(Mat3::from_diagonal(d))
    }

    pub fn as_mat(&self) -> &Mat3<T> {
        &self.0
    }

    pub fn into_mat(self) -> Mat3<T> {
        self.0
    }

    pub fn trace(&self) -> T {
        self.0.trace()
    }

    pub fn ddot(&self, o: &Self) -> T {
        self.0.ddot(&o.0)
    }

    pub fn mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        self.0.mul_vec(v)
    }

    pub fn values(&self) -> Sym3<f64> {
        Sym3(self.0.values())
    }
}

impl Sym3<f64> {
    /// Accept `m` only if it is symmetric to `1e-12` relative.
    pub fn try_from_mat(m: &Mat3<f64>) -> Result<Self> {
        let skew = m.antisymmetric_part().max_abs();
        if skew > 1e-12 * m.max_abs().max(1.0) || !m.is_finite() {
            return Err(Error::InvalidParameter {
                name: "symmetric tensor".into(),
                reason: format!("not symmetric (max skew component {skew:e})"),
            });
        }
        Ok(Sym3(m.symmetric_part()))
    }

    pub fn lift<T: Real>(&self) -> Sym3<T> {
        Sym3(self.0.lift())
    }

    /// Eigenvalues in descending order (closed-form trigonometric solution).
    pub fn eigenvalues(&self) -> [f64; 3] {
        let a = &self.0 .0;
        let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if p1 == 0.0 {
            let mut d = [a[0][0], a[1][1], a[2][2]];
            d.sort_by(|x, y| y.total_cmp(x));
            return d;
        }
        let q = self.0.trace() / 3.0;
        let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let b = (self.0 - Mat3::identity().scale(q)).scale(1.0 / p);
        let r = (b.det() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
        let e2 = 3.0 * q - e1 - e3;
        [e1, e2, e3]
    }

    /// Positive semidefinite up to `-tol · max(1, ‖M‖)` on the smallest eigenvalue.
    pub fn is_psd(&self, tol: f64) -> bool {
        let floor = -tol * self.0.norm().max(1.0);
        self.eigenvalues().iter().all(|&e| e >= floor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn det_examples() {
        assert_eq!(Mat3::<f64>::identity().det(), 1.0);
        assert_eq!(Mat3::from_diagonal([2.0, 3.0, 4.0]).det(), 24.0);
        let singular = Mat3([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [0.5, -1.0, 4.0]]);
        assert_eq!(singular.det(), 0.0);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Mat3::<f64>::identity().inverse().unwrap(), Mat3::identity());
        let inv = Mat3::from_diagonal([2.0, 4.0, 5.0]).inverse().unwrap();
        assert_eq!(inv, Mat3::from_diagonal([0.5, 0.25, 0.2]));
        let near = Mat3::from_diagonal([1.0, 1.0, 1e-15]);
        assert!(matches!(near.inverse(), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn ddot_examples() {
        let i = Mat3::<f64>::identity();
        assert_eq!(i.ddot(&i), 3.0);
        let a = Mat3([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]]);
        assert_eq!(a.ddot(&Mat3::zeros()), 0.0);
        let e12 = Vec3::<f64>::unit(0).outer(&Vec3::unit(1));
        assert_eq!(e12.ddot(&e12), 1.0);
    }

    #[test]
    fn adjugate_identity() {
        let a = Mat3([[2.0, -1.0, 0.5], [0.3, 1.5, -2.0], [1.0, 0.0, 3.0]]);
        let prod = a.adjugate().matmul(&a);
        let expected = Mat3::<f64>::identity().scale(a.det());
        for i in 0..3 {
            for j in 0..3 {
                assert!(approx(prod[(i, j)], expected[(i, j)], 1e-14));
            }
        }
    }

    #[test]
    fn eigenvalues_of_known_matrix() {
        // [[2,1,0],[1,2,0],[0,0,5]] has eigenvalues 5, 3, 1
        let s = Sym3::try_from_mat(&Mat3([[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]]))
            .unwrap();
        let e = s.eigenvalues();
        assert!(approx(e[0], 5.0, 1e-14));
        assert!(approx(e[1], 3.0, 1e-14));
        assert!(approx(e[2], 1.0, 1e-14));
        assert!(s.is_psd(1e-12));
        let indefinite = Sym3::from_diagonal([1.0, -0.1, 2.0]);
        assert!(!indefinite.is_psd(1e-12));
    }

    #[test]
    fn non_symmetric_rejected() {
        let m = Mat3([[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(Sym3::try_from_mat(&m).is_err());
    }
}
