use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use super::matrix::Mat3;
use super::scalar::{Dual, Real};

/// Real 3-vector. Role (electric field, heat flux, position, ...) is carried
/// by the variable name, not the type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<T = f64>(pub [T; 3]);

impl<T: Real> Vec3<T> {
    #[inline]
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3([x, y, z])
    }

    #[inline]
    pub fn zeros() -> Self {
        Vec3([T::zero(); 3])
    }

    /// Unit basis vector `e_i`.
    pub fn unit(i: usize) -> Self {
        let mut v = Self::zeros();
        v.0[i] = T::one();
        v
    }

    #[inline]
    pub fn from_fn(f: impl FnMut(usize) -> T) -> Self {
        Vec3(std::array::from_fn(f))
    }

    #[inline]
    pub fn dot(&self, o: &Self) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn scale(&self, s: T) -> Self {
        Vec3::from_fn(|i| self.0[i] * s)
    }

    pub fn cross(&self, o: &Self) -> Self {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = o.0;
        Vec3([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    }

    /// Dyadic product `self ⊗ o`, i.e. `(self ⊗ o)_ij = self_i o_j`.
    pub fn outer(&self, o: &Self) -> Mat3<T> {
        Mat3::from_fn(|i, j| self.0[i] * o.0[j])
    }

    pub fn values(&self) -> Vec3<f64> {
        Vec3::from_fn(|i| self.0[i].value())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|v| v.value().abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.value().is_finite())
    }
}

impl Vec3<f64> {
    /// Embed into any scalar type as a constant.
    pub fn lift<T: Real>(&self) -> Vec3<T> {
        Vec3::from_fn(|i| T::from_f64(self.0[i]))
    }

    pub fn to_array(self) -> [f64; 3] {
        self.0
    }
}

impl Vec3<Dual> {
    pub fn with_rates(value: &Vec3<f64>, rate: &Vec3<f64>) -> Self {
        Vec3::from_fn(|i| Dual::new(value.0[i], rate.0[i]))
    }

    pub fn derivs(&self) -> Vec3<f64> {
        Vec3::from_fn(|i| self.0[i].deriv)
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    #[inline]
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vec3<T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Vec3<T>;
    #[inline]
    fn add(self, o: Self) -> Self {
        Vec3::from_fn(|i| self.0[i] + o.0[i])
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Vec3<T>;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Vec3::from_fn(|i| self.0[i] - o.0[i])
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Vec3<T>;
    #[inline]
    fn neg(self) -> Self {
        Vec3::from_fn(|i| -self.0[i])
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Vec3<T>;
    #[inline]
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl From<[f64; 3]> for Vec3<f64> {
    fn from(a: [f64; 3]) -> Self {
        Vec3(a)
    }
}
