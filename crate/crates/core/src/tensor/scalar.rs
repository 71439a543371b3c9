//! Scalar abstraction shared by plain `f64` evaluation and forward-mode
//! dual numbers.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Minimal real-number interface used by every generic kernel in the crate.
///
/// Implemented for `f64` and [`Dual`]. Mixed arithmetic with `f64` constants
/// is part of the bound so model formulas read naturally.
pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    fn from_f64(v: f64) -> Self;

    /// Primal (non-infinitesimal) part.
    fn value(self) -> f64;

    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn powi(self, n: i32) -> Self;

    #[inline]
    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    #[inline]
    fn one() -> Self {
        Self::from_f64(1.0)
    }

    #[inline]
    fn recip(self) -> Self {
        Self::one() / self
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Single-seed forward-mode dual number `value + deriv·ε`, `ε² = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub deriv: f64,
}

impl Dual {
    #[inline]
    pub const fn new(value: f64, deriv: f64) -> Self {
        Self { value, deriv }
    }

    /// Independent variable: derivative seeded with one.
    #[inline]
    pub const fn variable(value: f64) -> Self {
        Self { value, deriv: 1.0 }
    }

    #[inline]
    pub const fn constant(value: f64) -> Self {
        Self { value, deriv: 0.0 }
    }

    #[inline]
    fn chain(self, f: f64, df: f64) -> Self {
        Self::new(f, df * self.deriv)
    }
}

impl Real for Dual {
    #[inline]
    fn from_f64(v: f64) -> Self {
        Dual::constant(v)
    }
    #[inline]
    fn value(self) -> f64 {
        self.value
    }
    #[inline]
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }
    #[inline]
    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }
    #[inline]
    fn ln(self) -> Self {
        self.chain(self.value.ln(), 1.0 / self.value)
    }
    #[inline]
    fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }
    #[inline]
    fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Dual::constant(1.0);
        }
        self.chain(self.value.powi(n), f64::from(n) * self.value.powi(n - 1))
    }
}

impl Add for Dual {
    type Output = Dual;
    #[inline]
    fn add(self, rhs: Dual) -> Dual {
        Dual::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl Sub for Dual {
    type Output = Dual;
    #[inline]
    fn sub(self, rhs: Dual) -> Dual {
        Dual::new(self.value - rhs.value, self.deriv - rhs.deriv)
    }
}

impl Mul for Dual {
    type Output = Dual;
    #[inline]
    fn mul(self, rhs: Dual) -> Dual {
        Dual::new(
            self.value * rhs.value,
            self.deriv * rhs.value + self.value * rhs.deriv,
        )
    }
}

impl Div for Dual {
    type Output = Dual;
    #[inline]
    fn div(self, rhs: Dual) -> Dual {
        let inv = 1.0 / rhs.value;
        Dual::new(
            self.value * inv,
            (self.deriv * rhs.value - self.value * rhs.deriv) * inv * inv,
        )
    }
}

impl Neg for Dual {
    type Output = Dual;
    #[inline]
    fn neg(self) -> Dual {
        Dual::new(-self.value, -self.deriv)
    }
}

impl Add<f64> for Dual {
    type Output = Dual;
    #[inline]
    fn add(self, rhs: f64) -> Dual {
        Dual::new(self.value + rhs, self.deriv)
    }
}

impl Sub<f64> for Dual {
    type Output = Dual;
    #[inline]
    fn sub(self, rhs: f64) -> Dual {
        Dual::new(self.value - rhs, self.deriv)
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    #[inline]
    fn mul(self, rhs: f64) -> Dual {
        Dual::new(self.value * rhs, self.deriv * rhs)
    }
}

impl Div<f64> for Dual {
    type Output = Dual;
    #[inline]
    fn div(self, rhs: f64) -> Dual {
        Dual::new(self.value / rhs, self.deriv / rhs)
    }
}

impl AddAssign for Dual {
    #[inline]
    fn add_assign(&mut self, rhs: Dual) {
        *self = *self + rhs;
    }
}

impl SubAssign for Dual {
    #[inline]
    fn sub_assign(&mut self, rhs: Dual) {
        *self = *self - rhs;
    }
}

impl MulAssign for Dual {
    #[inline]
    fn mul_assign(&mut self, rhs: Dual) {
        *self = *self * rhs;
    }
}

/// Derivative of a scalar function of one variable by forward mode.
pub fn derivative(f: impl Fn(Dual) -> Dual, x: f64) -> f64 {
    f(Dual::variable(x)).deriv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_is_exact_on_integers() {
        let a = Dual::new(3.0, 2.0);
        let b = Dual::new(-4.0, 5.0);
        let p = a * b;
        assert_eq!(p.value, -12.0);
        assert_eq!(p.deriv, 2.0 * -4.0 + 3.0 * 5.0);
    }

    #[test]
    fn quotient_rule() {
        // d/dx (x / (1 + x)) = 1 / (1 + x)^2
        let d = derivative(|x| x / (x + 1.0), 1.0);
        assert!((d - 0.25).abs() < 1e-15);
    }

    #[test]
    fn powi_zero_is_constant() {
        let d = Dual::variable(2.0).powi(0);
        assert_eq!(d, Dual::constant(1.0));
    }

    #[test]
    fn elementary_functions_at_known_points() {
        assert_eq!(derivative(|x| x.sin(), 0.0), 1.0);
        assert_eq!(derivative(|x| x.cos(), 0.0), 0.0);
        assert_eq!(derivative(|x| x.exp(), 0.0), 1.0);
        assert_eq!(derivative(|x| x.ln(), 1.0), 1.0);
        assert_eq!(derivative(|x| x.sqrt(), 4.0), 0.25);
        assert_eq!(derivative(|x| x.powi(3), 2.0), 12.0);
        assert_eq!(derivative(|x| x.recip(), 2.0), -0.25);
    }
}
