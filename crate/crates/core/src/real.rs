//! Scalar types the profile formulas are written against.
//!
//! Every metric model evaluates through [`Real`], so the same closed-form
//! expression can be run as plain `f64`, as a second-order [`Jet`] (exact
//! first and second derivatives by forward-mode differentiation), or in
//! double-double precision ([`Dd`]) for the finite-difference oracle.

use std::ops::{Add, Div, Mul, Neg, Sub};

use twofloat::TwoFloat;

pub trait Real:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn cst(x: f64) -> Self;
    fn sqrt(self) -> Self;
    /// Leading `f64` part of the value.
    fn value(self) -> f64;

    fn recip(self) -> Self {
        Self::cst(1.0) / self
    }

    fn sq(self) -> Self {
        self * self
    }
}

impl Real for f64 {
    #[inline]
    fn cst(x: f64) -> Self {
        x
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn value(self) -> f64 {
        self
    }
}

/// Truncated Taylor jet `(f, f', f'')` in one variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    /// The independent variable seeded at `x`.
    pub const fn var(x: f64) -> Self {
        Self::new(x, 1.0, 0.0)
    }

    pub const fn constant(x: f64) -> Self {
        Self::new(x, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, o: Jet) -> Jet {
        Jet::new(self.v * o.v, self.d1 * o.v + self.v * o.d1, self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2)
    }
}

impl Div for Jet {
    type Output = Jet;
    #[inline]
    fn div(self, o: Jet) -> Jet {
        let inv = 1.0 / o.v;
        let r = Jet::new(inv, -o.d1 * inv * inv, (2.0 * o.d1 * o.d1 - o.v * o.d2) * inv * inv * inv);
        self * r
    }
}

impl Neg for Jet {
    type Output = Jet;
    #[inline]
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d1, -self.d2)
    }
}

impl Real for Jet {
    #[inline]
    fn cst(x: f64) -> Self {
        Jet::constant(x)
    }

    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let d1 = self.d1 / (2.0 * s);
        let d2 = self.d2 / (2.0 * s) - self.d1 * self.d1 / (4.0 * s * s * s);
        Jet::new(s, d1, d2)
    }

    #[inline]
    fn value(self) -> f64 {
        self.v
    }
}

/// Double-double scalar backed by `twofloat`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Dd(pub TwoFloat);

impl Dd {
    pub fn hi(self) -> f64 {
        self.0.hi()
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd(TwoFloat::from(x))
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, o: Dd) -> Dd {
        Dd(self.0 + o.0)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, o: Dd) -> Dd {
        Dd(self.0 - o.0)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, o: Dd) -> Dd {
        Dd(self.0 * o.0)
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, o: Dd) -> Dd {
        // Long division in three f64 quotient digits; twofloat's own quotient
        // drops the low word when the divisor's reciprocal rounds.
        let b = o.0;
        let q1 = self.0.hi() / b.hi();
        let r = self.0 - b * q1;
        let q2 = r.hi() / b.hi();
        let r = r - b * q2;
        let q3 = r.hi() / b.hi();
        Dd(TwoFloat::new_add(q1, q2) + q3)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Real for Dd {
    #[inline]
    fn cst(x: f64) -> Self {
        Dd(TwoFloat::from(x))
    }
    fn sqrt(self) -> Self {
        Dd(self.0.sqrt())
    }
    #[inline]
    fn value(self) -> f64 {
        f64::from(self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly<T: Real>(x: T) -> T {
        // x^3 / (1 + x) + sqrt(x)
        x * x * x / (T::cst(1.0) + x) + x.sqrt()
    }

    #[test]
    fn jet_matches_hand_derivatives() {
        let x = 1.7_f64;
        let j = poly(Jet::var(x));
        let f = x.powi(3) / (1.0 + x) + x.sqrt();
        let d1 = (3.0 * x * x * (1.0 + x) - x.powi(3)) / (1.0 + x).powi(2) + 0.5 / x.sqrt();
        // d/dx of (2x^3 + 3x^2)/(1+x)^2 is (6x^2+6x)/(1+x)^2 - 2(2x^3+3x^2)/(1+x)^3
        let d2 = (6.0 * x * x + 6.0 * x) / (1.0 + x).powi(2)
            - 2.0 * (2.0 * x.powi(3) + 3.0 * x * x) / (1.0 + x).powi(3)
            - 0.25 * x.powf(-1.5);
        assert!((j.v - f).abs() < 1e-14);
        assert!((j.d1 - d1).abs() < 1e-13);
        assert!((j.d2 - d2).abs() < 1e-13);
    }

    #[test]
    fn double_double_carries_extra_digits() {
        let third = Dd::cst(1.0) / Dd::cst(3.0);
        let back = third * Dd::cst(3.0) - Dd::cst(1.0);
        assert!(back.value().abs() < 1e-30);
        let s = Dd::cst(2.0).sqrt();
        assert!((s * s - Dd::cst(2.0)).value().abs() < 1e-30);
    }
}
