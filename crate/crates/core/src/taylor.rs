//! Truncated univariate Taylor arithmetic.
//!
//! A `Taylor<N>` holds the normalized coefficients `f^(k)(t0) / k!` for
//! `k < N`. Arithmetic and the elementary functions below propagate those
//! coefficients exactly (up to rounding), which gives closed-form
//! derivatives of composite expressions without any differencing.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Taylor<const N: usize>(pub [f64; N]);

impl<const N: usize> Taylor<N> {
    pub fn constant(c: f64) -> Self {
        let mut a = [0.0; N];
        a[0] = c;
        Taylor(a)
    }

    /// The independent variable expanded around `t0`.
    pub fn variable(t0: f64) -> Self {
        let mut a = [0.0; N];
        a[0] = t0;
        if N > 1 {
            a[1] = 1.0;
        }
        Taylor(a)
    }

    /// Builds an expansion from plain derivatives `[f, f', f'', ...]`.
    pub fn from_derivatives(d: [f64; N]) -> Self {
        let mut a = d;
        let mut fact = 1.0;
        for (k, c) in a.iter_mut().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            *c /= fact;
        }
        Taylor(a)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.0[k] * fact
    }

    pub fn derivatives(&self) -> [f64; N] {
        let mut out = [0.0; N];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.derivative(k);
        }
        out
    }

    pub fn scale(self, c: f64) -> Self {
        Taylor(self.0.map(|x| x * c))
    }

    pub fn sqrt(self) -> Self {
        let a = &self.0;
        let mut b = [0.0; N];
        b[0] = a[0].sqrt();
        for k in 1..N {
            let mut acc = a[k];
            for j in 1..k {
                acc -= b[j] * b[k - j];
            }
            b[k] = acc / (2.0 * b[0]);
        }
        Taylor(b)
    }

    pub fn sin_cos(self) -> (Self, Self) {
        let a = &self.0;
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..N {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                let w = j as f64 * a[j];
                ss += w * c[k - j];
                cc -= w * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = cc / k as f64;
        }
        (Taylor(s), Taylor(c))
    }

    pub fn sin(self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(self) -> Self {
        self.sin_cos().1
    }

    /// `asin` through `b' = a' / sqrt(1 - a^2)`.
    pub fn asin(self) -> Self {
        let w = (Self::constant(1.0) - self * self).sqrt();
        let a = &self.0;
        let mut b = [0.0; N];
        b[0] = a[0].asin();
        for k in 1..N {
            let mut acc = k as f64 * a[k];
            for (j, bj) in b.iter().enumerate().take(k).skip(1) {
                acc -= j as f64 * bj * w.0[k - j];
            }
            b[k] = acc / (k as f64 * w.0[0]);
        }
        Taylor(b)
    }
}

impl<const N: usize> Add for Taylor<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(rhs.0) {
            *x += y;
        }
        Taylor(a)
    }
}

impl<const N: usize> Sub for Taylor<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(rhs.0) {
            *x -= y;
        }
        Taylor(a)
    }
}

impl<const N: usize> Neg for Taylor<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const N: usize> Mul for Taylor<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = [0.0; N];
        for (k, ck) in c.iter_mut().enumerate() {
            for j in 0..=k {
                *ck += self.0[j] * rhs.0[k - j];
            }
        }
        Taylor(c)
    }
}

impl<const N: usize> Div for Taylor<N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let b = &rhs.0;
        let mut c = [0.0; N];
        for k in 0..N {
            let mut acc = self.0[k];
            for j in 1..=k {
                acc -= b[j] * c[k - j];
            }
            c[k] = acc / b[0];
        }
        Taylor(c)
    }
}

impl<const N: usize> Add<f64> for Taylor<N> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.0[0] += rhs;
        self
    }
}

impl<const N: usize> Mul<f64> for Taylor<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type T5 = Taylor<5>;

    #[test]
    fn sin_derivatives_cycle() {
        let t0 = 0.7;
        let d = T5::variable(t0).sin().derivatives();
        let want = [t0.sin(), t0.cos(), -t0.sin(), -t0.cos(), t0.sin()];
        for (a, b) in d.iter().zip(want) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn product_matches_leibniz() {
        // d^4/dt^4 (t^2 cos t) = t^2 cos t + 8 t sin t - 12 cos t
        let t0 = 0.3;
        let t = T5::variable(t0);
        let f = t * t * t.cos();
        let (s, c) = (t0.sin(), t0.cos());
        let d4 = t0 * t0 * c + 8.0 * t0 * s - 12.0 * c;
        assert_relative_eq!(f.derivative(4), d4, epsilon = 1e-13);
        let d1 = 2.0 * t0 * c - t0 * t0 * s;
        assert_relative_eq!(f.derivative(1), d1, epsilon = 1e-14);
    }

    #[test]
    fn sqrt_and_division() {
        let t0 = 2.0;
        let t = T5::variable(t0);
        let f = (t * t + 1.0).sqrt();
        // f' = t / sqrt(t^2+1), f'' = (t^2+1)^{-3/2}
        assert_relative_eq!(f.derivative(1), t0 / 5f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(f.derivative(2), 5f64.powf(-1.5), epsilon = 1e-14);
        let g = T5::constant(1.0) / t;
        // d^3 (1/t) = -6 / t^4
        assert_relative_eq!(g.derivative(3), -6.0 / 16.0, epsilon = 1e-14);
    }

    #[test]
    fn asin_derivatives() {
        let t0 = 0.4;
        let f = T5::variable(t0).asin();
        let w = 1.0 - t0 * t0;
        assert_relative_eq!(f.value(), t0.asin(), epsilon = 1e-15);
        assert_relative_eq!(f.derivative(1), w.powf(-0.5), epsilon = 1e-14);
        assert_relative_eq!(f.derivative(2), t0 * w.powf(-1.5), epsilon = 1e-14);
        let d3 = (1.0 + 2.0 * t0 * t0) * w.powf(-2.5);
        assert_relative_eq!(f.derivative(3), d3, epsilon = 1e-13);
    }
}
