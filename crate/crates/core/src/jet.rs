//! Truncated Taylor arithmetic for exact derivatives of closed-form profiles.
//!
//! A [`Jet`] holds the Taylor coefficients `c[r] = f^(r)(x0) / r!` for
//! `r = 0..ORDER`. Arithmetic propagates all coefficients, so composing
//! elementary functions yields analytic derivatives through order 4.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const ORDER: usize = 5;

const FACTORIAL: [f64; ORDER] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [f64; ORDER]);

impl Jet {
    pub fn constant(c: f64) -> Self {
        let mut a = [0.0; ORDER];
        a[0] = c;
        Jet(a)
    }

    /// The identity function expanded at `x`.
    pub fn variable(x: f64) -> Self {
        let mut a = [0.0; ORDER];
        a[0] = x;
        a[1] = 1.0;
        Jet(a)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// The r-th derivative at the expansion point.
    pub fn derivative(&self, r: usize) -> f64 {
        self.0[r] * FACTORIAL[r]
    }

    pub fn derivatives(&self) -> [f64; ORDER] {
        let mut d = [0.0; ORDER];
        for (r, v) in d.iter_mut().enumerate() {
            *v = self.derivative(r);
        }
        d
    }

    pub fn scale(self, s: f64) -> Self {
        Jet(self.0.map(|c| c * s))
    }

    pub fn exp(self) -> Self {
        let a = self.0;
        let mut b = [0.0; ORDER];
        b[0] = a[0].exp();
        for n in 1..ORDER {
            let mut s = 0.0;
            for k in 1..=n {
                s += k as f64 * a[k] * b[n - k];
            }
            b[n] = s / n as f64;
        }
        Jet(b)
    }

    pub fn recip(self) -> Self {
        let a = self.0;
        let mut b = [0.0; ORDER];
        b[0] = 1.0 / a[0];
        for n in 1..ORDER {
            let mut s = 0.0;
            for k in 1..=n {
                s += a[k] * b[n - k];
            }
            b[n] = -s * b[0];
        }
        Jet(b)
    }

    pub fn powi(self, n: u32) -> Self {
        let mut result = Jet::constant(1.0);
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            e >>= 1;
        }
        result
    }

    /// Antiderivative with the given value at the expansion point. The
    /// highest coefficient of `self` is dropped.
    pub fn integrate(self, value: f64) -> Self {
        let mut b = [0.0; ORDER];
        b[0] = value;
        for r in 1..ORDER {
            b[r] = self.0[r - 1] / r as f64;
        }
        Jet(b)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(o.0) {
            *x += y;
        }
        Jet(a)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet(self.0.map(|c| -c))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; ORDER];
        for i in 0..ORDER {
            for j in 0..ORDER - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(c)
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, c: f64) -> Jet {
        self.0[0] += c;
        self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        -o + self
    }
}
