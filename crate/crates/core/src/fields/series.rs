//! Truncated univariate Taylor series.
//!
//! Radial profiles are built as series in `r` about a point so that several
//! derivatives can be taken symbolically (the profile ODEs consume up to the
//! fourth derivative of the input bump, and the tensor needs two more).

use super::jet::Jet2;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of retained derivative orders.
pub const ORDER: usize = 6;
const LEN: usize = ORDER + 1;

/// `coeffs[k] = f^(k)(r0) / k!`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series {
    coeffs: [f64; LEN],
}

impl Series {
    pub const fn constant(v: f64) -> Self {
        let mut coeffs = [0.0; LEN];
        coeffs[0] = v;
        Series { coeffs }
    }

    /// The identity function expanded about `r0`.
    pub fn variable(r0: f64) -> Self {
        let mut s = Series::constant(r0);
        s.coeffs[1] = 1.0;
        s
    }

    pub fn zero() -> Self {
        Series::constant(0.0)
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative_value(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeffs[k] * fact
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    /// Series of `f'`. The highest coefficient is lost.
    pub fn derivative(&self) -> Self {
        let mut out = Series::zero();
        for k in 0..ORDER {
            out.coeffs[k] = (k + 1) as f64 * self.coeffs[k + 1];
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn recip(&self) -> Self {
        let a0 = self.coeffs[0];
        let mut r = Series::zero();
        r.coeffs[0] = 1.0 / a0;
        for k in 1..LEN {
            let s: f64 = (1..=k).map(|i| self.coeffs[i] * r.coeffs[k - i]).sum();
            r.coeffs[k] = -s / a0;
        }
        r
    }

    pub fn exp(&self) -> Self {
        let mut e = Series::zero();
        e.coeffs[0] = self.coeffs[0].exp();
        for k in 1..LEN {
            let s: f64 = (1..=k).map(|i| i as f64 * self.coeffs[i] * e.coeffs[k - i]).sum();
            e.coeffs[k] = s / k as f64;
        }
        e
    }

    pub fn ln(&self) -> Self {
        let a0 = self.coeffs[0];
        let mut l = Series::zero();
        l.coeffs[0] = a0.ln();
        for k in 1..LEN {
            let s: f64 = (1..k).map(|i| i as f64 * l.coeffs[i] * self.coeffs[k - i]).sum();
            l.coeffs[k] = (self.coeffs[k] - s / k as f64) / a0;
        }
        l
    }

    pub fn sqrt(&self) -> Self {
        let mut s = Series::zero();
        s.coeffs[0] = self.coeffs[0].sqrt();
        for k in 1..LEN {
            let acc: f64 = (1..k).map(|i| s.coeffs[i] * s.coeffs[k - i]).sum();
            s.coeffs[k] = (self.coeffs[k] - acc) / (2.0 * s.coeffs[0]);
        }
        s
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Series::constant(1.0);
        for _ in 0..k {
            out = out * *self;
        }
        out
    }

    /// Lifts `f(r)` to a function of the jet `r`, using `f`, `f'`, `f''`.
    pub fn compose_jet(&self, r: &Jet2) -> Jet2 {
        r.compose(self.coeffs[0], self.coeffs[1], 2.0 * self.coeffs[2])
    }
}

impl Add for Series {
    type Output = Series;
    fn add(mut self, rhs: Series) -> Series {
        for k in 0..LEN {
            self.coeffs[k] += rhs.coeffs[k];
        }
        self
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(mut self, rhs: Series) -> Series {
        for k in 0..LEN {
            self.coeffs[k] -= rhs.coeffs[k];
        }
        self
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1.0)
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        let mut out = Series::zero();
        for k in 0..LEN {
            out.coeffs[k] = (0..=k).map(|i| self.coeffs[i] * rhs.coeffs[k - i]).sum();
        }
        out
    }
}

impl Div for Series {
    type Output = Series;
    fn div(self, rhs: Series) -> Series {
        self * rhs.recip()
    }
}

impl Add<f64> for Series {
    type Output = Series;
    fn add(mut self, rhs: f64) -> Series {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Series {
    type Output = Series;
    fn sub(mut self, rhs: f64) -> Series {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for Series {
    type Output = Series;
    fn mul(self, rhs: f64) -> Series {
        self.scale(rhs)
    }
}

impl Mul<Series> for f64 {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        rhs.scale(self)
    }
}

impl Sub<Series> for f64 {
    type Output = Series;
    fn sub(self, rhs: Series) -> Series {
        (-rhs) + self
    }
}
