//! Second-order forward-mode jets.
//!
//! A [`Jet2`] carries the value, gradient and Hessian of a quantity with
//! respect to up to [`MAX_DIM`] independent variables. Arithmetic on jets is
//! the truncated multivariate Taylor algebra, so composing analytic
//! expressions yields exact first and second partial derivatives (up to
//! rounding) without any differencing.
//!
//! Binary operations between jets with different variable counts use the
//! larger count; constants carry zero variables.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Largest number of independent variables a jet can track.
pub const MAX_DIM: usize = 6;
const PACKED: usize = MAX_DIM * (MAX_DIM + 1) / 2;

#[inline]
fn pidx(i: usize, j: usize) -> usize {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    value: f64,
    nvars: u8,
    grad: [f64; MAX_DIM],
    hess: [f64; PACKED],
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.nvars();
        f.debug_struct("Jet2")
            .field("value", &self.value)
            .field("grad", &&self.grad[..n])
            .field("hess", &&self.hess[..n * (n + 1) / 2])
            .finish()
    }
}

impl Default for Jet2 {
    fn default() -> Self {
        Jet2::constant(0.0)
    }
}

impl From<f64> for Jet2 {
    fn from(v: f64) -> Self {
        Jet2::constant(v)
    }
}

impl Jet2 {
    pub const fn constant(value: f64) -> Self {
        Jet2 { value, nvars: 0, grad: [0.0; MAX_DIM], hess: [0.0; PACKED] }
    }

    /// The `index`-th coordinate function evaluated at `value`, in a space of
    /// `nvars` variables.
    pub fn variable(value: f64, index: usize, nvars: usize) -> Self {
        assert!(nvars <= MAX_DIM && index < nvars, "jet variable {index} of {nvars} out of range");
        let mut j = Jet2::constant(value);
        j.nvars = nvars as u8;
        j.grad[index] = 1.0;
        j
    }

    /// Seeds all coordinates of a point as independent variables.
    pub fn seed(point: &[f64]) -> Vec<Jet2> {
        let n = point.len();
        point.iter().enumerate().map(|(i, &v)| Jet2::variable(v, i, n)).collect()
    }

    /// Builds a jet from explicit derivative data. `hess` is read as a full
    /// `nvars x nvars` row-major matrix and symmetrised.
    pub fn from_parts(value: f64, grad: &[f64], hess: &[f64]) -> Self {
        let n = grad.len();
        assert!(n <= MAX_DIM && hess.len() == n * n);
        let mut j = Jet2::constant(value);
        j.nvars = n as u8;
        j.grad[..n].copy_from_slice(grad);
        for a in 0..n {
            for b in 0..=a {
                j.hess[pidx(a, b)] = 0.5 * (hess[a * n + b] + hess[b * n + a]);
            }
        }
        j
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    #[inline]
    pub fn grad(&self, i: usize) -> f64 {
        self.grad[i]
    }

    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[pidx(i, j)]
    }

    pub fn gradient(&self) -> Vec<f64> {
        self.grad[..self.nvars()].to_vec()
    }

    /// Full row-major Hessian.
    pub fn hessian(&self) -> Vec<f64> {
        let n = self.nvars();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.hess(i, j);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        let n = self.nvars();
        self.value.is_finite()
            && self.grad[..n].iter().all(|v| v.is_finite())
            && self.hess[..n * (n + 1) / 2].iter().all(|v| v.is_finite())
    }

    /// `f(self)` given `f`, `f'` and `f''` at `self.value()`.
    #[inline]
    pub fn compose(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let n = self.nvars();
        let mut out = Jet2::constant(f0);
        out.nvars = self.nvars;
        for i in 0..n {
            out.grad[i] = f1 * self.grad[i];
        }
        for j in 0..n {
            for i in 0..=j {
                let k = pidx(i, j);
                out.hess[k] = f1 * self.hess[k] + f2 * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let r = 1.0 / self.value;
        self.compose(r, -r * r, 2.0 * r * r * r)
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let x = self.value;
        self.compose(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn powi(&self, k: i32) -> Self {
        let x = self.value;
        match k {
            0 => Jet2::constant(1.0),
            1 => *self,
            2 => *self * *self,
            _ => {
                let kf = k as f64;
                self.compose(x.powi(k), kf * x.powi(k - 1), kf * (kf - 1.0) * x.powi(k - 2))
            }
        }
    }

    pub fn powf(&self, p: f64) -> Self {
        let x = self.value;
        self.compose(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose(s, c, s)
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose(c, s, c)
    }

    pub fn tanh(&self) -> Self {
        let t = self.value.tanh();
        let d = 1.0 - t * t;
        self.compose(t, d, -2.0 * t * d)
    }

    pub fn atanh(&self) -> Self {
        let x = self.value;
        let d = 1.0 / (1.0 - x * x);
        self.compose(x.atanh(), d, 2.0 * x * d * d)
    }

    pub fn atan(&self) -> Self {
        let x = self.value;
        let d = 1.0 / (1.0 + x * x);
        self.compose(x.atan(), d, -2.0 * x * d * d)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.value *= s;
        let n = self.nvars();
        for v in &mut out.grad[..n] {
            *v *= s;
        }
        for v in &mut out.hess[..n * (n + 1) / 2] {
            *v *= s;
        }
        out
    }

    /// Drops derivative information beyond `nvars` and relabels the variable
    /// count. Used when a jet built in an `n`-dimensional space is known to
    /// depend on fewer variables.
    pub fn truncate_vars(&self, nvars: usize) -> Self {
        let mut out = Jet2::constant(self.value);
        let n = nvars.min(self.nvars());
        out.nvars = nvars as u8;
        out.grad[..n].copy_from_slice(&self.grad[..n]);
        out.hess[..n * (n + 1) / 2].copy_from_slice(&self.hess[..n * (n + 1) / 2]);
        out
    }
}

/// Dot product of two jet vectors.
pub fn dot(a: &[Jet2], b: &[Jet2]) -> Jet2 {
    a.iter().zip(b).fold(Jet2::constant(0.0), |acc, (x, y)| acc + *x * *y)
}

/// Squared Euclidean norm of a jet vector.
pub fn norm_sq(a: &[Jet2]) -> Jet2 {
    dot(a, a)
}

impl Add for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(self, rhs: Jet2) -> Jet2 {
        let n = self.nvars().max(rhs.nvars());
        let mut out = self;
        out.nvars = n as u8;
        out.value += rhs.value;
        for i in 0..rhs.nvars() {
            out.grad[i] += rhs.grad[i];
        }
        let m = rhs.nvars();
        for k in 0..m * (m + 1) / 2 {
            out.hess[k] += rhs.hess[k];
        }
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    #[inline]
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, rhs: Jet2) -> Jet2 {
        let n = self.nvars().max(rhs.nvars());
        let (a, b) = (self.value, rhs.value);
        let mut out = Jet2::constant(a * b);
        out.nvars = n as u8;
        for i in 0..n {
            out.grad[i] = a * rhs.grad[i] + b * self.grad[i];
        }
        for j in 0..n {
            for i in 0..=j {
                let k = pidx(i, j);
                out.hess[k] = a * rhs.hess[k]
                    + b * self.hess[k]
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i];
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[inline]
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn div(self, rhs: f64) -> Jet2 {
        self.scale(1.0 / rhs)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    #[inline]
    fn add(self, rhs: Jet2) -> Jet2 {
        rhs + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    #[inline]
    fn sub(self, rhs: Jet2) -> Jet2 {
        (-rhs) + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    #[inline]
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs.scale(self)
    }
}

impl Div<Jet2> for f64 {
    type Output = Jet2;
    #[inline]
    fn div(self, rhs: Jet2) -> Jet2 {
        rhs.recip().scale(self)
    }
}

impl AddAssign for Jet2 {
    #[inline]
    fn add_assign(&mut self, rhs: Jet2) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet2 {
    #[inline]
    fn sub_assign(&mut self, rhs: Jet2) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet2 {
    #[inline]
    fn mul_assign(&mut self, rhs: Jet2) {
        *self = *self * rhs;
    }
}

impl MulAssign<f64> for Jet2 {
    #[inline]
    fn mul_assign(&mut self, rhs: f64) {
        *self = self.scale(rhs);
    }
}

impl std::iter::Sum for Jet2 {
    fn sum<I: Iterator<Item = Jet2>>(iter: I) -> Jet2 {
        iter.fold(Jet2::constant(0.0), |a, b| a + b)
    }
}
