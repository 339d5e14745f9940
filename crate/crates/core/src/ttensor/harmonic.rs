//! Spherical harmonics as restrictions of homogeneous harmonic polynomials.

use crate::error::{Error, Result};
use crate::fields::{jet, Jet2, MAX_DIM};

/// Degree-0 extension `Ŷ(y) = P(y)/|y|^ℓ` of a harmonic and its Euclidean
/// gradient and Hessian (row-major), all as jets in `y`.
#[derive(Clone, Debug)]
pub struct HarmonicJets {
    pub value: Jet2,
    pub gradient: Vec<Jet2>,
    pub hessian: Vec<Jet2>,
}

/// `Y = P|_{S^m}` for a homogeneous harmonic polynomial `P` on `ℝ^{m+1}` of
/// degree 1 (`P = v·y`) or 2 (`P = yᵀAy`, `A` symmetric trace-free).
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalHarmonic {
    sphere_dim: usize,
    degree: u32,
    /// `v` for degree 1, row-major `A` for degree 2.
    coeffs: Vec<f64>,
    label: String,
}

impl SphericalHarmonic {
    fn check_dim(sphere_dim: usize) -> Result<usize> {
        if sphere_dim < 2 || sphere_dim + 1 > MAX_DIM {
            return Err(Error::InvalidParameter(format!("sphere dimension {sphere_dim} not supported")));
        }
        Ok(sphere_dim + 1)
    }

    /// `y_i y_j` with `i ≠ j`.
    pub fn product(sphere_dim: usize, i: usize, j: usize) -> Result<Self> {
        let n = Self::check_dim(sphere_dim)?;
        if i == j || i >= n || j >= n {
            return Err(Error::InvalidParameter(format!("product harmonic needs distinct indices below {n}")));
        }
        let mut a = vec![0.0; n * n];
        a[i * n + j] = 0.5;
        a[j * n + i] = 0.5;
        Ok(SphericalHarmonic { sphere_dim, degree: 2, coeffs: a, label: format!("y{i}*y{j}") })
    }

    /// `y_i² − y_j²` with `i ≠ j`.
    pub fn difference(sphere_dim: usize, i: usize, j: usize) -> Result<Self> {
        let n = Self::check_dim(sphere_dim)?;
        if i == j || i >= n || j >= n {
            return Err(Error::InvalidParameter(format!("difference harmonic needs distinct indices below {n}")));
        }
        let mut a = vec![0.0; n * n];
        a[i * n + i] = 1.0;
        a[j * n + j] = -1.0;
        Ok(SphericalHarmonic { sphere_dim, degree: 2, coeffs: a, label: format!("y{i}^2-y{j}^2") })
    }

    /// `yᵀAy` for a symmetric trace-free nonzero matrix `A` (row-major).
    pub fn quadratic(sphere_dim: usize, matrix: &[f64]) -> Result<Self> {
        let n = Self::check_dim(sphere_dim)?;
        if matrix.len() != n * n {
            return Err(Error::InvalidParameter(format!("expected {} matrix entries", n * n)));
        }
        let scale = matrix.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return Err(Error::InvalidParameter("harmonic matrix is zero".into()));
        }
        let trace: f64 = (0..n).map(|i| matrix[i * n + i]).sum();
        let asym = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .fold(0.0f64, |m, (i, j)| m.max((matrix[i * n + j] - matrix[j * n + i]).abs()));
        if trace.abs() > 1e-12 * scale || asym > 1e-12 * scale {
            return Err(Error::InvalidParameter("harmonic matrix must be symmetric and trace-free".into()));
        }
        Ok(SphericalHarmonic { sphere_dim, degree: 2, coeffs: matrix.to_vec(), label: "quadratic".into() })
    }

    /// `v·y`: a first eigenfunction. Accepted here so the excluded eigenvalue
    /// can be represented; the profile solver rejects it.
    pub fn linear(sphere_dim: usize, v: &[f64]) -> Result<Self> {
        let n = Self::check_dim(sphere_dim)?;
        if v.len() != n || v.iter().all(|c| *c == 0.0) {
            return Err(Error::InvalidParameter(format!("expected a nonzero vector of length {n}")));
        }
        Ok(SphericalHarmonic { sphere_dim, degree: 1, coeffs: v.to_vec(), label: "linear".into() })
    }

    /// The default degree-2 catalogue: `y_i y_j` for `i < j`, then
    /// `y_0² − y_i²`.
    pub fn catalogue(sphere_dim: usize) -> Result<Vec<Self>> {
        let n = Self::check_dim(sphere_dim)?;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                out.push(Self::product(sphere_dim, i, j)?);
            }
        }
        for i in 1..n {
            out.push(Self::difference(sphere_dim, 0, i)?);
        }
        Ok(out)
    }

    pub fn sphere_dim(&self) -> usize {
        self.sphere_dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `ℓ(ℓ + m − 1)`.
    pub fn eigenvalue(&self) -> f64 {
        let l = self.degree as f64;
        l * (l + self.sphere_dim as f64 - 1.0)
    }

    fn ambient(&self) -> usize {
        self.sphere_dim + 1
    }

    /// `P(y)`.
    pub fn polynomial(&self, y: &[Jet2]) -> Jet2 {
        let n = self.ambient();
        match self.degree {
            1 => (0..n).map(|i| y[i] * self.coeffs[i]).sum(),
            _ => {
                let mut s = y[0] * 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let a = self.coeffs[i * n + j];
                        if a != 0.0 {
                            s += y[i] * y[j] * a;
                        }
                    }
                }
                s
            }
        }
    }

    fn polynomial_gradient(&self, y: &[Jet2]) -> Vec<Jet2> {
        let n = self.ambient();
        match self.degree {
            1 => (0..n).map(|i| y[i] * 0.0 + self.coeffs[i]).collect(),
            _ => (0..n).map(|i| (0..n).map(|j| y[j] * (2.0 * self.coeffs[i * n + j])).sum()).collect(),
        }
    }

    fn polynomial_hessian(&self, i: usize, j: usize) -> f64 {
        match self.degree {
            1 => 0.0,
            _ => 2.0 * self.coeffs[i * self.ambient() + j],
        }
    }

    /// `Ŷ = P/r^ℓ` with
    ///
    /// ```text
    /// ∇Ŷ  = ∇P r^{-ℓ} − ℓ P y r^{-ℓ-2}
    /// D²Ŷ = D²P r^{-ℓ} − ℓ (∇P yᵀ + y ∇Pᵀ + P I) r^{-ℓ-2} + ℓ(ℓ+2) P y yᵀ r^{-ℓ-4}
    /// ```
    pub fn extension(&self, y: &[Jet2]) -> HarmonicJets {
        let n = self.ambient();
        let l = self.degree as i32;
        let lf = l as f64;
        let r2 = jet::norm_sq(y);
        let inv_r2 = r2.recip();
        let inv_rl = r2.sqrt().powi(-l);
        let p = self.polynomial(y);
        let dp = self.polynomial_gradient(y);
        let value = p * inv_rl;
        let a = inv_rl * inv_r2;
        let gradient: Vec<Jet2> = (0..n).map(|i| (dp[i] - p * y[i] * inv_r2 * lf) * inv_rl).collect();
        let mut hessian = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut term = (dp[i] * y[j] + y[i] * dp[j]) * (-lf);
                if i == j {
                    term -= p * lf;
                }
                term += p * y[i] * y[j] * inv_r2 * (lf * (lf + 2.0));
                hessian.push(inv_rl * self.polynomial_hessian(i, j) + term * a);
            }
        }
        HarmonicJets { value, gradient, hessian }
    }

    /// `|Δ_{S^m} Y + κ Y|` at a point of the unit sphere, computed from the
    /// Euclidean Laplacian of the degree-0 extension by automatic
    /// differentiation (`Δ_{S^m} Y = r² Δ Ŷ`).
    pub fn eigen_defect(&self, omega: &[f64]) -> f64 {
        let y = Jet2::seed(omega);
        let r2 = jet::norm_sq(&y);
        let yhat = self.polynomial(&y) * r2.sqrt().powi(-(self.degree as i32));
        let lap: f64 = (0..self.ambient()).map(|i| yhat.hess(i, i)).sum();
        (r2.value() * lap + self.eigenvalue() * yhat.value()).abs()
    }
}
