//! Spectral bases for the Dirichlet problems: Chebyshev polynomials in
//! `s = |x|²` for rotationally symmetric data, and Legendre products of total
//! degree `≤ D` times the bubble `1 − |x|²/ρ²` on the ball.

use crate::fields::{jet, Jet2};

/// Chebyshev–Gauss–Lobatto points `cos(πj/N)`, `j = 0..=N`, and the first
/// differentiation matrix (row-major) on them.
pub(crate) fn chebyshev(npts: usize) -> (Vec<f64>, Vec<f64>) {
    let nn = npts;
    let m = nn + 1;
    let x: Vec<f64> = (0..m).map(|j| (std::f64::consts::PI * j as f64 / nn as f64).cos()).collect();
    let c = |j: usize| (if j == 0 || j == nn { 2.0 } else { 1.0 }) * if j % 2 == 0 { 1.0 } else { -1.0 };
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            if i != j {
                d[i * m + j] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    // negative-sum trick for the diagonal
    for i in 0..m {
        let s: f64 = (0..m).filter(|j| *j != i).map(|j| d[i * m + j]).sum();
        d[i * m + i] = -s;
    }
    (x, d)
}

/// Chebyshev coefficients of the interpolant through values at the
/// Gauss–Lobatto points.
pub(crate) fn chebyshev_coefficients(values: &[f64]) -> Vec<f64> {
    let m = values.len();
    let nn = m - 1;
    (0..m)
        .map(|k| {
            let mut s = 0.0;
            for (j, v) in values.iter().enumerate() {
                let w = if j == 0 || j == nn { 0.5 } else { 1.0 };
                s += w * v * (std::f64::consts::PI * (k * j) as f64 / nn as f64).cos();
            }
            let scale = if k == 0 || k == nn { 1.0 / nn as f64 } else { 2.0 / nn as f64 };
            s * scale
        })
        .collect()
}

/// `Σ a_k T_k(ξ)` by Clenshaw's recurrence.
fn clenshaw(coeffs: &[f64], xi: Jet2) -> Jet2 {
    let mut b1 = xi * 0.0;
    let mut b2 = xi * 0.0;
    for a in coeffs.iter().skip(1).rev() {
        let b0 = xi * b1 * 2.0 - b2 + *a;
        b2 = b1;
        b1 = b0;
    }
    xi * b1 - b2 + coeffs[0]
}

/// Legendre polynomials `P_0..=P_deg` of a jet.
pub(crate) fn legendre(z: Jet2, deg: usize) -> Vec<Jet2> {
    let mut p = Vec::with_capacity(deg + 1);
    p.push(z * 0.0 + 1.0);
    if deg >= 1 {
        p.push(z);
    }
    for k in 1..deg {
        let kf = k as f64;
        let next = (z * p[k] * (2.0 * kf + 1.0) - p[k - 1] * kf) * (1.0 / (kf + 1.0));
        p.push(next);
    }
    p
}

/// Multi-indices of total degree at most `deg` in `dim` variables.
pub(crate) fn multi_indices(dim: usize, deg: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == dim {
            out.push(cur.clone());
            return;
        }
        for a in 0..=left {
            cur.push(a);
            rec(dim, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, deg, &mut Vec::new(), &mut out);
    out
}

/// A function vanishing on the boundary sphere, in one of the two bases.
#[derive(Clone, Debug, PartialEq)]
pub enum Expansion {
    /// Chebyshev series in `ξ = 2|x|²/ρ² − 1`.
    Radial { rho: f64, coeffs: Vec<f64> },
    /// `(1 − |x|²/ρ²) Σ c_a Π_i P_{a_i}(x_i/ρ)`.
    Ball { rho: f64, degree: usize, coeffs: Vec<f64> },
}

impl Expansion {
    pub fn zero_radial(rho: f64) -> Self {
        Expansion::Radial { rho, coeffs: vec![0.0] }
    }

    pub fn eval(&self, x: &[Jet2]) -> Jet2 {
        match self {
            Expansion::Radial { rho, coeffs } => {
                let xi = jet::norm_sq(x) * (2.0 / (rho * rho)) - 1.0;
                clenshaw(coeffs, xi)
            }
            Expansion::Ball { rho, degree, coeffs } => {
                let dim = x.len();
                let polys: Vec<Vec<Jet2>> = x.iter().map(|v| legendre(*v * (1.0 / rho), *degree)).collect();
                let mut s = x[0] * 0.0;
                for (idx, c) in multi_indices(dim, *degree).iter().zip(coeffs) {
                    if *c == 0.0 {
                        continue;
                    }
                    let mut term = polys[0][idx[0]];
                    for i in 1..dim {
                        term = term * polys[i][idx[i]];
                    }
                    s += term * *c;
                }
                let bubble = 1.0 - jet::norm_sq(x) * (1.0 / (rho * rho));
                s * bubble
            }
        }
    }

    pub fn value_at(&self, p: &[f64]) -> f64 {
        let x: Vec<Jet2> = p.iter().map(|v| Jet2::constant(*v)).collect();
        self.eval(&x).value()
    }

    /// Number of coefficients.
    pub fn len(&self) -> usize {
        match self {
            Expansion::Radial { coeffs, .. } | Expansion::Ball { coeffs, .. } => coeffs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
