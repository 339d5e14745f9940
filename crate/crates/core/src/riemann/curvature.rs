//! Pointwise connection, curvature and covariant derivatives.
//!
//! Index conventions (all arrays row-major, `n` = dimension):
//!
//! * `christoffel[(k n + i) n + j] = Γ^k_{ij}`
//! * `christoffel_grad[((m n + k) n + i) n + j] = ∂_m Γ^k_{ij}`
//! * `riemann[((i n + j) n + k) n + l] = R_{ijkl}` with the sign fixed so that
//!   a space of constant sectional curvature `c` has
//!   `R_{ijkl} = c (g_{ik} g_{jl} - g_{il} g_{jk})`
//! * `ricci[j n + l] = g^{ik} R_{ijkl}`
//!
//! Covariant derivatives of a symmetric tensor use `h_{ij;k}` for `(∇_k h)_{ij}`
//! and `h_{ij;kl}` for `(∇_l ∇_k h)_{ij}`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fields::{Jet2, SymJet};

/// Geometry of a metric at one point.
#[derive(Clone, Debug)]
pub struct CurvaturePoint {
    pub point: Vec<f64>,
    pub dim: usize,
    pub metric: Vec<f64>,
    pub inverse: Vec<f64>,
    pub christoffel: Vec<f64>,
    pub christoffel_grad: Vec<f64>,
    pub riemann: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scalar: f64,
    /// `frame[i n + a]` is coordinate component `i` of the orthonormal vector `e_a`.
    pub frame: Vec<f64>,
    /// Maps coordinate vector components to frame components.
    pub coframe: Vec<f64>,
}

/// Derivatives of a scalar at a point, coordinate components.
#[derive(Clone, Debug)]
pub struct ScalarDerivs {
    pub value: f64,
    pub gradient: Vec<f64>,
    /// `∇²f` as a (0,2) tensor.
    pub hessian: Vec<f64>,
    pub laplacian: f64,
}

/// A symmetric 2-tensor with its first and second covariant derivatives.
#[derive(Clone, Debug)]
pub struct TensorDerivs {
    pub dim: usize,
    /// `h_{ij}`
    pub value: Vec<f64>,
    /// `h_{ij;k}` at `(i n + j) n + k`
    pub first: Vec<f64>,
    /// `h_{ij;kl}` at `((i n + j) n + k) n + l`
    pub second: Vec<f64>,
}

/// Contracts every index of a covariant tensor of rank `rank` with the frame.
pub fn to_frame(data: &[f64], rank: usize, n: usize, frame: &[f64]) -> Vec<f64> {
    let mut cur = data.to_vec();
    for slot in 0..rank {
        let stride = n.pow((rank - 1 - slot) as u32);
        let mut next = vec![0.0; cur.len()];
        for (idx, out) in next.iter_mut().enumerate() {
            let a = (idx / stride) % n;
            let base = idx - a * stride;
            let mut s = 0.0;
            for i in 0..n {
                s += frame[i * n + a] * cur[base + i * stride];
            }
            *out = s;
        }
        cur = next;
    }
    cur
}

impl CurvaturePoint {
    /// Builds the geometry from metric component jets at `point`.
    pub fn from_metric_jets(g: &SymJet, point: &[f64]) -> Result<Self> {
        let n = g.dim();
        let n2 = n * n;
        let n3 = n2 * n;
        let mut metric = vec![0.0; n2];
        let mut dg = vec![0.0; n3]; // ∂_k g_ij at (k n + i) n + j
        let mut ddg = vec![0.0; n2 * n2]; // ∂_k ∂_l g_ij at ((k n + l) n + i) n + j
        for i in 0..n {
            for j in 0..n {
                let c = g.get(i, j);
                metric[i * n + j] = c.value();
                for k in 0..n {
                    dg[(k * n + i) * n + j] = c.grad(k);
                    for l in 0..n {
                        ddg[((k * n + l) * n + i) * n + j] = c.hess(k, l);
                    }
                }
            }
        }
        if !metric.iter().chain(&dg).chain(&ddg).all(|v| v.is_finite()) {
            return Err(Error::Numeric { location: point.to_vec(), what: "metric jet".into() });
        }
        let gm = DMatrix::from_row_slice(n, n, &metric);
        let chol = gm.clone().cholesky().ok_or_else(|| Error::SingularMetric { point: point.to_vec() })?;
        let l = chol.l();
        let l_inv = l.clone().try_inverse().ok_or_else(|| Error::SingularMetric { point: point.to_vec() })?;
        let ginv_m = chol.inverse();
        let mut inverse = vec![0.0; n2];
        let mut frame = vec![0.0; n2];
        let mut coframe = vec![0.0; n2];
        for i in 0..n {
            for j in 0..n {
                inverse[i * n + j] = 0.5 * (ginv_m[(i, j)] + ginv_m[(j, i)]);
                frame[i * n + j] = l_inv[(j, i)];
                coframe[i * n + j] = l[(j, i)];
            }
        }

        // ∂_m g^{kl}
        let mut dginv = vec![0.0; n3];
        for m in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = 0.0;
                    for a in 0..n {
                        for b in 0..n {
                            s += inverse[k * n + a] * dg[(m * n + a) * n + b] * inverse[b * n + l];
                        }
                    }
                    dginv[(m * n + k) * n + l] = -s;
                }
            }
        }

        // lowered Γ_{l ij} and its derivatives
        let mut gamma_low = vec![0.0; n3];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    gamma_low[(l * n + i) * n + j] =
                        0.5 * (dg[(i * n + j) * n + l] + dg[(j * n + i) * n + l] - dg[(l * n + i) * n + j]);
                }
            }
        }
        let mut christoffel = vec![0.0; n3];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += inverse[k * n + l] * gamma_low[(l * n + i) * n + j];
                    }
                    christoffel[(k * n + i) * n + j] = s;
                }
            }
        }
        let mut christoffel_grad = vec![0.0; n2 * n2];
        for m in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            let dlow = 0.5
                                * (ddg[((m * n + i) * n + j) * n + l] + ddg[((m * n + j) * n + i) * n + l]
                                    - ddg[((m * n + l) * n + i) * n + j]);
                            s += dginv[(m * n + k) * n + l] * gamma_low[(l * n + i) * n + j]
                                + inverse[k * n + l] * dlow;
                        }
                        christoffel_grad[((m * n + k) * n + i) * n + j] = s;
                    }
                }
            }
        }

        let gam = |k: usize, i: usize, j: usize| christoffel[(k * n + i) * n + j];
        let dgam = |m: usize, k: usize, i: usize, j: usize| christoffel_grad[((m * n + k) * n + i) * n + j];
        // std[i][j][k][l] = R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ^i_{kp}Γ^p_{lj} − Γ^i_{lp}Γ^p_{kj}
        let mut std_r = vec![0.0; n2 * n2];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = dgam(k, i, l, j) - dgam(l, i, k, j);
                        for p in 0..n {
                            s += gam(i, k, p) * gam(p, l, j) - gam(i, l, p) * gam(p, k, j);
                        }
                        std_r[((i * n + j) * n + k) * n + l] = s;
                    }
                }
            }
        }
        // R_{abcd} = g_{cm} R^m_{dab}
        let mut riemann = vec![0.0; n2 * n2];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut s = 0.0;
                        for m in 0..n {
                            s += metric[c * n + m] * std_r[((m * n + d) * n + a) * n + b];
                        }
                        riemann[((a * n + b) * n + c) * n + d] = s;
                    }
                }
            }
        }
        let mut ricci = vec![0.0; n2];
        for j in 0..n {
            for l in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    for k in 0..n {
                        s += inverse[i * n + k] * riemann[((i * n + j) * n + k) * n + l];
                    }
                }
                ricci[j * n + l] = s;
            }
        }
        let scalar = (0..n2).map(|q| inverse[q] * ricci[q]).sum();
        Ok(CurvaturePoint {
            point: point.to_vec(),
            dim: n,
            metric,
            inverse,
            christoffel,
            christoffel_grad,
            riemann,
            ricci,
            scalar,
            frame,
            coframe,
        })
    }

    #[inline]
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        let n = self.dim;
        self.christoffel[(k * n + i) * n + j]
    }

    #[inline]
    pub fn riemann_at(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim;
        self.riemann[((i * n + j) * n + k) * n + l]
    }

    pub fn volume_density(&self) -> f64 {
        let n = self.dim;
        let mut d = 1.0;
        // det g = (det L)^2 and coframe = L^T is triangular
        for i in 0..n {
            d *= self.coframe[i * n + i];
        }
        d.abs()
    }

    /// `R_{ijkl} − c (g_{ik} g_{jl} − g_{il} g_{jk})` in sup norm over frame components.
    pub fn constant_curvature_defect(&self, sectional: f64) -> f64 {
        let n = self.dim;
        let rf = to_frame(&self.riemann, 4, n, &self.frame);
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let model = sectional * (d(i, k) * d(j, l) - d(i, l) * d(j, k));
                        worst = worst.max((rf[((i * n + j) * n + k) * n + l] - model).abs());
                    }
                }
            }
        }
        worst
    }

    /// Sup-norm of the violations of the algebraic symmetries and of the first
    /// Bianchi identity, in frame components.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim;
        let rf = to_frame(&self.riemann, 4, n, &self.frame);
        let r = |i: usize, j: usize, k: usize, l: usize| rf[((i * n + j) * n + k) * n + l];
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = r(i, j, k, l);
                        worst = worst
                            .max((v + r(j, i, k, l)).abs())
                            .max((v + r(i, j, l, k)).abs())
                            .max((v - r(k, l, i, j)).abs())
                            .max((v + r(j, k, i, l) + r(k, i, j, l)).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn scalar_derivs(&self, f: &Jet2) -> ScalarDerivs {
        let n = self.dim;
        let gradient: Vec<f64> = (0..n).map(|k| f.grad(k)).collect();
        let mut hessian = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = f.hess(i, j);
                for k in 0..n {
                    s -= self.gamma(k, i, j) * gradient[k];
                }
                hessian[i * n + j] = s;
            }
        }
        let laplacian = (0..n * n).map(|q| self.inverse[q] * hessian[q]).sum();
        ScalarDerivs { value: f.value(), gradient, hessian, laplacian }
    }

    /// Divergence `∇_i X^i` of a vector field given by component jets.
    pub fn vector_divergence(&self, x: &[Jet2]) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            s += x[i].grad(i);
            for k in 0..n {
                s += self.gamma(i, i, k) * x[k].value();
            }
        }
        s
    }

    pub fn tensor_derivs(&self, h: &SymJet) -> TensorDerivs {
        let n = self.dim;
        let n2 = n * n;
        let mut value = vec![0.0; n2];
        let mut dh = vec![0.0; n2 * n]; // ∂_k h_ij at (i n + j) n + k
        let mut ddh = vec![0.0; n2 * n2]; // ∂_k ∂_l h_ij
        for i in 0..n {
            for j in 0..n {
                let c = h.get(i, j);
                value[i * n + j] = c.value();
                for k in 0..n {
                    dh[(i * n + j) * n + k] = c.grad(k);
                    for l in 0..n {
                        ddh[((i * n + j) * n + k) * n + l] = c.hess(k, l);
                    }
                }
            }
        }
        let gam = |k: usize, i: usize, j: usize| self.christoffel[(k * n + i) * n + j];
        let dgam = |m: usize, k: usize, i: usize, j: usize| self.christoffel_grad[((m * n + k) * n + i) * n + j];

        let mut first = vec![0.0; n2 * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = dh[(i * n + j) * n + k];
                    for p in 0..n {
                        s -= gam(p, k, i) * value[p * n + j] + gam(p, k, j) * value[i * n + p];
                    }
                    first[(i * n + j) * n + k] = s;
                }
            }
        }
        let mut second = vec![0.0; n2 * n2];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        // ∂_l (h_{ij;k})
                        let mut s = ddh[((i * n + j) * n + k) * n + l];
                        for p in 0..n {
                            s -= dgam(l, p, k, i) * value[p * n + j]
                                + gam(p, k, i) * dh[(p * n + j) * n + l]
                                + dgam(l, p, k, j) * value[i * n + p]
                                + gam(p, k, j) * dh[(i * n + p) * n + l];
                        }
                        for p in 0..n {
                            s -= gam(p, l, i) * first[(p * n + j) * n + k]
                                + gam(p, l, j) * first[(i * n + p) * n + k]
                                + gam(p, l, k) * first[(i * n + j) * n + p];
                        }
                        second[((i * n + j) * n + k) * n + l] = s;
                    }
                }
            }
        }
        TensorDerivs { dim: n, value, first, second }
    }
}

impl TensorDerivs {
    /// The same tensors expressed in the orthonormal frame of `geo`.
    pub fn in_frame(&self, geo: &CurvaturePoint) -> TensorDerivs {
        let n = self.dim;
        TensorDerivs {
            dim: n,
            value: to_frame(&self.value, 2, n, &geo.frame),
            first: to_frame(&self.first, 3, n, &geo.frame),
            second: to_frame(&self.second, 4, n, &geo.frame),
        }
    }

    #[inline]
    pub fn h(&self, i: usize, j: usize) -> f64 {
        self.value[i * self.dim + j]
    }

    #[inline]
    pub fn d1(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        self.first[(i * n + j) * n + k]
    }

    #[inline]
    pub fn d2(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim;
        self.second[((i * n + j) * n + k) * n + l]
    }
}

/// Contractions of a frame-expressed [`TensorDerivs`] (orthonormal, so
/// indices are raised freely).
#[derive(Clone, Debug)]
pub struct FrameOps {
    pub dim: usize,
    pub trace: f64,
    /// `(div h)_k = h_{ik;i}`
    pub divergence: Vec<f64>,
    /// `d(tr h)_k`
    pub trace_gradient: Vec<f64>,
    /// `(∇ div h)_{kl} = h_{ik;il}`
    pub grad_divergence: Vec<f64>,
    /// `∇²(tr h)_{kl}`
    pub trace_hessian: Vec<f64>,
    pub trace_laplacian: f64,
    pub second_divergence: f64,
    /// `(Δh)_{ij} = h_{ij;kk}`
    pub rough_laplacian: Vec<f64>,
}

impl FrameOps {
    pub fn new(t: &TensorDerivs) -> Self {
        let n = t.dim;
        let trace = (0..n).map(|i| t.h(i, i)).sum();
        let divergence = (0..n).map(|k| (0..n).map(|i| t.d1(i, k, i)).sum()).collect();
        let trace_gradient = (0..n).map(|k| (0..n).map(|i| t.d1(i, i, k)).sum()).collect();
        let mut grad_divergence = vec![0.0; n * n];
        let mut trace_hessian = vec![0.0; n * n];
        let mut rough_laplacian = vec![0.0; n * n];
        for k in 0..n {
            for l in 0..n {
                grad_divergence[k * n + l] = (0..n).map(|i| t.d2(i, k, i, l)).sum();
                trace_hessian[k * n + l] = (0..n).map(|i| t.d2(i, i, k, l)).sum();
                rough_laplacian[k * n + l] = (0..n).map(|m| t.d2(k, l, m, m)).sum();
            }
        }
        let trace_laplacian = (0..n).map(|k| trace_hessian[k * n + k]).sum();
        let second_divergence = (0..n).map(|k| grad_divergence[k * n + k]).sum();
        FrameOps {
            dim: n,
            trace,
            divergence,
            trace_gradient,
            grad_divergence,
            trace_hessian,
            trace_laplacian,
            second_divergence,
            rough_laplacian,
        }
    }
}
