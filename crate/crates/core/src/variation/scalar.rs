//! First and second derivatives of scalar curvature along metric paths, and
//! the critical-point residual.

use serde::Serialize;

use crate::error::Result;
use crate::fields::quadrature::{map_nodes, pairwise_sum, BallQuadrature};
use crate::fields::{ScalarField, SymTensorField};
use crate::riemann::curvature::to_frame;
use crate::riemann::{CurvaturePoint, FrameOps, MetricField, TensorDerivs};

/// Pointwise pieces of a direction needed by the variation formulas,
/// expressed in an orthonormal frame.
#[derive(Clone, Debug)]
pub struct DirectionPoint {
    pub geometry: CurvaturePoint,
    pub derivs: TensorDerivs,
    pub ops: FrameOps,
    pub ricci: Vec<f64>,
    pub riemann: Vec<f64>,
}

impl DirectionPoint {
    pub fn new(g: &MetricField, h: &SymTensorField, p: &[f64]) -> Result<Self> {
        let geometry = g.curvature_at(p)?;
        Self::with_geometry(geometry, h, p)
    }

    pub fn with_geometry(geometry: CurvaturePoint, h: &SymTensorField, p: &[f64]) -> Result<Self> {
        let n = geometry.dim;
        let derivs = geometry.tensor_derivs(&h.eval_at(p)?).in_frame(&geometry);
        let ops = FrameOps::new(&derivs);
        let ricci = to_frame(&geometry.ricci, 2, n, &geometry.frame);
        let riemann = to_frame(&geometry.riemann, 4, n, &geometry.frame);
        Ok(DirectionPoint { geometry, derivs, ops, ricci, riemann })
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim
    }

    /// `DR_g(h) = −Δ tr h + div div h − ⟨h, Ric⟩`.
    pub fn linearized_scalar(&self) -> f64 {
        let n = self.dim();
        let pairing: f64 = (0..n * n).map(|q| self.derivs.value[q] * self.ricci[q]).sum();
        -self.ops.trace_laplacian + self.ops.second_divergence - pairing
    }

    pub fn norm_sq(&self) -> f64 {
        self.derivs.value.iter().map(|v| v * v).sum()
    }

    pub fn gradient_norm_sq(&self) -> f64 {
        self.derivs.first.iter().map(|v| v * v).sum()
    }

    pub fn divergence_norm_sq(&self) -> f64 {
        self.ops.divergence.iter().map(|v| v * v).sum()
    }

    /// `|div h − ½ d tr h|²`
    pub fn modified_divergence_norm_sq(&self) -> f64 {
        self.ops.divergence.iter().zip(&self.ops.trace_gradient).map(|(a, b)| (a - 0.5 * b).powi(2)).sum()
    }

    /// `⟨∇ div h, h⟩`
    pub fn grad_divergence_pairing(&self) -> f64 {
        self.ops.grad_divergence.iter().zip(&self.derivs.value).map(|(a, b)| a * b).sum()
    }

    /// `⟨h, ∇² tr h⟩`
    pub fn trace_hessian_pairing(&self) -> f64 {
        self.ops.trace_hessian.iter().zip(&self.derivs.value).map(|(a, b)| a * b).sum()
    }

    /// `h^{sp} R_{kpls} h^{lk}`
    pub fn curvature_contraction(&self) -> f64 {
        let n = self.dim();
        let h = |i: usize, j: usize| self.derivs.h(i, j);
        let r = |i: usize, j: usize, k: usize, l: usize| self.riemann[((i * n + j) * n + k) * n + l];
        let mut s = 0.0;
        for sidx in 0..n {
            for p in 0..n {
                let hsp = h(sidx, p);
                if hsp == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        s += hsp * r(k, p, l, sidx) * h(l, k);
                    }
                }
            }
        }
        s
    }

    /// `h^{lk}_{;p} h_{lp;k}`
    pub fn mixed_gradient_contraction(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for l in 0..n {
            for k in 0..n {
                for p in 0..n {
                    s += self.derivs.d1(l, k, p) * self.derivs.d1(l, p, k);
                }
            }
        }
        s
    }

    /// `Δ|h|² = 2⟨Δh, h⟩ + 2|∇h|²`
    pub fn laplacian_of_norm_sq(&self) -> f64 {
        let pair: f64 = self.ops.rough_laplacian.iter().zip(&self.derivs.value).map(|(a, b)| a * b).sum();
        2.0 * pair + 2.0 * self.gradient_norm_sq()
    }

    /// Second derivative of scalar curvature at `t = 0` along a path with
    /// `g'(0) = h` and `g''(0) = h'`, given `DR_g(h')`.
    pub fn second_scalar(&self, linearized_of_second: f64) -> f64 {
        // h^{lp} R_{lkps} h^{sk}
        let n = self.dim();
        let mut curv = 0.0;
        for l in 0..n {
            for p in 0..n {
                let hlp = self.derivs.h(l, p);
                if hlp == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for s in 0..n {
                        curv += hlp * self.riemann[((l * n + k) * n + p) * n + s] * self.derivs.h(s, k);
                    }
                }
            }
        }
        self.laplacian_of_norm_sq() + 2.0 * self.trace_hessian_pairing() - 4.0 * self.grad_divergence_pairing()
            - 2.0 * self.modified_divergence_norm_sq()
            - 0.5 * self.gradient_norm_sq()
            - self.mixed_gradient_contraction()
            + 2.0 * curv
            + linearized_of_second
    }
}

/// `DR_g(h)(p)`.
pub fn linearized_scalar(g: &MetricField, h: &SymTensorField, p: &[f64]) -> Result<f64> {
    Ok(DirectionPoint::new(g, h, p)?.linearized_scalar())
}

/// `R''(0)(p)` along `g + t h + (t²/2) h'`.
pub fn second_scalar(g: &MetricField, h: &SymTensorField, hprime: &SymTensorField, p: &[f64]) -> Result<f64> {
    let geo = g.curvature_at(p)?;
    let dh = DirectionPoint::with_geometry(geo.clone(), h, p)?;
    let dh2 = DirectionPoint::with_geometry(geo, hprime, p)?;
    Ok(dh.second_scalar(dh2.linearized_scalar()))
}

/// Residual tensor `−(Δλ)g + ∇²λ − λ Ric − g` at a point, frame components.
pub fn critical_residual_tensor(geo: &CurvaturePoint, lambda: &crate::fields::Jet2) -> Vec<f64> {
    let n = geo.dim;
    let d = geo.scalar_derivs(lambda);
    let mut t = vec![0.0; n * n];
    for q in 0..n * n {
        t[q] = -d.laplacian * geo.metric[q] + d.hessian[q] - d.value * geo.ricci[q] - geo.metric[q];
    }
    to_frame(&t, 2, n, &geo.frame)
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    /// Sup over interior nodes of the `g`-norm of the residual tensor.
    pub sup: f64,
    /// `(∫ |T|² dV)^{1/2}`.
    pub l2: f64,
    /// Sup of `|λ|` over boundary nodes.
    pub boundary_sup: f64,
    /// Sup of `|Δλ + (λK + n)/(n−1)|` with `K` the pointwise scalar curvature.
    pub trace_identity_sup: f64,
    /// Sup of the frame norm of `∇²λ − λ Ric + (λK + 1)/(n−1) g`.
    pub hessian_identity_sup: f64,
}

/// Critical-point residual of `(g, λ)` over the nodes of `q`.
pub fn critical_residual(g: &MetricField, lambda: &ScalarField, q: &BallQuadrature) -> Result<ResidualReport> {
    let n = g.dim() as f64;
    let nodes = q.ball_nodes();
    let rows = map_nodes(&nodes, |node| {
        let geo = g.curvature_at(&node.point)?;
        let lj = lambda.eval_at(&node.point)?;
        let t = critical_residual_tensor(&geo, &lj);
        let norm2: f64 = t.iter().map(|v| v * v).sum();
        let d = geo.scalar_derivs(&lj);
        let k = geo.scalar;
        let trace_id = (d.laplacian + (d.value * k + n) / (n - 1.0)).abs();
        let dim = geo.dim;
        let mut hess_id = vec![0.0; dim * dim];
        for idx in 0..dim * dim {
            hess_id[idx] = d.hessian[idx] - d.value * geo.ricci[idx] + (d.value * k + 1.0) / (n - 1.0) * geo.metric[idx];
        }
        let hf = to_frame(&hess_id, 2, dim, &geo.frame);
        let hess_norm = hf.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok([norm2.sqrt(), norm2 * geo.volume_density() * node.weight, trace_id, hess_norm])
    })?;
    let sup = rows.iter().map(|r| r[0]).fold(0.0, f64::max);
    let l2 = pairwise_sum(&rows.iter().map(|r| r[1]).collect::<Vec<_>>()).sqrt();
    let trace_identity_sup = rows.iter().map(|r| r[2]).fold(0.0, f64::max);
    let hessian_identity_sup = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    let mut boundary_sup: f64 = 0.0;
    for node in q.sphere_nodes() {
        boundary_sup = boundary_sup.max(lambda.value_at(&node.point)?.abs());
    }
    Ok(ResidualReport { sup, l2, boundary_sup, trace_identity_sup, hessian_identity_sup })
}
