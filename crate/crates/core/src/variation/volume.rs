//! Volume and its first and second variations.

use serde::Serialize;

use super::scalar::{critical_residual_tensor, DirectionPoint};
use crate::error::{Error, Result};
use crate::fields::quadrature::{map_nodes, pairwise_sum, BallQuadrature};
use crate::fields::{BoundaryFlag, ScalarField, Support, SymTensorField};
use crate::riemann::MetricField;
use crate::tolerances;

/// `V(g) = ∫ dV_g`.
pub fn volume(g: &MetricField, q: &BallQuadrature) -> Result<f64> {
    q.integrate_coordinate(|p| g.volume_density_at(p))
}

/// `DV_g(h) = ½ ∫ tr_g h dV_g`.
pub fn first_variation(g: &MetricField, h: &SymTensorField, q: &BallQuadrature) -> Result<f64> {
    let half = q.integrate_coordinate(|p| {
        let geo = g.curvature_at(p)?;
        let hv = h.eval_at(p)?;
        let n = geo.dim;
        let mut tr = 0.0;
        for i in 0..n {
            for j in 0..n {
                tr += geo.inverse[i * n + j] * hv.get(i, j).value();
            }
        }
        Ok(tr * geo.volume_density())
    })?;
    Ok(0.5 * half)
}

/// Quadrature adapted to the support of a direction: an annulus rule when
/// the direction is compactly supported away from the center.
pub fn quadrature_for(h: &SymTensorField, dim: usize, radius: f64, order: crate::fields::QuadratureOrder) -> BallQuadrature {
    match h.support() {
        Support::Annulus { inner, outer } if outer <= radius => BallQuadrature::annulus(dim, radius, inner, outer, order),
        _ => BallQuadrature::new(dim, radius, order),
    }
}

/// The six integrals of the second-variation formula and their sum.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SecondVariationBreakdown {
    /// `¼ ∫ (tr h)²`
    pub term_trace_sq: f64,
    /// `∫ λ |div h − ½ d tr h|²`
    pub term_divfree: f64,
    /// `¼ ∫ λ |∇h|²`
    pub term_gradient: f64,
    /// `∫ λ [⟨∇ div h, h⟩ − ⟨h, ∇² tr h⟩]`
    pub term_cross: f64,
    /// `−½ ∫ λ |div h|²`
    pub term_div_sq: f64,
    /// `−½ ∫ λ h^{sp} R_{kpls} h^{lk}`
    pub term_curvature: f64,
    pub total: f64,
    /// `¼ ∫ λ|∇h|² + K/(2n(n−1)) ∫ λ|h|²`, the value for trace- and
    /// divergence-free directions on a space form.
    pub reduced_tt: f64,
    /// `∫ λ |h|²`
    pub weighted_norm_sq: f64,
    /// Sup over nodes of `|tr h|` and `|div h|`.
    pub trace_sup: f64,
    pub divergence_sup: f64,
    /// Sup over nodes of the critical residual.
    pub residual_sup: f64,
}

impl SecondVariationBreakdown {
    pub fn terms(&self) -> [f64; 6] {
        [
            self.term_trace_sq,
            self.term_divfree,
            self.term_gradient,
            self.term_cross,
            self.term_div_sq,
            self.term_curvature,
        ]
    }

    /// Relative gap between the full formula and the reduced one.
    pub fn reduced_gap(&self) -> f64 {
        (self.total - self.reduced_tt).abs() / self.total.abs().max(f64::MIN_POSITIVE)
    }
}

/// Evaluates the second-variation formula at a critical pair `(g, λ)`.
///
/// Fails with [`Error::InvalidCriticalPoint`] when the critical residual at
/// the quadrature nodes exceeds the precondition tolerance, and with
/// [`Error::BoundaryCondition`] when `h` is not certified to have vanishing
/// tangential part on the boundary.
pub fn second_variation(
    g: &MetricField,
    lambda: &ScalarField,
    h: &SymTensorField,
    q: &BallQuadrature,
) -> Result<SecondVariationBreakdown> {
    if h.boundary_flag() == BoundaryFlag::Unconstrained {
        return Err(Error::BoundaryCondition(
            "direction must have vanishing tangential part on the boundary".into(),
        ));
    }
    let n = g.dim() as f64;
    let nodes = q.ball_nodes();
    let rows = map_nodes(&nodes, |node| {
        let geo = g.curvature_at(&node.point)?;
        let lj = lambda.eval_at(&node.point)?;
        let res = critical_residual_tensor(&geo, &lj);
        let res_norm = res.iter().map(|v| v * v).sum::<f64>().sqrt();
        let w = node.weight * geo.volume_density();
        let k = geo.scalar;
        let dp = DirectionPoint::with_geometry(geo, h, &node.point)?;
        let lam = lj.value();
        let tr = dp.ops.trace;
        let grad2 = dp.gradient_norm_sq();
        let norm2 = dp.norm_sq();
        let div_sup = dp.ops.divergence.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok([
            w * 0.25 * tr * tr,
            w * lam * dp.modified_divergence_norm_sq(),
            w * 0.25 * lam * grad2,
            w * lam * (dp.grad_divergence_pairing() - dp.trace_hessian_pairing()),
            w * -0.5 * lam * dp.divergence_norm_sq(),
            w * -0.5 * lam * dp.curvature_contraction(),
            w * (0.25 * lam * grad2 + k / (2.0 * n * (n - 1.0)) * lam * norm2),
            w * lam * norm2,
            tr.abs(),
            div_sup,
            res_norm,
        ])
    })?;
    let col = |c: usize| pairwise_sum(&rows.iter().map(|r| r[c]).collect::<Vec<_>>());
    let sup = |c: usize| rows.iter().map(|r| r[c]).fold(0.0, f64::max);
    let residual_sup = sup(10);
    if residual_sup > tolerances::CRITICAL_PRECONDITION {
        return Err(Error::InvalidCriticalPoint { residual: residual_sup, tolerance: tolerances::CRITICAL_PRECONDITION });
    }
    let terms = [col(0), col(1), col(2), col(3), col(4), col(5)];
    Ok(SecondVariationBreakdown {
        term_trace_sq: terms[0],
        term_divfree: terms[1],
        term_gradient: terms[2],
        term_cross: terms[3],
        term_div_sq: terms[4],
        term_curvature: terms[5],
        total: pairwise_sum(&terms),
        reduced_tt: col(6),
        weighted_norm_sq: col(7),
        trace_sup: sup(8),
        divergence_sup: sup(9),
        residual_sup,
    })
}

/// `(1/8)((n−6)/(n−1)) ∫ λ² |ĥ|²` for the direction `λ ĥ` with `ĥ` a
/// constant trace-free matrix on a Euclidean ball.
pub fn parallel_direction_value(lambda: &ScalarField, hhat: &[f64], q: &BallQuadrature) -> Result<f64> {
    let n = q.dim() as f64;
    let hn2: f64 = hhat.iter().map(|v| v * v).sum();
    let integral = q.integrate_coordinate(|p| {
        let l = lambda.value_at(p)?;
        Ok(l * l * hn2)
    })?;
    Ok((n - 6.0) / (8.0 * (n - 1.0)) * integral)
}
