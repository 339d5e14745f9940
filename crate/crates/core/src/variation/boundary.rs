//! Linearized mean curvature and the boundary identities of critical balls.

use serde::Serialize;

use super::volume::{first_variation, volume};
use crate::error::Result;
use crate::fields::quadrature::{map_nodes, pairwise_sum, BallQuadrature};
use crate::fields::{ScalarField, SymTensorField};
use crate::riemann::boundary::{bilinear, boundary_geometry, BoundaryGeometry};
use crate::riemann::MetricField;
use crate::spaceform::{Model, SpaceFormBall};

/// `H'(0) = ½ h(ν,ν)_{;ν} + ½ H h(ν,ν) − ⟨II, h⟩ − [div h − ½ d tr h](ν)` given the
/// boundary geometry at the point.
pub fn mean_curvature_prime_with(bg: &BoundaryGeometry, h: &SymTensorField) -> Result<f64> {
    let cp = &bg.curvature;
    let n = cp.dim;
    let t = cp.tensor_derivs(&h.eval_at(&bg.point)?);
    let nu = &bg.normal;
    let mut hnnn = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                hnnn += t.d1(i, j, k) * nu[i] * nu[j] * nu[k];
            }
        }
    }
    let hnn = bilinear(&t.value, n, nu, nu);
    let pairing = bg.second_fundamental_pairing(&t.value);
    let mut modified = 0.0;
    for k in 0..n {
        let mut div = 0.0;
        let mut dtr = 0.0;
        for i in 0..n {
            for j in 0..n {
                div += cp.inverse[i * n + j] * t.d1(i, k, j);
                dtr += cp.inverse[i * n + j] * t.d1(i, j, k);
            }
        }
        modified += (div - 0.5 * dtr) * nu[k];
    }
    Ok(0.5 * hnnn + 0.5 * bg.mean_curvature * hnn - pairing - modified)
}

/// Linearized mean curvature of the boundary sphere at `p`.
pub fn mean_curvature_prime(g: &MetricField, h: &SymTensorField, p: &[f64]) -> Result<f64> {
    mean_curvature_prime_with(&boundary_geometry(g, p)?, h)
}

/// Sup of `|h(e_A, e_B)|` over boundary nodes and tangent frames.
pub fn tangential_boundary_sup(g: &MetricField, h: &SymTensorField, q: &BallQuadrature) -> Result<f64> {
    let nodes = q.sphere_nodes();
    let vals = map_nodes(&nodes, |node| {
        let bg = boundary_geometry(g, &node.point)?;
        Ok(bg.tangential_sup(&h.eval_at(&node.point)?.values()))
    })?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryIdentities {
    /// Sup over boundary nodes of `|H ∂λ/∂ν + 1|`.
    pub umbilic_product_defect: f64,
    /// Sup of `|II − (H/(n−1)) γ|`.
    pub umbilic_defect: f64,
    /// Sup of `|2 Ric(ν,ν) + R_Σ − K − (n−2)/(n−1) H²|`.
    pub ric_boundary_defect: f64,
    pub area: f64,
    pub volume: f64,
    pub mean_curvature: f64,
    pub analytic_mean_curvature: f64,
    pub analytic_area: f64,
    /// `∫ λ dV`.
    pub potential_integral: f64,
    /// `n/(n−1) H V`; equals the area for flat balls.
    pub flat_chain_rhs: f64,
    /// `(H/(n−1)) ∫ (Kλ + n) dV`; equals the area for every critical ball.
    pub general_chain_rhs: f64,
    /// `∮ H dA`.
    pub total_mean_curvature: f64,
    /// `|Σ|²` against `n/(n−1) V ∮ H`.
    pub minkowski_lhs: f64,
    pub minkowski_rhs: f64,
}

/// Boundary identities of a critical ball computed by quadrature.
pub fn boundary_identities(ball: &SpaceFormBall, q: &BallQuadrature) -> Result<BoundaryIdentities> {
    let g = ball.metric();
    let n = ball.dim() as f64;
    let k = ball.scalar_curvature();
    let lambda = ball.critical_potential().lambda;
    let nodes = q.sphere_nodes();
    let rows = map_nodes(&nodes, |node| {
        let bg = boundary_geometry(g, &node.point)?;
        let dl = lambda.eval_at(&node.point)?;
        let dnu = bg.normal_derivative(&dl.gradient());
        let h = bg.mean_curvature;
        let umb = (h * dnu + 1.0).abs();
        let ric = (2.0 * bg.ricci_normal + bg.boundary_scalar - k - (n - 2.0) / (n - 1.0) * h * h).abs();
        Ok([umb, bg.umbilic_defect(), ric, node.weight * bg.area_density, node.weight * bg.area_density * h, h])
    })?;
    let sup = |c: usize| rows.iter().map(|r| r[c]).fold(0.0, f64::max);
    let sum = |c: usize| pairwise_sum(&rows.iter().map(|r| r[c]).collect::<Vec<_>>());
    let area = sum(3);
    let total_mean_curvature = sum(4);
    let mean_curvature = total_mean_curvature / area;
    let vol = volume(g, q)?;
    let potential_integral = q.integrate_ball(|p| lambda.value_at(p), |p| g.volume_density_at(p))?;
    Ok(BoundaryIdentities {
        umbilic_product_defect: sup(0),
        umbilic_defect: sup(1),
        ric_boundary_defect: sup(2),
        area,
        volume: vol,
        mean_curvature,
        analytic_mean_curvature: ball.boundary_mean_curvature(),
        analytic_area: ball.boundary_area(),
        potential_integral,
        flat_chain_rhs: n / (n - 1.0) * mean_curvature * vol,
        general_chain_rhs: mean_curvature / (n - 1.0) * (k * potential_integral + n * vol),
        total_mean_curvature,
        minkowski_lhs: area * area,
        minkowski_rhs: n / (n - 1.0) * vol * total_mean_curvature,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PathFirstVariation {
    /// `½ ∫ tr h dV`.
    pub volume_derivative: f64,
    /// `∮ λ H'(0) dA` with the critical potential.
    pub potential_flux: f64,
    /// `−(1/κ) ∮ H'(0) dA` with `Ric = κ g`, when `κ ≠ 0`.
    pub einstein_flux: Option<f64>,
    /// `∮ H'(0) dA`.
    pub total_mean_curvature_prime: f64,
}

/// First variation of volume along a constant-scalar-curvature path with
/// tangent `h`, computed in the interior and through the boundary.
pub fn path_first_variation(
    ball: &SpaceFormBall,
    lambda: &ScalarField,
    h: &SymTensorField,
    q: &BallQuadrature,
) -> Result<PathFirstVariation> {
    let g = ball.metric();
    let volume_derivative = first_variation(g, h, q)?;
    let nodes = q.sphere_nodes();
    let rows = map_nodes(&nodes, |node| {
        let bg = boundary_geometry(g, &node.point)?;
        let hp = mean_curvature_prime_with(&bg, h)?;
        let w = node.weight * bg.area_density;
        Ok([w * lambda.value_at(&node.point)? * hp, w * hp])
    })?;
    let potential_flux = pairwise_sum(&rows.iter().map(|r| r[0]).collect::<Vec<_>>());
    let total = pairwise_sum(&rows.iter().map(|r| r[1]).collect::<Vec<_>>());
    let einstein = (ball.model() != Model::Euclidean).then(|| {
        let kappa = ball.scalar_curvature() / ball.dim() as f64;
        -total / kappa
    });
    Ok(PathFirstVariation {
        volume_derivative,
        potential_flux,
        einstein_flux: einstein,
        total_mean_curvature_prime: total,
    })
}
