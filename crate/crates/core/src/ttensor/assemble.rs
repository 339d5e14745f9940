//! Assembly of the tensor in the polar chart and its transfer to the
//! conformally flat chart of a space-form ball.

use super::harmonic::SphericalHarmonic;
use super::profile::{solve_profile, RadialProfile, TTProfile};
use super::WarpedMetric;
use crate::error::{Error, Result};
use crate::fields::{jet, BoundaryFlag, ChartKind, Jet2, Support, SymJet, SymTensorField};
use crate::spaceform::{conformal_psi, Model, SpaceFormBall};

/// The tensor
///
/// ```text
/// h = a Ŷ ŷŷᵀ + b (ŷ ∇Ŷᵀ + ∇Ŷ ŷᵀ) + c r² P D²Ŷ P + d Ŷ P,   P = I − ŷŷᵀ
/// ```
///
/// in the Cartesian polar chart of the profile's metric, where `Ŷ` is the
/// degree-0 extension of the harmonic. Supported in the profile's annulus.
pub fn assemble_tt(profile: &TTProfile) -> SymTensorField {
    let metric = profile.metric();
    let n = metric.sphere_dim() + 1;
    let harmonic = profile.harmonic().clone();
    let prof = profile.clone();
    SymTensorField::new(metric.chart(), move |y| {
        let r2 = jet::norm_sq(y);
        let r = r2.sqrt();
        let inv_r = r.recip();
        let p = prof.jets_at(&r);
        let ext = harmonic.extension(y);
        let u: Vec<Jet2> = y.iter().map(|v| *v * inv_r).collect();
        let hess = |i: usize, j: usize| ext.hessian[i * n + j];
        let hu: Vec<Jet2> = (0..n).map(|i| (0..n).map(|j| hess(i, j) * u[j]).sum()).collect();
        let uhu: Jet2 = (0..n).map(|i| u[i] * hu[i]).sum();
        let ay = p.a * ext.value;
        let dy = p.d * ext.value;
        let cr2 = p.c * r2;
        SymJet::from_fn(n, |i, j| {
            let uu = u[i] * u[j];
            let tangential_hess = hess(i, j) - u[i] * hu[j] - hu[i] * u[j] + uu * uhu;
            let proj = if i == j { 1.0 - uu } else { -uu };
            ay * uu + p.b * (u[i] * ext.gradient[j] + ext.gradient[i] * u[j]) + cr2 * tangential_hess + dy * proj
        })
    })
    .with_support(Support::Annulus { inner: profile.inner(), outer: profile.outer() })
    .with_boundary_flag(BoundaryFlag::VanishesOnBoundary)
}

/// Conformal-chart radius `|x|` of the sphere of areal radius `r` in the
/// model of sectional curvature `c`, on the branch inside the equator.
fn conformal_radius(r: f64, sectional: f64) -> f64 {
    2.0 * r / (1.0 + (1.0 - sectional * r * r).sqrt())
}

/// Pulls a polar-chart tensor back to the conformally flat chart of `ball`
/// along `y = ψ(|x|²) x`, i.e. `h_x = Jᵀ h_y J` with
/// `J = ψ I − (c/2) ψ² x xᵀ`.
///
/// A field already on the ball's chart is returned unchanged. Fails with
/// [`Error::RadiusMismatch`] when the support does not fit inside the ball
/// (or, for spheres, inside the open hemisphere where the areal radius is
/// monotone), and with [`Error::InvalidParameter`] when the polar metric is
/// not the ball's space form.
pub fn transplant_to_chart(h: &SymTensorField, metric: &WarpedMetric, ball: &SpaceFormBall) -> Result<SymTensorField> {
    let n = ball.dim();
    if h.dim() != n {
        return Err(Error::RadiusMismatch(format!("tensor dimension {} but ball dimension {n}", h.dim())));
    }
    if h.chart().kind() == ChartKind::ConformalBall {
        if (h.chart().coord_radius() - ball.coord_radius()).abs() > 1e-12 * ball.coord_radius() {
            return Err(Error::RadiusMismatch(format!(
                "chart radius {} differs from ball radius {}",
                h.chart().coord_radius(),
                ball.coord_radius()
            )));
        }
        return Ok(h.clone());
    }
    let c = ball.sectional();
    match metric.sectional() {
        Some(s) if (s - c).abs() <= 1e-12 * c.abs().max(1.0) => {}
        other => {
            return Err(Error::InvalidParameter(format!(
                "polar metric has sectional curvature {other:?}, ball has {c}"
            )))
        }
    }
    let (inner, outer) = match h.support() {
        Support::Annulus { inner, outer } => (inner, outer),
        Support::Everywhere => {
            return Err(Error::RadiusMismatch("polar tensor must have annular support".into()));
        }
    };
    if c > 0.0 && outer * outer * c >= 1.0 {
        return Err(Error::RadiusMismatch(format!(
            "areal radius {outer} reaches the equator 1/√c = {}",
            1.0 / c.sqrt()
        )));
    }
    let (s_inner, s_outer) = (conformal_radius(inner, c), conformal_radius(outer, c));
    if s_outer > ball.coord_radius() {
        return Err(Error::RadiusMismatch(format!(
            "support reaches chart radius {s_outer}, beyond the ball's {}",
            ball.coord_radius()
        )));
    }
    let polar = h.clone();
    Ok(SymTensorField::new(*ball.chart(), move |x| {
        let psi = conformal_psi(x, c);
        let y: Vec<Jet2> = x.iter().map(|v| psi * *v).collect();
        let hy = polar.eval(&y);
        let psi2 = psi * psi * (c / 2.0);
        let jac = |i: usize, j: usize| {
            let off = psi2 * x[i] * x[j];
            if i == j {
                psi - off
            } else {
                -off
            }
        };
        let jm: Vec<Jet2> = (0..n * n).map(|q| jac(q / n, q % n)).collect();
        // (h_y J)_{ib}
        let hj: Vec<Jet2> = (0..n * n)
            .map(|q| {
                let (i, b) = (q / n, q % n);
                (0..n).map(|j| hy.get(i, j) * jm[j * n + b]).sum()
            })
            .collect();
        SymJet::from_fn(n, |a, b| (0..n).map(|i| jm[i * n + a] * hj[i * n + b]).sum())
    })
    .with_support(Support::Annulus { inner: s_inner, outer: s_outer })
    .with_boundary_flag(h.boundary_flag()))
}

/// Areal radius of the geodesic sphere of radius `rho` in `ball`'s model.
fn areal_radius(ball: &SpaceFormBall, rho: f64) -> f64 {
    let k = ball.curvature_scale();
    match ball.model() {
        Model::Euclidean => rho,
        Model::Hyperbolic => (k * rho).sinh() / k,
        Model::Spherical => (k * rho).sin() / k,
    }
}

/// A trace-free divergence-free direction on `ball`, supported between the
/// geodesic radii `inner` and `outer`, with the default bump of unit peak.
/// Spherical supports must stay inside the open hemisphere.
pub fn ball_tt_direction(
    ball: &SpaceFormBall,
    harmonic: &SphericalHarmonic,
    inner: f64,
    outer: f64,
) -> Result<SymTensorField> {
    let limit = match ball.model() {
        Model::Spherical => ball.geodesic_radius().min(std::f64::consts::FRAC_PI_2 / ball.curvature_scale()),
        _ => ball.geodesic_radius(),
    };
    if !(inner > 0.0 && outer > inner && outer < limit) {
        return Err(Error::RadiusMismatch(format!(
            "support ({inner}, {outer}) must satisfy 0 < r1 < r2 < {limit}"
        )));
    }
    let m = ball.dim() - 1;
    let chart_outer = match ball.model() {
        Model::Spherical => 1.0 / ball.curvature_scale(),
        _ => areal_radius(ball, ball.geodesic_radius()),
    };
    let metric = WarpedMetric::space_form(m, chart_outer, ball.sectional())?;
    let a = RadialProfile::bump(areal_radius(ball, inner), areal_radius(ball, outer), 1.0)?;
    let profile = solve_profile(&metric, &a, harmonic)?;
    transplant_to_chart(&assemble_tt(&profile), &metric, ball)
}
