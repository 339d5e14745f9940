//! Geodesic balls in Euclidean, hyperbolic and spherical space.
//!
//! All three models share the conformally flat chart
//! `g = (1 + c|x|²/4)^{-2} δ` on a coordinate ball, where `c` is the
//! sectional curvature (`0`, `-κ²` or `+κ²`). A geodesic ball of radius `R`
//! about the origin is the coordinate ball of radius
//! `ρ = (2/κ) tanh(κR/2)` (hyperbolic) or `(2/κ) tan(κR/2)` (spherical).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{jet, BallQuadrature, Chart, ChartKind, Jet2, QuadratureOrder, ScalarField};
use crate::riemann::MetricField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Euclidean,
    Hyperbolic,
    Spherical,
}

/// Spherical balls larger than a hemisphere behave differently: the
/// critical potential is negative inside.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Small,
    Large,
}

#[derive(Clone, Debug)]
pub struct SpaceFormBall {
    dim: usize,
    model: Model,
    curvature_scale: f64,
    sectional: f64,
    geodesic_radius: f64,
    coord_radius: f64,
    metric: MetricField,
}

/// Conformal factor `ψ = 1/(1 + c|x|²/4)` as a jet.
pub fn conformal_psi(x: &[Jet2], sectional: f64) -> Jet2 {
    (jet::norm_sq(x) * (sectional / 4.0) + 1.0).recip()
}

impl SpaceFormBall {
    /// Geodesic ball of radius `radius` in the model of curvature scale
    /// `kappa` (ignored for the Euclidean model).
    pub fn new(model: Model, dim: usize, radius: f64, kappa: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::UnsupportedRadius { radius, reason: "radius must be positive".into() });
        }
        let (sectional, coord_radius, kappa) = match model {
            Model::Euclidean => (0.0, radius, 0.0),
            Model::Hyperbolic | Model::Spherical => {
                if !(kappa > 0.0 && kappa.is_finite()) {
                    return Err(Error::InvalidParameter(format!("curvature scale {kappa} must be positive")));
                }
                let kr = kappa * radius;
                if model == Model::Hyperbolic {
                    (-kappa * kappa, 2.0 / kappa * (kr / 2.0).tanh(), kappa)
                } else {
                    if kr >= std::f64::consts::PI {
                        return Err(Error::UnsupportedRadius {
                            radius,
                            reason: "spherical balls must have κR < π".into(),
                        });
                    }
                    if (kr - std::f64::consts::FRAC_PI_2).abs() < 1e-9 {
                        return Err(Error::UnsupportedRadius {
                            radius,
                            reason: "hemisphere (κR = π/2) has no critical potential".into(),
                        });
                    }
                    (kappa * kappa, 2.0 / kappa * (kr / 2.0).tan(), kappa)
                }
            }
        };
        if model == Model::Hyperbolic && coord_radius >= 2.0 / kappa {
            return Err(Error::domain(&[coord_radius], "hyperbolic chart radius must stay below 2/κ"));
        }
        let chart = Chart::new(dim, ChartKind::ConformalBall, coord_radius)?;
        let factor = ScalarField::new(chart, move |x| {
            let psi = conformal_psi(x, sectional);
            psi * psi
        });
        Ok(SpaceFormBall {
            dim,
            model,
            curvature_scale: kappa,
            sectional,
            geodesic_radius: radius,
            coord_radius,
            metric: MetricField::conformally_flat(factor),
        })
    }

    /// The κ-family on the unit coordinate ball: `(1 ∓ κ²|x|²/4)^{-2} δ`.
    /// `kappa = 0` gives the Euclidean unit ball.
    pub fn unit_family(model: Model, dim: usize, kappa: f64) -> Result<Self> {
        if kappa == 0.0 || model == Model::Euclidean {
            return SpaceFormBall::new(Model::Euclidean, dim, 1.0, 0.0);
        }
        let radius = match model {
            Model::Hyperbolic => {
                if kappa >= 2.0 {
                    return Err(Error::InvalidParameter(format!("κ = {kappa}: unit ball exceeds the hyperbolic chart")));
                }
                2.0 / kappa * (kappa / 2.0).atanh()
            }
            _ => 2.0 / kappa * (kappa / 2.0).atan(),
        };
        let mut ball = SpaceFormBall::new(model, dim, radius, kappa)?;
        ball.coord_radius = 1.0;
        let chart = Chart::new(dim, ChartKind::ConformalBall, 1.0)?;
        let sectional = ball.sectional;
        ball.metric = MetricField::conformally_flat(ScalarField::new(chart, move |x| {
            let psi = conformal_psi(x, sectional);
            psi * psi
        }));
        Ok(ball)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn curvature_scale(&self) -> f64 {
        self.curvature_scale
    }

    /// Sectional curvature `c`.
    pub fn sectional(&self) -> f64 {
        self.sectional
    }

    /// Scalar curvature `K = n(n−1)c`.
    pub fn scalar_curvature(&self) -> f64 {
        let n = self.dim as f64;
        n * (n - 1.0) * self.sectional
    }

    pub fn geodesic_radius(&self) -> f64 {
        self.geodesic_radius
    }

    pub fn coord_radius(&self) -> f64 {
        self.coord_radius
    }

    pub fn regime(&self) -> Regime {
        if self.model == Model::Spherical && self.curvature_scale * self.geodesic_radius > std::f64::consts::FRAC_PI_2 {
            Regime::Large
        } else {
            Regime::Small
        }
    }

    pub fn chart(&self) -> &Chart {
        self.metric.chart()
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn quadrature(&self, order: QuadratureOrder) -> BallQuadrature {
        BallQuadrature::new(self.dim, self.coord_radius, order)
    }

    /// Geodesic distance from the center as a function of the chart point.
    pub fn geodesic_distance(&self, x: &[Jet2]) -> Jet2 {
        let s = jet::norm_sq(x).sqrt();
        let k = self.curvature_scale;
        match self.model {
            Model::Euclidean => s,
            Model::Hyperbolic => (s * (k / 2.0)).atanh() * (2.0 / k),
            Model::Spherical => (s * (k / 2.0)).atan() * (2.0 / k),
        }
    }

    /// Analytic mean curvature of the boundary sphere.
    pub fn boundary_mean_curvature(&self) -> f64 {
        let m = (self.dim - 1) as f64;
        let (k, r) = (self.curvature_scale, self.geodesic_radius);
        match self.model {
            Model::Euclidean => m / r,
            Model::Hyperbolic => m * k / (k * r).tanh(),
            Model::Spherical => m * k / (k * r).tan(),
        }
    }

    /// Analytic area of the boundary sphere.
    pub fn boundary_area(&self) -> f64 {
        let m = self.dim - 1;
        let (k, r) = (self.curvature_scale, self.geodesic_radius);
        let warp = match self.model {
            Model::Euclidean => r,
            Model::Hyperbolic => (k * r).sinh() / k,
            Model::Spherical => (k * r).sin() / k,
        };
        unit_sphere_area(m) * warp.powi(m as i32)
    }

    /// The constant `a = 1/cos(κR)` in the description of a large spherical
    /// ball as the cap `{x_n > 1/a}` of the unit sphere, where the potential
    /// reads `(a x_n − 1)/(n−1)`.
    pub fn cap_constant(&self) -> Option<f64> {
        (self.model == Model::Spherical).then(|| 1.0 / (self.curvature_scale * self.geodesic_radius).cos())
    }

    pub fn critical_potential(&self) -> CriticalPotential {
        let n = self.dim as f64;
        let c = self.sectional;
        let rho2 = self.coord_radius * self.coord_radius;
        let chart = *self.chart();
        let lambda = ScalarField::new(chart, move |x| {
            let s = jet::norm_sq(x);
            (s * -1.0 + rho2) / ((s * (c / 4.0) + 1.0) * (2.0 * (n - 1.0) * (1.0 - c * rho2 / 4.0)))
        });
        let ball = self.clone();
        let closed_form = ScalarField::new(chart, move |x| ball.closed_form_potential(x));
        let (k, r) = (self.curvature_scale, self.geodesic_radius);
        let normal_derivative = match self.model {
            Model::Euclidean => -r / (n - 1.0),
            Model::Hyperbolic => -(k * r).tanh() / ((n - 1.0) * k),
            Model::Spherical => -(k * r).tan() / ((n - 1.0) * k),
        };
        CriticalPotential { lambda, closed_form, scalar_curvature: self.scalar_curvature(), normal_derivative }
    }

    /// The potential written through the geodesic distance (cosh / cos forms).
    fn closed_form_potential(&self, x: &[Jet2]) -> Jet2 {
        let n = self.dim as f64;
        let (k, big_r) = (self.curvature_scale, self.geodesic_radius);
        let r = self.geodesic_distance(x);
        match self.model {
            Model::Euclidean => (r * r * -1.0 + big_r * big_r) / (2.0 * (n - 1.0)),
            Model::Hyperbolic => ((r * k).cosh() * (-1.0 / (k * big_r).cosh()) + 1.0) / ((n - 1.0) * k * k),
            Model::Spherical => ((r * k).cos() * (1.0 / (k * big_r).cos()) - 1.0) / ((n - 1.0) * k * k),
        }
    }
}

pub fn unit_sphere_area(m: usize) -> f64 {
    // |S^m| = 2π^{(m+1)/2} / Γ((m+1)/2), via |S^m| = 2π/(m−1) |S^{m−2}|
    match m {
        0 => 2.0,
        1 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (m as f64 - 1.0) * unit_sphere_area(m - 2),
    }
}

/// The solution of the critical-point equation on a space-form ball.
#[derive(Clone, Debug)]
pub struct CriticalPotential {
    pub lambda: ScalarField,
    /// Independent evaluation through the geodesic distance.
    pub closed_form: ScalarField,
    pub scalar_curvature: f64,
    /// Analytic `∂λ/∂ν` on the boundary.
    pub normal_derivative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitRow {
    pub kappa: f64,
    pub metric_sup: f64,
    pub potential_sup: f64,
}

/// Sup-norm distances of the κ-family metric and potential from the
/// Euclidean unit ball, sampled on 401 radii (all fields are radial).
pub fn euclidean_limit_check(model: Model, dim: usize, kappas: &[f64]) -> Result<Vec<LimitRow>> {
    let flat = SpaceFormBall::unit_family(Model::Euclidean, dim, 0.0)?;
    let flat_lambda = flat.critical_potential().lambda;
    let mut rows = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let ball = SpaceFormBall::unit_family(model, dim, kappa)?;
        let lambda = ball.critical_potential().lambda;
        let (mut gsup, mut lsup): (f64, f64) = (0.0, 0.0);
        for i in 0..=400 {
            let mut p = vec![0.0; dim];
            p[0] = i as f64 / 400.0;
            let g = ball.metric().tensor().eval_at(&p)?;
            gsup = gsup.max((g.get(0, 0).value() - 1.0).abs());
            lsup = lsup.max((lambda.value_at(&p)? - flat_lambda.value_at(&p)?).abs());
        }
        rows.push(LimitRow { kappa, metric_sup: gsup, potential_sup: lsup });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
        loop {
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-radius..radius)).collect();
            if p.iter().map(|v| v * v).sum::<f64>() < radius * radius {
                return p;
            }
        }
    }

    #[test]
    fn scalar_curvature_of_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = SpaceFormBall::new(Model::Euclidean, 3, 1.0, 0.0).unwrap();
        assert_eq!(e.metric().scalar_curvature_at(&[0.2, 0.1, 0.0]).unwrap(), 0.0);
        let h = SpaceFormBall::new(Model::Hyperbolic, 3, 0.7, 1.0).unwrap();
        let s = SpaceFormBall::new(Model::Spherical, 4, 0.4, 1.0).unwrap();
        for _ in 0..10 {
            let p = sample(&mut rng, 3, h.coord_radius());
            assert_abs_diff_eq!(h.metric().scalar_curvature_at(&p).unwrap(), -6.0, epsilon = 1e-9);
            let p = sample(&mut rng, 4, s.coord_radius());
            assert_abs_diff_eq!(s.metric().scalar_curvature_at(&p).unwrap(), 12.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn hemisphere_rejected_and_regimes_tagged() {
        let err = SpaceFormBall::new(Model::Spherical, 3, std::f64::consts::FRAC_PI_2, 1.0).unwrap_err();
        assert!(matches!(err, Error::UnsupportedRadius { .. }));
        assert_eq!(SpaceFormBall::new(Model::Spherical, 3, 1.2, 1.0).unwrap().regime(), Regime::Small);
        assert_eq!(SpaceFormBall::new(Model::Spherical, 3, 2.0, 1.0).unwrap().regime(), Regime::Large);
        assert!(SpaceFormBall::new(Model::Spherical, 3, 3.2, 1.0).is_err());
    }

    #[test]
    fn potential_values() {
        let e = SpaceFormBall::new(Model::Euclidean, 3, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(e.critical_potential().lambda.value_at(&[0.0; 3]).unwrap(), 0.25, epsilon = 1e-15);
        let h = SpaceFormBall::unit_family(Model::Hyperbolic, 3, 1.0).unwrap();
        assert_abs_diff_eq!(h.critical_potential().lambda.value_at(&[0.0; 3]).unwrap(), 0.2, epsilon = 1e-14);
    }

    #[test]
    fn rational_and_closed_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let balls = [
            SpaceFormBall::new(Model::Hyperbolic, 3, 1.0, 1.0).unwrap(),
            SpaceFormBall::new(Model::Hyperbolic, 5, 0.3, 2.0).unwrap(),
            SpaceFormBall::new(Model::Spherical, 4, 1.2, 1.0).unwrap(),
            SpaceFormBall::new(Model::Spherical, 3, 2.0, 1.0).unwrap(),
            SpaceFormBall::unit_family(Model::Spherical, 3, 0.5).unwrap(),
        ];
        for b in &balls {
            let cp = b.critical_potential();
            for _ in 0..20 {
                let p = sample(&mut rng, b.dim(), b.coord_radius());
                let a = cp.lambda.eval_at(&p).unwrap();
                let c = cp.closed_form.eval_at(&p).unwrap();
                assert_abs_diff_eq!(a.value(), c.value(), epsilon = 1e-12);
                for i in 0..b.dim() {
                    assert_abs_diff_eq!(a.grad(i), c.grad(i), epsilon = 1e-11);
                    for j in 0..b.dim() {
                        assert_abs_diff_eq!(a.hess(i, j), c.hess(i, j), epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn large_ball_potential_negative() {
        let b = SpaceFormBall::new(Model::Spherical, 3, 2.0, 1.0).unwrap();
        let lam = b.critical_potential().lambda;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = sample(&mut rng, 3, b.coord_radius() * 0.999);
            assert!(lam.value_at(&p).unwrap() < 0.0);
        }
        assert!(b.cap_constant().unwrap() < -1.0);
    }

    #[test]
    fn potential_vanishes_on_boundary() {
        for b in [
            SpaceFormBall::new(Model::Euclidean, 4, 0.7, 0.0).unwrap(),
            SpaceFormBall::new(Model::Hyperbolic, 3, 1.0, 1.0).unwrap(),
            SpaceFormBall::new(Model::Spherical, 5, 1.2, 1.0).unwrap(),
        ] {
            let lam = b.critical_potential().lambda;
            let q = b.quadrature(QuadratureOrder::new(4, 6));
            for node in q.sphere_nodes() {
                assert!(lam.value_at(&node.point).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn limit_table_is_second_order() {
        assert_eq!(
            euclidean_limit_check(Model::Hyperbolic, 3, &[0.0]).unwrap()[0],
            LimitRow { kappa: 0.0, metric_sup: 0.0, potential_sup: 0.0 }
        );
        let rows = euclidean_limit_check(Model::Hyperbolic, 3, &[0.5, 0.25, 0.1]).unwrap();
        let ratio = rows[0].potential_sup / rows[1].potential_sup;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
        assert!(rows[2].metric_sup <= 0.01);
        assert!(rows.windows(2).all(|w| w[1].metric_sup < w[0].metric_sup && w[1].potential_sup < w[0].potential_sup));
    }

    #[test]
    fn sphere_areas_match_closed_forms() {
        assert_abs_diff_eq!(unit_sphere_area(2), 4.0 * std::f64::consts::PI, epsilon = 1e-14);
        assert_abs_diff_eq!(unit_sphere_area(3), 2.0 * std::f64::consts::PI.powi(2), epsilon = 1e-13);
    }
}
