use super::*;
use crate::fields::{Jet2, Support};
use crate::spaceform::{Model, SpaceFormBall};
use crate::tolerances;
use crate::variation::DirectionPoint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn unit_sphere_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    annulus_point(rng, n, 1.0 - 1e-15, 1.0)
}

fn tt_on(metric: &WarpedMetric, harmonic: &SphericalHarmonic, r1: f64, r2: f64) -> (TTProfile, SymTensorField) {
    let a = RadialProfile::bump(r1, r2, 1.0).unwrap();
    let profile = solve_profile(metric, &a, harmonic).unwrap();
    let h = assemble_tt(&profile);
    (profile, h)
}

#[test]
fn catalogue_harmonics_are_eigenfunctions() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in 2..=5 {
        let cat = SphericalHarmonic::catalogue(m).unwrap();
        assert_eq!(cat.len(), (m + 1) * m / 2 + m);
        for y in &cat {
            assert_eq!(y.eigenvalue(), 2.0 * (m as f64 + 1.0));
            assert!(y.eigenvalue() > m as f64);
            for _ in 0..20 {
                let w = unit_sphere_point(&mut rng, m + 1);
                assert!(y.eigen_defect(&w) < 1e-10, "{} m={m}", y.label());
            }
        }
    }
    let lin = SphericalHarmonic::linear(3, &[1.0, 0.0, 2.0, 0.0]).unwrap();
    assert_eq!(lin.eigenvalue(), 3.0);
    assert!(lin.eigen_defect(&[0.6, 0.0, 0.8, 0.0]) < 1e-12);
}

#[test]
fn extension_closed_forms_match_automatic_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let harmonics = [
        SphericalHarmonic::difference(3, 1, 3).unwrap(),
        SphericalHarmonic::product(3, 0, 2).unwrap(),
        SphericalHarmonic::linear(3, &[0.3, -1.0, 0.5, 2.0]).unwrap(),
    ];
    for y in &harmonics {
        for _ in 0..10 {
            let p = annulus_point(&mut rng, 4, 0.3, 1.7);
            let jets = Jet2::seed(&p);
            let ext = y.extension(&jets);
            let auto = y.polynomial(&jets) * jet::norm_sq(&jets).sqrt().powi(-(y.degree() as i32));
            assert!((ext.value.value() - auto.value()).abs() < 1e-13);
            for i in 0..4 {
                assert!((ext.gradient[i].value() - auto.grad(i)).abs() < 1e-12);
                for j in 0..4 {
                    assert!((ext.hessian[i * 4 + j].value() - auto.hess(i, j)).abs() < 1e-11);
                    // the closed-form gradient differentiates to the closed-form Hessian
                    assert!((ext.gradient[i].grad(j) - ext.hessian[i * 4 + j].value()).abs() < 1e-11);
                }
            }
        }
    }
}

#[test]
fn quadratic_harmonic_validation() {
    assert!(SphericalHarmonic::quadratic(2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    assert!(SphericalHarmonic::quadratic(2, &[0.0; 9]).is_err());
    assert!(SphericalHarmonic::quadratic(2, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).is_err());
    let y = SphericalHarmonic::quadratic(2, &[1.0, 0.5, 0.0, 0.5, -2.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
    assert!(y.eigen_defect(&[0.0, 0.6, 0.8]) < 1e-12);
}

#[test]
fn determinant_for_two_sphere() {
    let metric = WarpedMetric::euclidean(2, 1.0).unwrap();
    let y = SphericalHarmonic::product(2, 0, 1).unwrap();
    let (profile, _) = tt_on(&metric, &y, 0.2, 0.8);
    assert_eq!(profile.determinant(), 4.0);
}

#[test]
fn first_eigenvalue_is_rejected() {
    let metric = WarpedMetric::euclidean(3, 1.0).unwrap();
    let a = RadialProfile::bump(0.2, 0.8, 1.0).unwrap();
    let y = SphericalHarmonic::linear(3, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(matches!(solve_profile(&metric, &a, &y), Err(Error::DegenerateSystem { .. })));
}

#[test]
fn supports_are_validated() {
    let metric = WarpedMetric::euclidean(2, 1.0).unwrap();
    let y = SphericalHarmonic::product(2, 0, 1).unwrap();
    assert!(matches!(RadialProfile::bump(0.0, 0.5, 1.0), Err(Error::Support(_))));
    let a = RadialProfile::bump(0.5, 1.2, 1.0).unwrap();
    assert!(matches!(solve_profile(&metric, &a, &y), Err(Error::Support(_))));
    // a Gaussian does not vanish at the endpoints
    let gauss = RadialProfile::custom(0.2, 0.8, |r| {
        let t = r - 0.5;
        (-(t * t).scale(10.0)).exp()
    });
    assert!(matches!(gauss, Err(Error::Support(_))));
    let ok = RadialProfile::custom(0.2, 0.8, |r| {
        let t = (r - 0.2) * (0.8 - r);
        (-(t.recip())).exp().scale(3.0)
    });
    assert!(ok.is_ok());
}

#[test]
fn zero_profile_gives_zero_tensor() {
    let metric = WarpedMetric::space_form(3, 2.0, -1.0).unwrap();
    let y = SphericalHarmonic::difference(3, 0, 1).unwrap();
    let profile = solve_profile(&metric, &RadialProfile::zero(0.3, 1.5).unwrap(), &y).unwrap();
    for r0 in [0.4, 0.9, 1.4] {
        let s = profile.series_at(r0);
        assert_eq!([s.a, s.b, s.c, s.d], [Series::zero(); 4]);
    }
    let h = assemble_tt(&profile);
    assert!(h.eval_at(&[0.5, 0.2, 0.1, 0.3]).unwrap().values().iter().all(|v| *v == 0.0));
}

#[test]
fn euclidean_b_matches_symbolic_derivative() {
    let (r1, r2) = (0.3, 0.9);
    let m = 3;
    let metric = WarpedMetric::euclidean(m, 1.0).unwrap();
    let y = SphericalHarmonic::product(m, 0, 1).unwrap();
    let (profile, _) = tt_on(&metric, &y, r1, r2);
    let kappa = y.eigenvalue();
    let w = r2 - r1;
    for k in 1..40 {
        let r = r1 + w * k as f64 / 40.0;
        let t = (r - r1) * (r2 - r);
        let a = (4.0 / (w * w) - 1.0 / t).exp();
        let da = a * (r1 + r2 - 2.0 * r) / (t * t);
        let b = r * r / kappa * (da + (m as f64 + 1.0) * a / r);
        let got = profile.series_at(r).b.value();
        assert!((got - b).abs() <= 1e-10 * b.abs().max(1.0), "r={r}: {got} vs {b}");
    }
}

#[test]
fn profile_system_holds() {
    let metric = WarpedMetric::space_form(4, 3.0, -0.7).unwrap();
    let y = SphericalHarmonic::difference(4, 2, 4).unwrap();
    let (profile, _) = tt_on(&metric, &y, 0.5, 2.0);
    for k in 1..30 {
        let r = 0.5 + 1.5 * k as f64 / 30.0;
        for res in profile.system_residuals(r) {
            assert!(res.abs() < 1e-9, "r={r}: {res}");
        }
    }
}

#[test]
fn polar_metric_matches_space_form() {
    // the polar chart of the unit-curvature hyperbolic space has K = −n(n−1)
    let metric = WarpedMetric::space_form(2, 3.0, -1.0).unwrap();
    let g = metric.metric();
    let k = g.scalar_curvature_at(&[0.4, -0.7, 1.1]).unwrap();
    assert!((k + 6.0).abs() < 1e-10);
    let custom = WarpedMetric::custom(2, 3.0, |r| r * r + 1.0).unwrap();
    let kc = custom.metric().scalar_curvature_at(&[0.4, -0.7, 1.1]).unwrap();
    assert!((kc - k).abs() < 1e-10);
    assert!(WarpedMetric::space_form(2, 1.5, 1.0).is_err());
    assert!(WarpedMetric::euclidean(1, 1.0).is_err());
}

fn check_tt(metric: &WarpedMetric, harmonic: &SphericalHarmonic, r1: f64, r2: f64, seed: u64, count: usize) {
    let (profile, h) = tt_on(metric, harmonic, r1, r2);
    let g = metric.metric();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = metric.sphere_dim() + 1;
    let pts: Vec<Vec<f64>> = (0..count).map(|_| annulus_point(&mut rng, n, r1, r2)).collect();
    let d = tt_defects(&g, &h, &pts).unwrap();
    assert!(d.norm_sup > 0.1, "{d:?}");
    assert!(d.trace_sup <= tolerances::TT_TRACE, "{d:?}");
    assert!(d.divergence_sup <= tolerances::TT_DIVERGENCE, "{d:?}");
    assert!(d.second_divergence_sup <= tolerances::TT_SECOND_DIVERGENCE, "{d:?}");
    // h(∂r, ∂r) = a Y
    for p in pts.iter().take(20) {
        let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        let hv = h.eval_at(p).unwrap().values();
        let mut hrr = 0.0;
        for i in 0..n {
            for j in 0..n {
                hrr += hv[i * n + j] * p[i] * p[j] / (r * r);
            }
        }
        let ay = profile.series_at(r).a.value() * harmonic.extension(&Jet2::seed(p)).value.value();
        assert!((hrr - ay).abs() < 1e-13, "{hrr} vs {ay}");
    }
}

#[test]
fn tt_euclidean_all_sphere_dims() {
    for m in 2..=4 {
        let metric = WarpedMetric::euclidean(m, 1.0).unwrap();
        for (k, y) in SphericalHarmonic::catalogue(m).unwrap().iter().take(2).enumerate() {
            check_tt(&metric, y, 0.2, 0.85, 10 * m as u64 + k as u64, 40);
        }
    }
}

#[test]
fn tt_hyperbolic_all_sphere_dims() {
    for m in 2..=4 {
        let metric = WarpedMetric::space_form(m, 2.0, -1.0).unwrap();
        let y = SphericalHarmonic::difference(m, 0, m).unwrap();
        check_tt(&metric, &y, 0.4, 1.6, 100 + m as u64, 40);
    }
}

#[test]
fn tt_spherical_and_custom_lapse() {
    let metric = WarpedMetric::space_form(3, 1.0, 1.0).unwrap();
    check_tt(&metric, &SphericalHarmonic::product(3, 1, 2).unwrap(), 0.3, 0.9, 7, 30);
    let custom = WarpedMetric::custom(2, 2.0, |r| (r * r).scale(0.5) + (r * r * r * r).scale(0.1) + 1.0).unwrap();
    check_tt(&custom, &SphericalHarmonic::product(2, 0, 2).unwrap(), 0.5, 1.5, 8, 30);
}

#[test]
fn tt_is_smooth_across_support_ends() {
    let metric = WarpedMetric::euclidean(2, 1.0).unwrap();
    let (_, h) = tt_on(&metric, &SphericalHarmonic::product(2, 0, 1).unwrap(), 0.3, 0.7);
    let dir = [0.48, 0.6, 0.64];
    for r in [0.3, 0.7] {
        for delta in [-1e-3, 1e-3] {
            let p: Vec<f64> = dir.iter().map(|v| v * (r + delta)).collect();
            let hj = h.eval_at(&p).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let e = hj.get(i, j);
                    assert!(e.value().abs() < 1e-9);
                    assert!(e.gradient().iter().all(|v| v.abs() < 1e-9));
                    assert!(e.hessian().iter().all(|v| v.abs() < 1e-9));
                }
            }
        }
    }
    let outside: Vec<f64> = dir.iter().map(|v| v * 0.9).collect();
    assert!(h.eval_at(&outside).unwrap().values().iter().all(|v| *v == 0.0));
}

#[test]
fn euclidean_transplant_is_identity() {
    let ball = SpaceFormBall::new(Model::Euclidean, 3, 1.0, 0.0).unwrap();
    let metric = WarpedMetric::euclidean(2, 1.0).unwrap();
    let (_, h) = tt_on(&metric, &SphericalHarmonic::difference(2, 0, 1).unwrap(), 0.2, 0.8);
    let hx = transplant_to_chart(&h, &metric, &ball).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let p = annulus_point(&mut rng, 3, 0.1, 0.95);
        assert_eq!(h.eval_at(&p).unwrap().values(), hx.eval_at(&p).unwrap().values());
    }
    let same = transplant_to_chart(&hx, &metric, &ball).unwrap();
    assert_eq!(same.eval_at(&[0.3, 0.2, 0.1]).unwrap(), hx.eval_at(&[0.3, 0.2, 0.1]).unwrap());
}

#[test]
fn transplanted_tensors_stay_tt() {
    let cases = [
        (Model::Euclidean, 3, 1.0, 0.0, 0.2, 0.8),
        (Model::Hyperbolic, 3, 1.0, 1.0, 0.2, 0.9),
        (Model::Hyperbolic, 4, 1.5, 1.0, 0.3, 1.2),
        (Model::Spherical, 3, 0.7, 1.0, 0.1, 0.6),
        (Model::Spherical, 3, 2.0, 1.0, 0.3, 1.4),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (model, n, radius, kappa, r1, r2) in cases {
        let ball = SpaceFormBall::new(model, n, radius, kappa).unwrap();
        let y = SphericalHarmonic::product(n - 1, 0, 1).unwrap();
        let h = ball_tt_direction(&ball, &y, r1, r2).unwrap();
        let Support::Annulus { inner, outer } = h.support() else { panic!("annular support expected") };
        let pts: Vec<Vec<f64>> = (0..30).map(|_| annulus_point(&mut rng, n, inner, outer)).collect();
        let d = tt_defects(ball.metric(), &h, &pts).unwrap();
        assert!(d.norm_sup > 1e-3, "{model:?} {d:?}");
        assert!(d.trace_sup <= tolerances::TT_TRANSPLANT, "{model:?} {d:?}");
        assert!(d.divergence_sup <= tolerances::TT_TRANSPLANT, "{model:?} {d:?}");
        // the linearized scalar curvature of a TT direction vanishes on a space form
        let dp = DirectionPoint::new(ball.metric(), &h, &pts[0]).unwrap();
        assert!(dp.linearized_scalar().abs() < 1e-6);
    }
}

#[test]
fn transplant_rejects_mismatched_data() {
    let ball = SpaceFormBall::new(Model::Hyperbolic, 3, 0.5, 1.0).unwrap();
    let y = SphericalHarmonic::product(2, 0, 1).unwrap();
    assert!(matches!(ball_tt_direction(&ball, &y, 0.2, 0.6), Err(Error::RadiusMismatch(_))));
    let flat = WarpedMetric::euclidean(2, 1.0).unwrap();
    let (_, h) = tt_on(&flat, &y, 0.1, 0.3);
    assert!(matches!(transplant_to_chart(&h, &flat, &ball), Err(Error::InvalidParameter(_))));
    let hyp = WarpedMetric::space_form(2, 2.0, -1.0).unwrap();
    let (_, wide) = tt_on(&hyp, &y, 0.2, 1.5);
    assert!(matches!(transplant_to_chart(&wide, &hyp, &ball), Err(Error::RadiusMismatch(_))));
    let big = SpaceFormBall::new(Model::Spherical, 3, 2.0, 1.0).unwrap();
    assert!(matches!(ball_tt_direction(&big, &y, 0.3, 1.7), Err(Error::RadiusMismatch(_))));
}
