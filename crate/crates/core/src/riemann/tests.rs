use super::boundary::{boundary_geometry, level_sphere_geometry};
use super::*;
use crate::fields::{jet, BallQuadrature, ChartKind, QuadratureOrder};
use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn chart(n: usize, radius: f64) -> Chart {
    Chart::new(n, ChartKind::ConformalBall, radius).unwrap()
}

/// `(1 + c|x|²/4)^{-2} δ`, constant sectional curvature `c`.
fn model(n: usize, radius: f64, c: f64) -> MetricField {
    MetricField::conformally_flat(ScalarField::new(chart(n, radius), move |x| {
        (1.0 + jet::norm_sq(x) * (c / 4.0)).powi(-2)
    }))
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-radius..radius)).collect();
        if p.iter().map(|v| v * v).sum::<f64>() < radius * radius {
            return p;
        }
    }
}

#[test]
fn flat_space_has_no_curvature() {
    let g = MetricField::euclidean(chart(4, 1.0));
    let cp = g.curvature_at(&[0.1, 0.2, -0.3, 0.4]).unwrap();
    assert!(cp.riemann.iter().all(|v| *v == 0.0));
    assert_eq!(cp.scalar, 0.0);
}

#[test]
fn hyperbolic_and_spherical_scalar_curvature() {
    let h = model(3, 1.0, -1.0);
    assert_abs_diff_eq!(h.scalar_curvature_at(&[0.3, 0.0, 0.0]).unwrap(), -6.0, epsilon = 1e-9);
    let s = model(3, 1.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let p = random_point(&mut rng, 3, 1.0);
        assert_abs_diff_eq!(s.scalar_curvature_at(&p).unwrap(), 6.0, epsilon = 1e-9);
    }
}

#[test]
fn constant_curvature_and_symmetries_on_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, c) in [(3, 0.0), (3, -1.0), (4, 1.0), (5, -0.5), (6, 2.0)] {
        let g = model(n, 1.0, c);
        for _ in 0..50 {
            let p = random_point(&mut rng, n, 1.0);
            let cp = g.curvature_at(&p).unwrap();
            assert!(cp.constant_curvature_defect(c) < 1e-9);
            assert!(cp.symmetry_defect() < 1e-10);
            assert_abs_diff_eq!(cp.scalar, (n * (n - 1)) as f64 * c, epsilon = 1e-9);
        }
    }
}

#[test]
fn symmetries_on_a_generic_metric() {
    let c = chart(3, 1.0);
    let g = MetricField::new(SymTensorField::new(c, |x| {
        SymJet::from_fn(3, |i, j| {
            let base = if i == j { Jet2::constant(1.0) + x[i] * x[i] * 0.3 } else { x[i] * x[j] * 0.2 };
            base + (x[0] * (i + 2 * j) as f64).sin() * 0.05
        })
    }));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let p = random_point(&mut rng, 3, 0.9);
        assert!(g.curvature_at(&p).unwrap().symmetry_defect() < 1e-10);
    }
}

#[test]
fn potential_hessian_on_unit_ball() {
    let c = chart(3, 1.0);
    let g = MetricField::euclidean(c);
    let lam = ScalarField::new(c, |x| (1.0 - jet::norm_sq(x)) / 4.0);
    let p = [0.2, -0.1, 0.3];
    let cp = g.curvature_at(&p).unwrap();
    let d = cp.scalar_derivs(&lam.eval_at(&p).unwrap());
    for i in 0..3 {
        for j in 0..3 {
            assert_abs_diff_eq!(d.hessian[i * 3 + j], if i == j { -0.5 } else { 0.0 }, epsilon = 1e-15);
        }
    }
    assert_abs_diff_eq!(d.laplacian, -1.5, epsilon = 1e-15);
}

#[test]
fn hyperbolic_potential_trace_identity() {
    // κ = 1, geodesic radius R = 0.5, λ = (1 − cosh r / cosh R)/(n−1)
    let n = 3;
    let big_r: f64 = 0.5;
    let rho = 2.0 * (big_r / 2.0).tanh();
    let g = model(n, rho, -1.0);
    let lam = ScalarField::new(*g.chart(), move |x| {
        let r = (jet::norm_sq(x).sqrt() * 0.5).atanh() * 2.0;
        (1.0 - r.cosh() / big_r.cosh()) / (n as f64 - 1.0)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let p = random_point(&mut rng, n, rho);
        let cp = g.curvature_at(&p).unwrap();
        let j = lam.eval_at(&p).unwrap();
        let d = cp.scalar_derivs(&j);
        let expected = n as f64 * j.value() - n as f64 / (n as f64 - 1.0);
        assert_abs_diff_eq!(d.laplacian, expected, epsilon = 1e-8);
    }
}

#[test]
fn metric_is_parallel() {
    let g = model(4, 1.0, -1.0);
    let p = [0.1, 0.3, -0.2, 0.25];
    let cp = g.curvature_at(&p).unwrap();
    let t = cp.tensor_derivs(&g.eval(&Jet2::seed(&p)));
    assert!(t.first.iter().all(|v| v.abs() < 1e-13));
    assert!(t.second.iter().all(|v| v.abs() < 1e-12));
    let ops = FrameOps::new(&t.in_frame(&cp));
    assert!(ops.divergence.iter().all(|v| v.abs() < 1e-13));
    assert_abs_diff_eq!(ops.trace, 4.0, epsilon = 1e-13);
}

#[test]
fn unit_sphere_in_flat_space() {
    let g = MetricField::euclidean(chart(3, 1.0));
    let b = boundary_geometry(&g, &[0.6, 0.0, 0.8]).unwrap();
    assert_abs_diff_eq!(b.mean_curvature, 2.0, epsilon = 1e-13);
    assert!(b.umbilic_defect() < 1e-13);
    assert_abs_diff_eq!(b.second_fundamental[0], 1.0, epsilon = 1e-13);
    assert_abs_diff_eq!(b.normal_divergence, 2.0, epsilon = 1e-13);
    assert_abs_diff_eq!(b.boundary_scalar, 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(b.area_density, 1.0, epsilon = 1e-13);
    let lhs = 2.0 * b.ricci_normal + b.boundary_scalar;
    let rhs = 0.0 + 0.5 * b.mean_curvature * b.mean_curvature;
    assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
}

#[test]
fn hyperbolic_geodesic_sphere_mean_curvature() {
    for n in [3, 4, 5] {
        let big_r: f64 = 0.8;
        let rho = 2.0 * (big_r / 2.0).tanh();
        let g = model(n, rho, -1.0);
        let mut p = vec![0.0; n];
        p[0] = rho * 0.6;
        p[n - 1] = rho * 0.8;
        let b = boundary_geometry(&g, &p).unwrap();
        assert_abs_diff_eq!(b.mean_curvature, (n - 1) as f64 / big_r.tanh(), epsilon = 1e-8);
        assert_abs_diff_eq!(b.mean_curvature, b.normal_divergence, epsilon = 1e-12);
        // geodesic sphere of radius R has sectional curvature 1/sinh²R
        let m = (n - 1) as f64;
        assert_abs_diff_eq!(b.boundary_scalar, m * (m - 1.0) / big_r.sinh().powi(2), epsilon = 1e-8);
    }
}

#[test]
fn off_boundary_point_rejected() {
    let g = MetricField::euclidean(chart(3, 1.0));
    assert!(boundary_geometry(&g, &[0.5, 0.0, 0.0]).is_err());
    assert!(level_sphere_geometry(&g, &[0.5, 0.0, 0.0]).is_ok());
}

#[test]
fn divergence_theorem_on_curved_balls() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for (n, c) in [(3, -1.0), (3, 1.0), (4, -0.5)] {
        let radius = 0.9;
        let g = model(n, radius, c);
        let q = BallQuadrature::new(n, radius, QuadratureOrder::new(24, 12));
        for _ in 0..5 {
            let coeffs: Vec<f64> = (0..3 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let chart = *g.chart();
            let field = crate::fields::VectorField::new(chart, move |x| {
                (0..n)
                    .map(|i| {
                        let a = coeffs[3 * i];
                        let b = coeffs[3 * i + 1];
                        let c2 = coeffs[3 * i + 2];
                        x[i] * a + x[(i + 1) % n] * x[i] * b + Jet2::constant(c2) + x[(i + 2) % n] * x[(i + 2) % n] * a
                    })
                    .collect()
            });
            let lhs = q
                .integrate_coordinate(|p| {
                    let cp = g.curvature_at(p)?;
                    Ok(cp.vector_divergence(&field.eval_at(p)?) * cp.volume_density())
                })
                .unwrap();
            let rhs = q
                .integrate_sphere(|p| {
                    let b = boundary_geometry(&g, p)?;
                    let x = field.eval_at(p)?;
                    let xv: Vec<f64> = x.iter().map(Jet2::value).collect();
                    let flux = super::boundary::bilinear(&b.curvature.metric, n, &xv, &b.normal);
                    Ok(flux * b.area_density)
                })
                .unwrap();
            assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
        }
    }
}

#[test]
fn jet_inverse_matches_numeric_inverse() {
    let x = Jet2::seed(&[0.3, -0.2, 0.1]);
    let m = SymJet::from_fn(3, |i, j| {
        if i == j {
            Jet2::constant(2.0) + x[i] * x[i]
        } else {
            x[i] * x[j] * 0.5
        }
    });
    let inv = invert_jet(&m).unwrap();
    // m · inv = I, including derivatives
    for i in 0..3 {
        for j in 0..3 {
            let s: Jet2 = (0..3).map(|k| m.get(i, k) * inv.get(k, j)).sum();
            assert_abs_diff_eq!(s.value(), if i == j { 1.0 } else { 0.0 }, epsilon = 1e-14);
            for a in 0..3 {
                assert!(s.grad(a).abs() < 1e-14);
                for b in 0..3 {
                    assert!(s.hess(a, b).abs() < 1e-13);
                }
            }
        }
    }
}
