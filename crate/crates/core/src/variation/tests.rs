use super::oracle::{fd_linearized_scalar, fd_mean_curvature_prime, fd_second_scalar, random_polynomial_tensor, relative_error};
use super::*;
use crate::error::Error;
use crate::fields::{jet, BoundaryFlag, Jet2, QuadratureOrder, ScalarField, SymJet, SymTensorField};
use crate::spaceform::{Model, SpaceFormBall};
use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn sample(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-radius..radius)).collect();
        if p.iter().map(|v| v * v).sum::<f64>() < radius * radius {
            return p;
        }
    }
}

fn saddle_direction(ball: &SpaceFormBall) -> (SymTensorField, Vec<f64>) {
    let n = ball.dim();
    let mut hhat = vec![0.0; n * n];
    hhat[0] = 1.0;
    hhat[n + 1] = -1.0;
    let lam = ball.critical_potential().lambda;
    let h = SymTensorField::constant_matrix(*ball.chart(), &hhat).times_scalar(&lam, BoundaryFlag::VanishesOnBoundary);
    (h, hhat)
}

#[test]
fn conformal_direction_on_flat_space() {
    let ball = SpaceFormBall::new(Model::Euclidean, 4, 1.0, 0.0).unwrap();
    let chart = *ball.chart();
    let u = ScalarField::new(chart, |x| x[0] * x[1] + x[2].sin() * x[3] + jet::norm_sq(x) * x[0]);
    let h = ball.metric().scalar_multiple(&u, BoundaryFlag::Unconstrained);
    let p = [0.1, -0.2, 0.3, 0.25];
    let geo = ball.metric().curvature_at(&p).unwrap();
    let lap = geo.scalar_derivs(&u.eval_at(&p).unwrap()).laplacian;
    assert_abs_diff_eq!(linearized_scalar(ball.metric(), &h, &p).unwrap(), -3.0 * lap, epsilon = 1e-13);
}

#[test]
fn linearization_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for ball in [
        SpaceFormBall::unit_family(Model::Hyperbolic, 3, 0.7).unwrap(),
        SpaceFormBall::new(Model::Spherical, 4, 0.9, 1.0).unwrap(),
    ] {
        for seed in 0..3 {
            let h = random_polynomial_tensor(*ball.chart(), seed);
            for _ in 0..4 {
                let p = sample(&mut rng, ball.dim(), ball.coord_radius() * 0.9);
                let a = linearized_scalar(ball.metric(), &h, &p).unwrap();
                let b = fd_linearized_scalar(ball.metric(), &h, &p, 1e-2).unwrap();
                assert!(relative_error(a, b, 1e-3) < 1e-6, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn second_scalar_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for ball in [
        SpaceFormBall::new(Model::Euclidean, 3, 1.0, 0.0).unwrap(),
        SpaceFormBall::unit_family(Model::Hyperbolic, 3, 0.7).unwrap(),
        SpaceFormBall::new(Model::Spherical, 4, 0.9, 1.0).unwrap(),
    ] {
        for seed in 0..3 {
            let h = random_polynomial_tensor(*ball.chart(), seed);
            let h2 = random_polynomial_tensor(*ball.chart(), 100 + seed);
            for _ in 0..3 {
                let p = sample(&mut rng, ball.dim(), ball.coord_radius() * 0.9);
                let a = second_scalar(ball.metric(), &h, &h2, &p).unwrap();
                let b = fd_second_scalar(ball.metric(), &h, &h2, &p, 2e-2).unwrap();
                assert!(relative_error(a, b, 1e-2) < 1e-5, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn second_scalar_degenerate_cases() {
    let ball = SpaceFormBall::new(Model::Euclidean, 3, 1.0, 0.0).unwrap();
    let chart = *ball.chart();
    let zero = SymTensorField::zero(chart);
    let h2 = random_polynomial_tensor(chart, 9);
    let p = [0.2, 0.1, -0.3];
    let dr = linearized_scalar(ball.metric(), &h2, &p).unwrap();
    assert_abs_diff_eq!(second_scalar(ball.metric(), &zero, &h2, &p).unwrap(), dr, epsilon = 1e-13);
    let hhat = [1.0, 0.5, 0.0, 0.5, -1.0, 0.0, 0.0, 0.0, 0.0];
    let parallel = SymTensorField::constant_matrix(chart, &hhat);
    assert_eq!(second_scalar(ball.metric(), &parallel, &zero, &p).unwrap(), 0.0);
}

#[test]
fn critical_residual_on_models() {
    let q = QuadratureOrder::new(8, 6);
    for ball in [
        SpaceFormBall::new(Model::Euclidean, 3, 0.7, 0.0).unwrap(),
        SpaceFormBall::new(Model::Hyperbolic, 4, 1.0, 1.0).unwrap(),
        SpaceFormBall::new(Model::Spherical, 5, 1.2, 1.0).unwrap(),
        SpaceFormBall::new(Model::Spherical, 3, 2.0, 1.0).unwrap(),
    ] {
        let lam = ball.critical_potential().lambda;
        let r = critical_residual(ball.metric(), &lam, &ball.quadrature(q)).unwrap();
        assert!(r.sup < 1e-8, "{r:?}");
        assert!(r.boundary_sup < 1e-12);
        assert!(r.trace_identity_sup < 1e-9);
        assert!(r.hessian_identity_sup < 1e-9);
    }
}

#[test]
fn residual_of_trivial_and_einstein_potentials() {
    let q = QuadratureOrder::new(4, 4);
    let flat = SpaceFormBall::new(Model::Euclidean, 3, 1.0, 0.0).unwrap();
    let zero = ScalarField::constant(*flat.chart(), 0.0);
    let r = critical_residual(flat.metric(), &zero, &flat.quadrature(q)).unwrap();
    assert_abs_diff_eq!(r.sup, 3f64.sqrt(), epsilon = 1e-14);
    let sph = SpaceFormBall::new(Model::Spherical, 3, 0.8, 1.0).unwrap();
    // Ric = (n−1) g on the unit sphere
    let einstein = ScalarField::constant(*sph.chart(), -0.5);
    let r = critical_residual(sph.metric(), &einstein, &sph.quadrature(q)).unwrap();
    assert!(r.sup < 1e-12);
}

#[test]
fn volume_and_first_variation() {
    let ball = SpaceFormBall::new(Model::Euclidean, 3, 1.0, 0.0).unwrap();
    let q = ball.quadrature(QuadratureOrder::new(16, 8));
    let v = volume(ball.metric(), &q).unwrap();
    assert_abs_diff_eq!(v, 4.0 * PI / 3.0, epsilon = 1e-12);
    let dv = first_variation(ball.metric(), &ball.metric().as_direction(), &q).unwrap();
    assert_abs_diff_eq!(dv, 1.5 * v, epsilon = 1e-12);
    let (h, _) = saddle_direction(&ball);
    assert!(first_variation(ball.metric(), &h, &q).unwrap().abs() < 1e-14);
}

#[test]
fn euclidean_saddle_value() {
    let ball = SpaceFormBall::new(Model::Euclidean, 3, 1.0, 0.0).unwrap();
    let q = ball.quadrature(QuadratureOrder::new(16, 8));
    let (h, hhat) = saddle_direction(&ball);
    let lam = ball.critical_potential().lambda;
    let b = second_variation(ball.metric(), &lam, &h, &q).unwrap();
    let expected = -PI / 140.0;
    assert!(relative_error(b.total, expected, 0.0) < 1e-10, "{b:?}");
    let formula = parallel_direction_value(&lam, &hhat, &q).unwrap();
    assert!(relative_error(b.total, formula, 0.0) < 1e-12);
    assert_abs_diff_eq!(b.terms().iter().sum::<f64>(), b.total, epsilon = 1e-15);
}

#[test]
fn second_variation_guards() {
    let ball = SpaceFormBall::new(Model::Euclidean, 3, 1.0, 0.0).unwrap();
    let q = ball.quadrature(QuadratureOrder::new(4, 4));
    let (h, _) = saddle_direction(&ball);
    let wrong = ScalarField::constant(*ball.chart(), 0.0);
    assert!(matches!(second_variation(ball.metric(), &wrong, &h, &q), Err(Error::InvalidCriticalPoint { .. })));
    let free = random_polynomial_tensor(*ball.chart(), 1);
    let lam = ball.critical_potential().lambda;
    assert!(matches!(second_variation(ball.metric(), &lam, &free, &q), Err(Error::BoundaryCondition(_))));
}

#[test]
fn mean_curvature_prime_cases() {
    let ball = SpaceFormBall::new(Model::Euclidean, 3, 1.0, 0.0).unwrap();
    let chart = *ball.chart();
    let p = [0.0, 0.6, 0.8];
    assert_eq!(mean_curvature_prime(ball.metric(), &SymTensorField::zero(chart), &p).unwrap(), 0.0);
    let w = ScalarField::new(chart, |x| (1.0 - jet::norm_sq(x)) * (x[0] * 0.5 + x[2] + 1.0));
    let h = ball.metric().scalar_multiple(&w, BoundaryFlag::VanishesOnBoundary);
    let a = mean_curvature_prime(ball.metric(), &h, &p).unwrap();
    let b = fd_mean_curvature_prime(ball.metric(), &h, &p, 1e-2).unwrap();
    assert!(relative_error(a, b, 1e-3) < 1e-5, "{a} vs {b}");
    // a generic direction on a curved ball
    let hyp = SpaceFormBall::new(Model::Hyperbolic, 4, 0.8, 1.0).unwrap();
    let h = random_polynomial_tensor(*hyp.chart(), 4);
    let mut p = vec![0.0; 4];
    p[1] = hyp.coord_radius() * 0.6;
    p[3] = hyp.coord_radius() * 0.8;
    let a = mean_curvature_prime(hyp.metric(), &h, &p).unwrap();
    let b = fd_mean_curvature_prime(hyp.metric(), &h, &p, 1e-2).unwrap();
    assert!(relative_error(a, b, 1e-3) < 1e-5, "{a} vs {b}");
}

#[test]
fn boundary_identities_on_unit_ball() {
    let ball = SpaceFormBall::new(Model::Euclidean, 3, 1.0, 0.0).unwrap();
    let r = boundary_identities(&ball, &ball.quadrature(QuadratureOrder::new(16, 8))).unwrap();
    assert_abs_diff_eq!(r.area, 4.0 * PI, epsilon = 1e-12);
    assert_abs_diff_eq!(r.mean_curvature, 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(r.flat_chain_rhs, r.area, epsilon = 1e-10);
    assert_abs_diff_eq!(r.minkowski_lhs, 16.0 * PI * PI, epsilon = 1e-9);
    assert_abs_diff_eq!(r.minkowski_rhs, r.minkowski_lhs, epsilon = 1e-9);
    assert!(r.umbilic_product_defect < 1e-12);
    assert!(r.ric_boundary_defect < 1e-10);
}

#[test]
fn generalized_chain_on_curved_balls() {
    for ball in [
        SpaceFormBall::new(Model::Hyperbolic, 3, 1.0, 1.0).unwrap(),
        SpaceFormBall::new(Model::Spherical, 4, 1.2, 1.0).unwrap(),
    ] {
        let r = boundary_identities(&ball, &ball.quadrature(QuadratureOrder::new(24, 8))).unwrap();
        assert!((r.general_chain_rhs - r.area).abs() < 1e-10 * r.area);
        assert!((r.area - r.analytic_area).abs() < 1e-10 * r.area);
        assert!((r.mean_curvature - r.analytic_mean_curvature).abs() < 1e-9);
        assert!(r.umbilic_product_defect < 1e-9);
        assert!(r.ric_boundary_defect < 1e-8);
    }
}

#[test]
fn tangential_part_of_radial_direction_vanishes() {
    let ball = SpaceFormBall::new(Model::Hyperbolic, 3, 0.8, 1.0).unwrap();
    let h = SymTensorField::new(*ball.chart(), |x| SymJet::from_fn(3, |i, j| x[i] * x[j] * (Jet2::constant(1.0) + x[0])))
        .with_boundary_flag(BoundaryFlag::TangentialPartVanishes);
    let sup = tangential_boundary_sup(ball.metric(), &h, &ball.quadrature(QuadratureOrder::new(4, 6))).unwrap();
    assert!(sup < 1e-14);
}
