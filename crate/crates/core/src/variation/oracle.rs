//! Finite-difference oracles for the analytic variation formulas.
//!
//! These deliberately go through the full nonlinear scalar curvature and
//! mean curvature of perturbed metrics, so they share no algebra with the
//! closed-form expressions they check.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fields::{BoundaryFlag, Chart, Jet2, SymJet, SymTensorField};
use crate::riemann::boundary::level_sphere_geometry;
use crate::riemann::MetricField;

/// Richardson table for a symmetric difference quotient with error
/// expansion in even powers of the step: uses steps `t, t/2, t/4`.
fn richardson_even(f: impl Fn(f64) -> Result<f64>, t: f64) -> Result<f64> {
    let d1 = f(t)?;
    let d2 = f(t / 2.0)?;
    let d3 = f(t / 4.0)?;
    let e1 = (4.0 * d2 - d1) / 3.0;
    let e2 = (4.0 * d3 - d2) / 3.0;
    Ok((16.0 * e2 - e1) / 15.0)
}

/// `d/dt R(g + t h)(p)` at `t = 0` by extrapolated central differences.
pub fn fd_linearized_scalar(g: &MetricField, h: &SymTensorField, p: &[f64], step: f64) -> Result<f64> {
    richardson_even(
        |t| {
            let plus = g.perturbed(h, t).scalar_curvature_at(p)?;
            let minus = g.perturbed(h, -t).scalar_curvature_at(p)?;
            Ok((plus - minus) / (2.0 * t))
        },
        step,
    )
}

/// `d²/dt² R(g + t h + (t²/2) h')(p)` at `t = 0` by extrapolated second differences.
pub fn fd_second_scalar(
    g: &MetricField,
    h: &SymTensorField,
    hprime: &SymTensorField,
    p: &[f64],
    step: f64,
) -> Result<f64> {
    let r0 = g.scalar_curvature_at(p)?;
    richardson_even(
        |t| {
            let plus = g.perturbed2(h, hprime, t).scalar_curvature_at(p)?;
            let minus = g.perturbed2(h, hprime, -t).scalar_curvature_at(p)?;
            Ok((plus - 2.0 * r0 + minus) / (t * t))
        },
        step,
    )
}

/// `d/dt H(g + t h)(p)` for the level sphere through `p`.
pub fn fd_mean_curvature_prime(g: &MetricField, h: &SymTensorField, p: &[f64], step: f64) -> Result<f64> {
    richardson_even(
        |t| {
            let plus = level_sphere_geometry(&g.perturbed(h, t), p)?.mean_curvature;
            let minus = level_sphere_geometry(&g.perturbed(h, -t), p)?.mean_curvature;
            Ok((plus - minus) / (2.0 * t))
        },
        step,
    )
}

/// `|a − b| / max(|b|, floor)`.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

/// A random symmetric tensor field whose components are polynomials of
/// degree ≤ 2 with coefficients in `[-1, 1]`.
pub fn random_polynomial_tensor(chart: Chart, seed: u64) -> SymTensorField {
    let n = chart.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ncomp = n * (n + 1) / 2;
    // per component: constant, n linear, n(n+1)/2 quadratic
    let per = 1 + n + ncomp;
    let coeffs: Vec<f64> = (0..ncomp * per).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SymTensorField::new(chart, move |x| {
        let mut c = 0;
        SymJet::from_fn(n, |_, _| {
            let base = &coeffs[c * per..(c + 1) * per];
            c += 1;
            let mut v = Jet2::constant(base[0]);
            for i in 0..n {
                v += x[i] * base[1 + i];
            }
            let mut q = 1 + n;
            for j in 0..n {
                for i in 0..=j {
                    v += x[i] * x[j] * base[q];
                    q += 1;
                }
            }
            v
        })
    })
    .with_boundary_flag(BoundaryFlag::Unconstrained)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_is_high_order() {
        // symmetric quotient of sin at 0.3 with error O(t²)
        let f = |t: f64| Ok(((0.3 + t).sin() - (0.3 - t).sin()) / (2.0 * t));
        let v = richardson_even(f, 0.1).unwrap();
        assert!((v - 0.3f64.cos()).abs() < 1e-11);
    }

    #[test]
    fn random_tensor_is_reproducible() {
        let chart = Chart::new(3, crate::fields::ChartKind::ConformalBall, 1.0).unwrap();
        let a = random_polynomial_tensor(chart, 5).eval_at(&[0.1, 0.2, 0.3]).unwrap();
        let b = random_polynomial_tensor(chart, 5).eval_at(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(a, b);
    }
}
