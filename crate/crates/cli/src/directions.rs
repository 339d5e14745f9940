//! Variation directions named in a scenario.

use anyhow::{bail, Context, Result};

use critvol::fields::{jet, BoundaryFlag, ScalarField, SymJet, SymTensorField};
use critvol::spaceform::SpaceFormBall;
use critvol::ttensor::{ball_tt_direction, SphericalHarmonic};
use critvol::variation::oracle::random_polynomial_tensor;

use crate::config::{DirectionSpec, HarmonicSpec};

/// A direction with a short human-readable label.
pub struct Direction {
    pub label: String,
    pub field: SymTensorField,
}

pub fn harmonics(spec: &HarmonicSpec, sphere_dim: usize) -> Result<Vec<SphericalHarmonic>> {
    Ok(match spec {
        HarmonicSpec::Product { i, j } => vec![SphericalHarmonic::product(sphere_dim, *i, *j)?],
        HarmonicSpec::Difference { i, j } => vec![SphericalHarmonic::difference(sphere_dim, *i, *j)?],
        HarmonicSpec::Catalogue => SphericalHarmonic::catalogue(sphere_dim)?,
    })
}

/// `λ ĥ` for a constant matrix `ĥ` (row-major).
pub fn parallel_direction(ball: &SpaceFormBall, hhat: &[f64]) -> SymTensorField {
    let lambda = ball.critical_potential().lambda;
    SymTensorField::constant_matrix(*ball.chart(), hhat).times_scalar(&lambda, BoundaryFlag::VanishesOnBoundary)
}

/// `diag(1, −1, 0, …)`
pub fn default_hhat(dim: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim * dim];
    m[0] = 1.0;
    m[dim + 1] = -1.0;
    m
}

/// `amplitude (1 − |x|²/ρ²) g`
pub fn conformal_direction(ball: &SpaceFormBall, amplitude: f64) -> SymTensorField {
    let rho2 = ball.coord_radius().powi(2);
    let w = ScalarField::new(*ball.chart(), move |x| (jet::norm_sq(x) * (-1.0 / rho2) + 1.0) * amplitude);
    ball.metric().scalar_multiple(&w, BoundaryFlag::VanishesOnBoundary)
}

pub fn polynomial_direction(ball: &SpaceFormBall, seed: u64, vanish_on_boundary: bool) -> SymTensorField {
    let raw = random_polynomial_tensor(*ball.chart(), seed);
    if !vanish_on_boundary {
        return raw;
    }
    let rho2 = ball.coord_radius().powi(2);
    let n = ball.dim();
    SymTensorField::new(*ball.chart(), move |x| {
        let bubble = jet::norm_sq(x) * -1.0 + rho2;
        let h = raw.eval(x);
        SymJet::from_fn(n, |i, j| h.get(i, j) * bubble)
    })
    .with_boundary_flag(BoundaryFlag::VanishesOnBoundary)
}

pub fn build(spec: &DirectionSpec, ball: &SpaceFormBall) -> Result<Vec<Direction>> {
    let n = ball.dim();
    Ok(match spec {
        DirectionSpec::TtProfile { harmonic, inner, outer } => harmonics(harmonic, n - 1)?
            .into_iter()
            .map(|y| {
                let field = ball_tt_direction(ball, &y, *inner, *outer)
                    .with_context(|| format!("TT direction for {} on ({inner}, {outer})", y.label()))?;
                Ok(Direction { label: format!("tt {} ({inner}, {outer})", y.label()), field })
            })
            .collect::<Result<Vec<_>>>()?,
        DirectionSpec::ParallelTracefree { hhat } => {
            if hhat.len() != n {
                bail!("hhat must be {n}×{n}");
            }
            let flat: Vec<f64> = hhat.iter().flatten().copied().collect();
            vec![Direction { label: "potential times constant trace-free matrix".into(), field: parallel_direction(ball, &flat) }]
        }
        DirectionSpec::Conformal { amplitude } => {
            vec![Direction { label: format!("conformal, amplitude {amplitude}"), field: conformal_direction(ball, *amplitude) }]
        }
        DirectionSpec::CustomPolynomial { seed, vanish_on_boundary } => vec![Direction {
            label: format!("polynomial seed {seed}"),
            field: polynomial_direction(ball, *seed, *vanish_on_boundary),
        }],
    })
}
