//! First Dirichlet eigenvalue of geodesic balls by Sturm shooting on the
//! radial equation `f'' + (n−1)(sn'/sn) f' + λ f = 0`, `f'(0) = 0`, `f(R) = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spaceform::{Model, SpaceFormBall};

/// Bracket `[lower, upper]` for the first Dirichlet eigenvalue of `−Δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenEstimate {
    pub lower: f64,
    pub upper: f64,
    pub dim: usize,
    pub geodesic_radius: f64,
    /// Scalar curvature `K` of the model.
    pub scalar_curvature: f64,
}

impl EigenEstimate {
    pub fn value(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// `(n−1)λ₁ − K`: positive exactly when `(n−1)Δ + K` with Dirichlet data
    /// is negative definite, which is what the conformal solves need.
    pub fn operator_margin(&self) -> f64 {
        (self.dim as f64 - 1.0) * self.lower - self.scalar_curvature
    }
}

const STEPS: usize = 20000;
/// Relative step bound near the regular singular point at the origin.
const ORIGIN_STEP: f64 = 0.02;

struct RadialOde {
    dim: usize,
    model: Model,
    kappa: f64,
}

impl RadialOde {
    /// `(n−1) sn'(r)/sn(r)`.
    fn drift(&self, r: f64) -> f64 {
        let m = self.dim as f64 - 1.0;
        let k = self.kappa;
        match self.model {
            Model::Euclidean => m / r,
            Model::Hyperbolic => m * k / (k * r).tanh(),
            Model::Spherical => m * k / (k * r).tan(),
        }
    }

    fn rhs(&self, r: f64, y: [f64; 2], lambda: f64) -> [f64; 2] {
        [y[1], -self.drift(r) * y[1] - lambda * y[0]]
    }

    /// Integrates from near the origin to `radius`; returns whether `f`
    /// changes sign on `(0, radius]` or ends nonpositive.
    fn overshoots(&self, lambda: f64, radius: f64) -> bool {
        let n = self.dim as f64;
        let r0 = radius * 1e-6;
        // f = 1 − λr²/(2n) + O(r⁴)
        let mut y = [1.0 - lambda * r0 * r0 / (2.0 * n), -lambda * r0 / n];
        let mut r = r0;
        let big = radius / STEPS as f64;
        while r < radius {
            let h = (ORIGIN_STEP * r).min(big).min(radius - r);
            let k1 = self.rhs(r, y, lambda);
            let k2 = self.rhs(r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]], lambda);
            let k3 = self.rhs(r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]], lambda);
            let k4 = self.rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]], lambda);
            y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
            r += h;
            if y[0] <= 0.0 {
                return true;
            }
        }
        false
    }
}

/// First Dirichlet eigenvalue of the geodesic ball of radius `radius` in the
/// model of curvature scale `kappa`. Unlike [`SpaceFormBall`], hemispheres
/// are allowed here.
pub fn first_eigenvalue(model: Model, dim: usize, radius: f64, kappa: f64) -> Result<EigenEstimate> {
    if !(radius > 0.0 && radius.is_finite()) || dim < 2 {
        return Err(Error::InvalidParameter(format!("radius {radius}, dimension {dim}")));
    }
    let kappa = if model == Model::Euclidean { 1.0 } else { kappa };
    if model == Model::Spherical && kappa * radius >= std::f64::consts::PI {
        return Err(Error::UnsupportedRadius { radius, reason: "spherical balls must have κR < π".into() });
    }
    let ode = RadialOde { dim, model, kappa };
    let mut lo = 0.0;
    let mut hi = 1.0 / (radius * radius);
    while !ode.overshoots(hi, radius) {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if ode.overshoots(mid, radius) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let n = dim as f64;
    let k = match model {
        Model::Euclidean => 0.0,
        Model::Hyperbolic => -n * (n - 1.0) * kappa * kappa,
        Model::Spherical => n * (n - 1.0) * kappa * kappa,
    };
    Ok(EigenEstimate { lower: lo, upper: hi, dim, geodesic_radius: radius, scalar_curvature: k })
}

pub fn first_eigenvalue_radial(ball: &SpaceFormBall) -> Result<EigenEstimate> {
    first_eigenvalue(ball.model(), ball.dim(), ball.geodesic_radius(), ball.curvature_scale())
}
