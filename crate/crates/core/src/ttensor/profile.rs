//! Radial profiles of the construction and the ODE-free system that
//! determines `b, c, d` from `a`.

use std::fmt;
use std::sync::Arc;

use super::harmonic::SphericalHarmonic;
use super::{SeriesFn, WarpedMetric};
use crate::error::{Error, Result};
use crate::fields::{Jet2, Series};

/// Half-width of the endpoint neighbourhoods probed by the decay check, as a
/// fraction of the support width.
const DECAY_PROBE: f64 = 1e-3;
const DECAY_BOUND: f64 = 1e-10;

/// A smooth function of `r` supported in `[inner, outer]`.
#[derive(Clone)]
pub struct RadialProfile {
    inner: f64,
    outer: f64,
    f: Arc<SeriesFn>,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile").field("inner", &self.inner).field("outer", &self.outer).finish()
    }
}

fn check_interval(inner: f64, outer: f64) -> Result<()> {
    if !(inner > 0.0 && outer > inner && outer.is_finite()) {
        return Err(Error::Support(format!("need 0 < r1 < r2, got ({inner}, {outer})")));
    }
    Ok(())
}

impl RadialProfile {
    /// `amplitude · exp(4/w² − 1/((r − r1)(r2 − r)))` on `(r1, r2)`, `w = r2 − r1`,
    /// normalised so the peak value is `amplitude`.
    pub fn bump(inner: f64, outer: f64, amplitude: f64) -> Result<Self> {
        check_interval(inner, outer)?;
        let w = outer - inner;
        let peak = 4.0 / (w * w);
        Ok(RadialProfile {
            inner,
            outer,
            f: Arc::new(move |r: Series| {
                let t = (r - inner) * (outer - r);
                (Series::constant(peak) - t.recip()).exp().scale(amplitude)
            }),
        })
    }

    /// A user profile on `(inner, outer)`. It must vanish to high order at
    /// both ends: `|a|, |a'|, |a''|` below `1e-10` just inside each endpoint.
    pub fn custom(inner: f64, outer: f64, f: impl Fn(Series) -> Series + Send + Sync + 'static) -> Result<Self> {
        check_interval(inner, outer)?;
        let eps = DECAY_PROBE * (outer - inner);
        for r0 in [inner + eps, outer - eps] {
            let s = f(Series::variable(r0));
            for k in 0..3 {
                let v = s.derivative_value(k);
                if !(v.abs() < DECAY_BOUND) {
                    return Err(Error::Support(format!(
                        "profile derivative of order {k} is {v:e} at r = {r0}; it must vanish near the endpoints"
                    )));
                }
            }
        }
        Ok(RadialProfile { inner, outer, f: Arc::new(f) })
    }

    pub fn zero(inner: f64, outer: f64) -> Result<Self> {
        check_interval(inner, outer)?;
        Ok(RadialProfile { inner, outer, f: Arc::new(|_| Series::zero()) })
    }

    pub fn inner(&self) -> f64 {
        self.inner
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    /// Expansion about `r0`; identically zero outside the open support.
    pub fn series_at(&self, r0: f64) -> Series {
        if r0 <= self.inner || r0 >= self.outer {
            return Series::zero();
        }
        (self.f)(Series::variable(r0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileValues<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

/// The four radial functions of a trace-free divergence-free tensor.
#[derive(Clone, Debug)]
pub struct TTProfile {
    metric: WarpedMetric,
    harmonic: SphericalHarmonic,
    radial: RadialProfile,
}

impl TTProfile {
    pub fn metric(&self) -> &WarpedMetric {
        &self.metric
    }

    pub fn harmonic(&self) -> &SphericalHarmonic {
        &self.harmonic
    }

    pub fn radial(&self) -> &RadialProfile {
        &self.radial
    }

    pub fn inner(&self) -> f64 {
        self.radial.inner
    }

    pub fn outer(&self) -> f64 {
        self.radial.outer
    }

    /// `(m − 1)(κ_Y − m)`, the determinant of the system for `(c, d)`.
    pub fn determinant(&self) -> f64 {
        let m = self.metric.sphere_dim() as f64;
        (m - 1.0) * (self.harmonic.eigenvalue() - m)
    }

    /// All four profiles expanded about `r0`:
    ///
    /// ```text
    /// b = (r²/κ_Y) [∂r(N²a) + (m+1) N²a / r]
    /// −κ_Y c + m d = −N²a
    /// (m − 1 − κ_Y) c + d = −N ∂r(N b) − m N² b / r
    /// ```
    pub fn series_at(&self, r0: f64) -> ProfileValues<Series> {
        let a = self.radial.series_at(r0);
        if a == Series::zero() {
            let z = Series::zero();
            return ProfileValues { a: z, b: z, c: z, d: z };
        }
        let m = self.metric.sphere_dim() as f64;
        let kappa = self.harmonic.eigenvalue();
        let r = Series::variable(r0);
        let inv_r = r.recip();
        let n2 = self.metric.lapse_sq_series(r0);
        let lapse = n2.sqrt();
        let n2a = n2 * a;
        let b = (r * r).scale(1.0 / kappa) * (n2a.derivative() + (n2a * inv_r).scale(m + 1.0));
        let rhs1 = -n2a;
        let rhs3 = -(lapse * (lapse * b).derivative()) - (n2 * b * inv_r).scale(m);
        let det = self.determinant();
        // [−κ  m; m−1−κ  1] [c; d] = [rhs1; rhs3]
        let c = (rhs1 - rhs3.scale(m)).scale(1.0 / det);
        let d = (rhs3.scale(-kappa) - rhs1.scale(m - 1.0 - kappa)).scale(1.0 / det);
        ProfileValues { a, b, c, d }
    }

    /// Profiles as jets of the jet-valued radius `r`.
    pub fn jets_at(&self, r: &Jet2) -> ProfileValues<Jet2> {
        let s = self.series_at(r.value());
        ProfileValues { a: s.a.compose_jet(r), b: s.b.compose_jet(r), c: s.c.compose_jet(r), d: s.d.compose_jet(r) }
    }

    /// Residuals of the three defining equations at `r0`, each written as
    /// `lhs − rhs`. They vanish up to rounding by construction; the check
    /// exists to guard the series bookkeeping.
    pub fn system_residuals(&self, r0: f64) -> [f64; 3] {
        let p = self.series_at(r0);
        let m = self.metric.sphere_dim() as f64;
        let kappa = self.harmonic.eigenvalue();
        let n2 = self.metric.lapse_sq_series(r0);
        let lapse = n2.sqrt();
        let n2a = n2 * p.a;
        let trace = n2a.value() - kappa * p.c.value() + m * p.d.value();
        let radial = n2a.derivative().value() - p.b.value() * kappa / (r0 * r0)
            - (m * p.d.value() - kappa * p.c.value()) / r0
            + m * n2a.value() / r0;
        let tangential = (lapse * (lapse * p.b).derivative()).value() + p.c.value() * (m - 1.0 - kappa)
            + p.d.value()
            + m * n2.value() * p.b.value() / r0;
        [trace, radial, tangential]
    }
}

/// Determines `b, c, d` from `a` so that the assembled tensor is trace-free
/// and divergence-free.
///
/// Fails with [`Error::DegenerateSystem`] when `κ_Y ≤ m` (the first
/// eigenvalue), and with [`Error::Support`] when the support of `a` does not
/// lie inside `(0, R)`.
pub fn solve_profile(metric: &WarpedMetric, a: &RadialProfile, harmonic: &SphericalHarmonic) -> Result<TTProfile> {
    let m = metric.sphere_dim();
    if harmonic.sphere_dim() != m {
        return Err(Error::InvalidParameter(format!(
            "harmonic lives on S^{} but the metric on S^{m}",
            harmonic.sphere_dim()
        )));
    }
    if harmonic.eigenvalue() <= m as f64 {
        return Err(Error::DegenerateSystem { eigenvalue: harmonic.eigenvalue(), sphere_dim: m });
    }
    if a.outer >= metric.outer_radius() {
        return Err(Error::Support(format!(
            "profile support ({}, {}) must lie inside (0, {})",
            a.inner,
            a.outer,
            metric.outer_radius()
        )));
    }
    Ok(TTProfile { metric: metric.clone(), harmonic: harmonic.clone(), radial: a.clone() })
}
