//! Trace-free, divergence-free symmetric tensors with compact support on
//! rotationally symmetric metrics `N(r)^{-2} dr² + r² g_{S^m}`.
//!
//! The polar chart is realised in Cartesian form `y = r ω ∈ ℝ^{m+1}`, where
//! the metric reads `δ + (N^{-2} − 1) ŷŷᵀ`. Tensors are built from a radial
//! bump `a`, three derived profiles `b, c, d` and a spherical harmonic `Y`:
//!
//! ```text
//! h(∂r, ∂r)        = a Y
//! h(∂r, ·)|tangent = b dY
//! h|tangent        = r² (c ∇²Y + d Y g_{S^m})
//! ```

mod assemble;
mod harmonic;
mod profile;

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fields::{jet, Chart, ChartKind, Series, SymJet, SymTensorField, MAX_DIM};
use crate::riemann::{FrameOps, MetricField};

pub use assemble::{assemble_tt, ball_tt_direction, transplant_to_chart};
pub use harmonic::{HarmonicJets, SphericalHarmonic};
pub use profile::{solve_profile, ProfileValues, RadialProfile, TTProfile};

type SeriesFn = dyn Fn(Series) -> Series + Send + Sync;

#[derive(Clone)]
enum Lapse {
    /// `N² = 1 − c r²` with `c` the sectional curvature.
    SpaceForm { sectional: f64 },
    Custom(Arc<SeriesFn>),
}

/// `g = N(r)^{-2} dr² + r² g_{S^m}` on `(0, R) × S^m`.
#[derive(Clone)]
pub struct WarpedMetric {
    sphere_dim: usize,
    outer_radius: f64,
    lapse: Lapse,
}

impl fmt::Debug for WarpedMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WarpedMetric")
            .field("sphere_dim", &self.sphere_dim)
            .field("outer_radius", &self.outer_radius)
            .field("sectional", &self.sectional())
            .finish()
    }
}

impl WarpedMetric {
    pub fn euclidean(sphere_dim: usize, outer_radius: f64) -> Result<Self> {
        Self::space_form(sphere_dim, outer_radius, 0.0)
    }

    /// Space form of sectional curvature `sectional`, written with `r` the
    /// areal radius. Spherical charts stop at the equator `r = 1/√c`.
    pub fn space_form(sphere_dim: usize, outer_radius: f64, sectional: f64) -> Result<Self> {
        Self::validated(sphere_dim, outer_radius, Lapse::SpaceForm { sectional })
    }

    /// A user-supplied `N²(r)`, evaluated on truncated Taylor series.
    pub fn custom(
        sphere_dim: usize,
        outer_radius: f64,
        lapse_sq: impl Fn(Series) -> Series + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::validated(sphere_dim, outer_radius, Lapse::Custom(Arc::new(lapse_sq)))
    }

    fn validated(sphere_dim: usize, outer_radius: f64, lapse: Lapse) -> Result<Self> {
        if sphere_dim < 2 || sphere_dim + 1 > MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "sphere dimension {sphere_dim} not supported (need 2..={})",
                MAX_DIM - 1
            )));
        }
        if !(outer_radius > 0.0 && outer_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("outer radius {outer_radius} must be positive")));
        }
        let w = WarpedMetric { sphere_dim, outer_radius, lapse };
        const SAMPLES: usize = 1000;
        for k in 1..SAMPLES {
            let r = outer_radius * k as f64 / SAMPLES as f64;
            let n2 = w.lapse_sq_series(r).value();
            if !(n2 > 0.0 && n2.is_finite()) {
                return Err(Error::domain(&[r], format!("N² = {n2} must be positive on (0, R)")));
            }
        }
        Ok(w)
    }

    pub fn sphere_dim(&self) -> usize {
        self.sphere_dim
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    /// Sectional curvature when the metric is a space form.
    pub fn sectional(&self) -> Option<f64> {
        match self.lapse {
            Lapse::SpaceForm { sectional } => Some(sectional),
            Lapse::Custom(_) => None,
        }
    }

    /// `N²` expanded about `r0`.
    pub fn lapse_sq_series(&self, r0: f64) -> Series {
        match &self.lapse {
            Lapse::SpaceForm { sectional } => {
                let r = Series::variable(r0);
                1.0 - (r * r).scale(*sectional)
            }
            Lapse::Custom(f) => f(Series::variable(r0)),
        }
    }

    /// The Cartesian polar chart `y = r ω`, pole excluded.
    pub fn chart(&self) -> Chart {
        Chart::new(self.sphere_dim + 1, ChartKind::GeodesicPolar, self.outer_radius)
            .expect("dimension validated on construction")
    }

    /// `δ + (N^{-2} − 1) ŷŷᵀ` in the Cartesian polar chart.
    pub fn metric(&self) -> MetricField {
        let n = self.sphere_dim + 1;
        let this = self.clone();
        MetricField::new(SymTensorField::new(self.chart(), move |y| {
            let r2 = jet::norm_sq(y);
            // coefficient of y yᵀ
            let coeff = match &this.lapse {
                Lapse::SpaceForm { sectional } => (1.0 - r2 * *sectional).recip() * *sectional,
                Lapse::Custom(_) => {
                    let r = r2.sqrt();
                    let n2 = this.lapse_sq_series(r.value()).compose_jet(&r);
                    (n2.recip() - 1.0) / r2
                }
            };
            SymJet::from_fn(n, |i, j| {
                let off = coeff * y[i] * y[j];
                if i == j {
                    off + 1.0
                } else {
                    off
                }
            })
        }))
    }
}

/// Sup norms of `tr h`, `div h` and `div div h` computed by generic tensor
/// calculus at the given points.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct TTDefects {
    pub trace_sup: f64,
    pub divergence_sup: f64,
    pub second_divergence_sup: f64,
    /// Sup of `|h|_g`, for scale.
    pub norm_sup: f64,
}

pub fn tt_defects(g: &MetricField, h: &SymTensorField, points: &[Vec<f64>]) -> Result<TTDefects> {
    let mut out = TTDefects::default();
    for p in points {
        let geo = g.curvature_at(p)?;
        let d = geo.tensor_derivs(&h.eval_at(p)?).in_frame(&geo);
        let ops = FrameOps::new(&d);
        out.trace_sup = out.trace_sup.max(ops.trace.abs());
        let div = ops.divergence.iter().map(|v| v * v).sum::<f64>().sqrt();
        out.divergence_sup = out.divergence_sup.max(div);
        out.second_divergence_sup = out.second_divergence_sup.max(ops.second_divergence.abs());
        out.norm_sup = out.norm_sup.max(d.value.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    Ok(out)
}

/// Uniformly distributed point of the annulus `inner < |x| < outer` in `ℝ^dim`.
pub fn annulus_point(rng: &mut impl Rng, dim: usize, inner: f64, outer: f64) -> Vec<f64> {
    let dir = loop {
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: f64 = p.iter().map(|v| v * v).sum();
        if r2 < 1.0 && r2 > 1e-4 {
            let r = r2.sqrt();
            break p.into_iter().map(|v| v / r).collect::<Vec<_>>();
        }
    };
    let e = dim as i32;
    let u: f64 = rng.gen_range(0.0..1.0);
    let r = (inner.powi(e) + u * (outer.powi(e) - inner.powi(e))).powf(1.0 / dim as f64);
    dir.into_iter().map(|v| v * r).collect()
}

#[cfg(test)]
mod tests;
