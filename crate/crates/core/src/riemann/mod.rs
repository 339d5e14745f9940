//! Riemannian geometry of metric fields.

pub mod boundary;
pub mod curvature;

use crate::error::{Error, Result};
use crate::fields::{BoundaryFlag, Chart, Jet2, ScalarField, SymJet, SymTensorField};

pub use boundary::BoundaryGeometry;
pub use curvature::{CurvaturePoint, FrameOps, ScalarDerivs, TensorDerivs};

/// A positive-definite symmetric tensor field used as a metric.
#[derive(Clone, Debug)]
pub struct MetricField {
    g: SymTensorField,
}

impl MetricField {
    pub fn new(g: SymTensorField) -> Self {
        MetricField { g }
    }

    pub fn euclidean(chart: Chart) -> Self {
        let n = chart.dim();
        MetricField::new(SymTensorField::new(chart, move |_| SymJet::identity(n)))
    }

    /// `factor · δ` for a positive scalar factor.
    pub fn conformally_flat(factor: ScalarField) -> Self {
        let chart = *factor.chart();
        let n = chart.dim();
        MetricField::new(SymTensorField::new(chart, move |x| {
            let f = factor.eval(x);
            let zero = f.scale(0.0);
            SymJet::from_fn(n, |i, j| if i == j { f } else { zero })
        }))
    }

    pub fn chart(&self) -> &Chart {
        self.g.chart()
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn tensor(&self) -> &SymTensorField {
        &self.g
    }

    /// `g + t h`.
    pub fn perturbed(&self, h: &SymTensorField, t: f64) -> MetricField {
        MetricField::new(self.g.add(&h.scale(t)))
    }

    /// `g + t h + (t²/2) h2`.
    pub fn perturbed2(&self, h: &SymTensorField, h2: &SymTensorField, t: f64) -> MetricField {
        MetricField::new(self.g.add(&h.scale(t)).add(&h2.scale(0.5 * t * t)))
    }

    pub fn eval(&self, x: &[Jet2]) -> SymJet {
        self.g.eval(x)
    }

    pub fn curvature_at(&self, p: &[f64]) -> Result<CurvaturePoint> {
        let g = self.g.eval_at(p)?;
        CurvaturePoint::from_metric_jets(&g, p)
    }

    pub fn scalar_curvature_at(&self, p: &[f64]) -> Result<f64> {
        Ok(self.curvature_at(p)?.scalar)
    }

    pub fn volume_density_at(&self, p: &[f64]) -> Result<f64> {
        let g = self.g.eval_at(p)?;
        let n = g.dim();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| g.get(i, j).value());
        let d = m.determinant();
        if !(d > 0.0) {
            return Err(Error::SingularMetric { point: p.to_vec() });
        }
        Ok(d.sqrt())
    }

    /// The metric itself, viewed as a variation direction.
    pub fn as_direction(&self) -> SymTensorField {
        self.g.clone().with_boundary_flag(BoundaryFlag::Unconstrained)
    }

    /// `s · g` for a scalar field `s`.
    pub fn scalar_multiple(&self, s: &ScalarField, flag: BoundaryFlag) -> SymTensorField {
        self.g.times_scalar(s, flag)
    }

    /// Smallest eigenvalue of `g` at `p`.
    pub fn min_eigenvalue_at(&self, p: &[f64]) -> Result<f64> {
        let g = self.g.eval_at(p)?;
        let n = g.dim();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| g.get(i, j).value());
        Ok(m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
    }
}

/// Inverse of a symmetric positive-definite jet matrix by jet Cholesky.
pub fn invert_jet(m: &SymJet) -> Option<SymJet> {
    let n = m.dim();
    let mut l = vec![Jet2::constant(0.0); n * n];
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d.value() > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in j + 1..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    // inverse of L (lower triangular)
    let mut li = vec![Jet2::constant(0.0); n * n];
    for i in 0..n {
        li[i * n + i] = l[i * n + i].recip();
        for j in 0..i {
            let mut s = Jet2::constant(0.0);
            for k in j..i {
                s -= l[i * n + k] * li[k * n + j];
            }
            li[i * n + j] = s / l[i * n + i];
        }
    }
    Some(SymJet::from_fn(n, |i, j| {
        let mut s = Jet2::constant(0.0);
        for k in j.max(i)..n {
            s += li[k * n + i] * li[k * n + j];
        }
        s
    }))
}

#[cfg(test)]
mod tests;
