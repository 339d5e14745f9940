//! Constant-scalar-curvature paths `g(t) = u(t)^{4/(n−2)} (g + t h)` through
//! the conformal Dirichlet problem, their volumes, and a radial estimator for
//! the first Dirichlet eigenvalue.

mod basis;
mod eigen;
mod solver;

pub use basis::Expansion;
pub use eigen::{first_eigenvalue, first_eigenvalue_radial, EigenEstimate};
pub use solver::{ConformalProblem, ConformalSolution, Discretization, Exponents, LinearSolution};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{BoundaryFlag, ScalarField, SymTensorField};
use crate::riemann::MetricField;

/// One solved sample of a path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSample {
    pub t: f64,
    pub volume: f64,
    pub solution: ConformalSolution,
}

/// A path solved on the symmetric grid `{0, ±step/2, ±step, ±2 step}`.
#[derive(Clone, Debug, Serialize)]
pub struct YamabePath {
    pub step: f64,
    pub exponents: Exponents,
    pub scalar_curvature: f64,
    pub samples: Vec<PathSample>,
}

/// Fitted derivatives of `V(t)` at `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VolumeDerivatives {
    pub first: f64,
    pub second: f64,
    /// `|D(h/2) − D(h)| / 15` for the Richardson-combined second derivative.
    pub second_truncation: f64,
    pub first_truncation: f64,
    /// Smallest `C` with `|u(t) − 1| ≤ C|t|` over the samples.
    pub bracket_constant: f64,
    pub max_relative_residual: f64,
}

impl YamabePath {
    /// Solves all samples in parallel.
    pub fn solve(problem: &ConformalProblem, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!("path step must be positive, got {step}")));
        }
        let ts = [-2.0 * step, -step, -0.5 * step, 0.0, 0.5 * step, step, 2.0 * step];
        let samples = ts
            .par_iter()
            .map(|t| {
                let solution = problem.solve(*t)?;
                let volume = problem.volume(&solution)?;
                Ok(PathSample { t: *t, volume, solution })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(YamabePath {
            step,
            exponents: problem.exponents(),
            scalar_curvature: problem.ball().scalar_curvature(),
            samples,
        })
    }

    fn volume_at(&self, t: f64) -> f64 {
        self.samples
            .iter()
            .find(|s| (s.t - t).abs() <= 1e-15 * self.step)
            .map(|s| s.volume)
            .expect("sample grid is fixed")
    }

    /// Five-point central differences at `step` and `step/2`, combined by
    /// Richardson extrapolation.
    pub fn derivatives(&self) -> VolumeDerivatives {
        let v = |t: f64| self.volume_at(t);
        let d1 = |h: f64| (-v(2.0 * h) + 8.0 * v(h) - 8.0 * v(-h) + v(-2.0 * h)) / (12.0 * h);
        let d2 = |h: f64| (-v(2.0 * h) + 16.0 * v(h) - 30.0 * v(0.0) + 16.0 * v(-h) - v(-2.0 * h)) / (12.0 * h * h);
        let h = self.step;
        let (a1, b1) = (d1(h), d1(h / 2.0));
        let (a2, b2) = (d2(h), d2(h / 2.0));
        let bracket_constant = self
            .samples
            .iter()
            .filter(|s| s.t != 0.0)
            .map(|s| (s.solution.u_max - 1.0).max(1.0 - s.solution.u_min) / s.t.abs())
            .fold(0.0, f64::max);
        VolumeDerivatives {
            first: (16.0 * b1 - a1) / 15.0,
            second: (16.0 * b2 - a2) / 15.0,
            first_truncation: (b1 - a1).abs() / 15.0,
            second_truncation: (b2 - a2).abs() / 15.0,
            bracket_constant,
            max_relative_residual: self.samples.iter().map(|s| s.solution.relative_residual).fold(0.0, f64::max),
        }
    }

    /// `(t, V(t), iterations, residual)` rows ordered by `t`.
    pub fn rows(&self) -> Vec<(f64, f64, usize, f64)> {
        let mut rows: Vec<_> = self
            .samples
            .iter()
            .map(|s| (s.t, s.volume, s.solution.iterations, s.solution.residual_sup))
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        rows
    }
}

/// The metric `u^{4/(n−2)} (g + t h)` of a solved sample.
pub fn path_metric(problem: &ConformalProblem, solution: &ConformalSolution) -> MetricField {
    let n = problem.ball().dim() as f64;
    let base = problem.metric_at(solution.t);
    let u = solution.conformal_factor(problem.ball());
    let chart = *u.chart();
    let factor = ScalarField::new(chart, move |x| u.eval(x).powf(4.0 / (n - 2.0)));
    MetricField::new(SymTensorField::scalar_times(&factor, base.tensor(), BoundaryFlag::Unconstrained))
}

/// Sup of `|R(g(t)) − K|` at `points`.
pub fn constraint_defect(problem: &ConformalProblem, solution: &ConformalSolution, points: &[Vec<f64>]) -> Result<f64> {
    let g = path_metric(problem, solution);
    let k = problem.ball().scalar_curvature();
    points.iter().try_fold(0.0f64, |m, p| Ok(m.max((g.scalar_curvature_at(p)? - k).abs())))
}

/// The tangent `h + 4v/(n−2) g` of the path at `t = 0`.
pub fn effective_direction(problem: &ConformalProblem, linear: &LinearSolution) -> SymTensorField {
    let n = problem.ball().dim() as f64;
    let v = linear.field(problem.ball()).scale(4.0 / (n - 2.0));
    let flag = problem.direction().boundary_flag();
    problem.direction().add(&problem.ball().metric().scalar_multiple(&v, BoundaryFlag::VanishesOnBoundary)).with_boundary_flag(flag)
}
