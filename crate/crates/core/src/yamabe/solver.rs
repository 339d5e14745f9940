//! Discretised conformal Dirichlet problems on a space-form ball.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::basis::{chebyshev, chebyshev_coefficients, legendre, multi_indices, Expansion};
use super::eigen::{first_eigenvalue_radial, EigenEstimate};
use crate::error::{Error, Result};
use crate::fields::quadrature::{map_nodes, Node};
use crate::fields::{jet, BallQuadrature, Jet2, QuadratureOrder, ScalarField, SymTensorField};
use crate::riemann::{CurvaturePoint, MetricField};
use crate::spaceform::{unit_sphere_area, SpaceFormBall};
use crate::tolerances;
use crate::variation::linearized_scalar;

const MAX_NEWTON: usize = 40;
const MAX_HALVINGS: usize = 30;
/// Relative tolerance when comparing the radial coefficients on two rays.
const SYMMETRY_TOL: f64 = 1e-9;
/// Gauss–Legendre points for radial volume integrals.
const RADIAL_VOLUME_POINTS: usize = 64;

/// `α = 4(n−1)/(n−2)`, `a = (n+2)/(n−2)` and the volume exponent `2n/(n−2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Exponents {
    pub alpha: f64,
    pub power: f64,
    pub volume_power: f64,
}

impl Exponents {
    pub fn new(dim: usize) -> Self {
        let n = dim as f64;
        Exponents { alpha: 4.0 * (n - 1.0) / (n - 2.0), power: (n + 2.0) / (n - 2.0), volume_power: 2.0 * n / (n - 2.0) }
    }
}

/// How the unknown function is represented.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Discretization {
    /// Chebyshev collocation in `|x|²` with `nodes` intervals. Requires
    /// rotationally symmetric data.
    Radial { nodes: usize },
    /// Weighted least squares over ball quadrature nodes with a Legendre
    /// product basis of total degree `degree`.
    Ball { degree: usize, radial: usize, angular: usize },
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization::Radial { nodes: 32 }
    }
}

impl Discretization {
    pub fn default_ball() -> Self {
        Discretization::Ball { degree: 8, radial: 12, angular: 16 }
    }
}

/// Metric data at a node needed for Laplacians.
struct NodeOp {
    inverse: Vec<f64>,
    /// `g^{ij} Γ^k_ij`
    gamma: Vec<f64>,
    scalar: f64,
}

impl NodeOp {
    fn new(cp: &CurvaturePoint) -> Self {
        let n = cp.dim;
        let gamma = (0..n)
            .map(|k| (0..n * n).map(|q| cp.inverse[q] * cp.gamma(k, q / n, q % n)).sum())
            .collect();
        NodeOp { inverse: cp.inverse.clone(), gamma, scalar: cp.scalar }
    }

    fn laplacian(&self, f: &Jet2) -> f64 {
        let n = self.gamma.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.inverse[i * n + j] * f.hess(i, j);
            }
            s -= self.gamma[i] * f.grad(i);
        }
        s
    }

    /// `|∇f|²_g`
    fn gradient_sq(&self, f: &Jet2) -> f64 {
        let n = self.gamma.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.inverse[i * n + j] * f.grad(i) * f.grad(j);
            }
        }
        s
    }
}

/// Rows of the discrete system at the nodes of one metric.
struct System {
    /// basis values at nodes
    psi: DMatrix<f64>,
    /// basis Laplacians at nodes
    lap: DMatrix<f64>,
    scalar: DVector<f64>,
    /// square roots of the least-squares weights (ones for collocation)
    sqrt_w: DVector<f64>,
    square: bool,
}

enum Scheme {
    Radial { xi: Vec<f64>, d1: Vec<f64>, d2: Vec<f64> },
    Ball { nodes: Vec<Node>, indices: Vec<Vec<usize>>, degree: usize },
}

/// Diagnostics of one Newton solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalSolution {
    pub t: f64,
    /// `u − 1`, vanishing on the boundary.
    #[serde(skip)]
    pub correction: Expansion,
    pub iterations: usize,
    /// Sup over nodes of `|αΔu − Ru + Ku^a|`.
    pub residual_sup: f64,
    /// `residual_sup` divided by the sup of the individual terms.
    pub relative_residual: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub residual_trace: Vec<f64>,
}

impl ConformalSolution {
    /// `u = 1 + correction` as a field on `chart`.
    pub fn conformal_factor(&self, ball: &SpaceFormBall) -> ScalarField {
        let c = self.correction.clone();
        ScalarField::new(*ball.chart(), move |x| c.eval(x) + 1.0)
    }
}

/// Solution of `(n−1)Δv + Kv = (n−2)/4 · DR(h)`, `v = 0` on the boundary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearSolution {
    #[serde(skip)]
    pub expansion: Expansion,
    pub residual_sup: f64,
    pub source_sup: f64,
    pub sup: f64,
}

impl LinearSolution {
    pub fn field(&self, ball: &SpaceFormBall) -> ScalarField {
        let e = self.expansion.clone();
        ScalarField::new(*ball.chart(), move |x| e.eval(x))
    }
}

/// The Dirichlet problem `αΔ_{g+th} u − R(g+th) u + K u^a = 0`, `u = 1` on
/// the boundary, for a fixed ball, direction and discretization.
pub struct ConformalProblem {
    ball: SpaceFormBall,
    direction: SymTensorField,
    mode: Discretization,
    scheme: Scheme,
    eigen: EigenEstimate,
}

impl ConformalProblem {
    /// Fails with [`Error::EigenvalueCollision`] unless `(n−1)λ₁ − K > 0`.
    pub fn new(ball: &SpaceFormBall, direction: &SymTensorField, mode: Discretization) -> Result<Self> {
        let eigen = first_eigenvalue_radial(ball)?;
        if eigen.operator_margin() <= 0.0 {
            return Err(Error::EigenvalueCollision(format!(
                "(n−1)λ₁ − K = {:.6e} is not positive (λ₁ ∈ [{}, {}], K = {})",
                eigen.operator_margin(),
                eigen.lower,
                eigen.upper,
                eigen.scalar_curvature
            )));
        }
        let rho = ball.coord_radius();
        let scheme = match mode {
            Discretization::Radial { nodes } => {
                if nodes < 4 {
                    return Err(Error::InvalidParameter("radial discretization needs at least 4 nodes".into()));
                }
                let (xi, d1) = chebyshev(nodes);
                let m = xi.len();
                let ds = 2.0 / (rho * rho);
                let d1: Vec<f64> = d1.iter().map(|v| v * ds).collect();
                let mut d2 = vec![0.0; m * m];
                for i in 0..m {
                    for j in 0..m {
                        d2[i * m + j] = (0..m).map(|k| d1[i * m + k] * d1[k * m + j]).sum();
                    }
                }
                Scheme::Radial { xi, d1, d2 }
            }
            Discretization::Ball { degree, radial, angular } => {
                // the squared residual must be resolved by the nodes
                if angular < 2 * degree || radial < degree + 2 {
                    return Err(Error::InvalidParameter(format!(
                        "ball discretization needs angular ≥ 2·degree and radial ≥ degree + 2, got degree {degree}, radial {radial}, angular {angular}"
                    )));
                }
                let q = BallQuadrature::new(ball.dim(), rho, QuadratureOrder::new(radial, angular));
                let indices = multi_indices(ball.dim(), degree);
                let nodes = q.ball_nodes();
                if nodes.len() < 2 * indices.len() {
                    return Err(Error::InvalidParameter(format!(
                        "{} quadrature nodes are too few for {} basis functions",
                        nodes.len(),
                        indices.len()
                    )));
                }
                Scheme::Ball { nodes, indices, degree }
            }
        };
        Ok(ConformalProblem { ball: ball.clone(), direction: direction.clone(), mode, scheme, eigen })
    }

    pub fn ball(&self) -> &SpaceFormBall {
        &self.ball
    }

    pub fn direction(&self) -> &SymTensorField {
        &self.direction
    }

    pub fn mode(&self) -> Discretization {
        self.mode
    }

    pub fn eigen(&self) -> &EigenEstimate {
        &self.eigen
    }

    pub fn exponents(&self) -> Exponents {
        Exponents::new(self.ball.dim())
    }

    pub fn metric_at(&self, t: f64) -> MetricField {
        self.ball.metric().perturbed(&self.direction, t)
    }

    fn radial_point(&self, s: f64) -> Vec<f64> {
        let mut p = vec![0.0; self.ball.dim()];
        p[0] = s.max(0.0).sqrt();
        p
    }

    fn diagonal_point(&self, s: f64) -> Vec<f64> {
        let n = self.ball.dim();
        let r = s.max(0.0).sqrt();
        let w = [0.3, -0.5, 0.6, 0.2, -0.4, 0.3];
        let norm = w[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
        w[..n].iter().map(|v| v * r / norm).collect()
    }

    /// Radial coefficients `(Δs, |∇s|², R)` at a point, `s = |x|²`.
    fn radial_coefficients(g: &MetricField, p: &[f64]) -> Result<[f64; 3]> {
        let cp = g.curvature_at(p)?;
        let op = NodeOp::new(&cp);
        let s = jet::norm_sq(&Jet2::seed(p));
        Ok([op.laplacian(&s), op.gradient_sq(&s), op.scalar])
    }

    fn assemble(&self, g: &MetricField) -> Result<System> {
        let rho = self.ball.coord_radius();
        match &self.scheme {
            Scheme::Radial { xi, d1, d2 } => {
                let m = xi.len();
                let interior: Vec<Node> = (1..m)
                    .map(|j| Node { point: vec![rho * rho * (xi[j] + 1.0) / 2.0], weight: 1.0 })
                    .collect();
                let coeffs = map_nodes(&interior, |node| {
                    let s = node.point[0];
                    let a = Self::radial_coefficients(g, &self.radial_point(s))?;
                    let b = Self::radial_coefficients(g, &self.diagonal_point(s))?;
                    for k in 0..3 {
                        if (a[k] - b[k]).abs() > SYMMETRY_TOL * (1.0 + a[k].abs()) {
                            return Err(Error::InvalidParameter(format!(
                                "direction is not rotationally symmetric at |x|² = {s}; use the ball discretization"
                            )));
                        }
                    }
                    Ok(a)
                })?;
                let k = m - 1;
                let mut lap = DMatrix::zeros(k, k);
                for (row, c) in coeffs.iter().enumerate() {
                    let i = row + 1;
                    for col in 0..k {
                        let j = col + 1;
                        lap[(row, col)] = c[1] * d2[i * m + j] + c[0] * d1[i * m + j];
                    }
                }
                Ok(System {
                    psi: DMatrix::identity(k, k),
                    lap,
                    scalar: DVector::from_iterator(k, coeffs.iter().map(|c| c[2])),
                    sqrt_w: DVector::from_element(k, 1.0),
                    square: true,
                })
            }
            Scheme::Ball { nodes, indices, degree } => {
                let nb = indices.len();
                let rows = map_nodes(nodes, |node| {
                    let cp = g.curvature_at(&node.point)?;
                    let op = NodeOp::new(&cp);
                    let x = Jet2::seed(&node.point);
                    let polys: Vec<Vec<Jet2>> = x.iter().map(|v| legendre(*v * (1.0 / rho), *degree)).collect();
                    let bubble = 1.0 - jet::norm_sq(&x) * (1.0 / (rho * rho));
                    let mut vals = Vec::with_capacity(nb);
                    let mut laps = Vec::with_capacity(nb);
                    for idx in indices {
                        let mut f = bubble;
                        for (i, a) in idx.iter().enumerate() {
                            f = f * polys[i][*a];
                        }
                        vals.push(f.value());
                        laps.push(op.laplacian(&f));
                    }
                    Ok((vals, laps, op.scalar, node.weight.sqrt()))
                })?;
                let nn = rows.len();
                let mut psi = DMatrix::zeros(nn, nb);
                let mut lap = DMatrix::zeros(nn, nb);
                for (i, r) in rows.iter().enumerate() {
                    for k in 0..nb {
                        psi[(i, k)] = r.0[k];
                        lap[(i, k)] = r.1[k];
                    }
                }
                Ok(System {
                    psi,
                    lap,
                    scalar: DVector::from_iterator(nn, rows.iter().map(|r| r.2)),
                    sqrt_w: DVector::from_iterator(nn, rows.iter().map(|r| r.3)),
                    square: false,
                })
            }
        }
    }

    fn expansion(&self, coeffs: &DVector<f64>) -> Expansion {
        let rho = self.ball.coord_radius();
        match &self.scheme {
            Scheme::Radial { .. } => {
                let mut vals = vec![0.0];
                vals.extend(coeffs.iter());
                Expansion::Radial { rho, coeffs: chebyshev_coefficients(&vals) }
            }
            Scheme::Ball { degree, .. } => {
                Expansion::Ball { rho, degree: *degree, coeffs: coeffs.iter().copied().collect() }
            }
        }
    }

    /// Solves `J δ = −F` (collocation) or the weighted least-squares problem.
    fn linear_solve(sys: &System, jac: DMatrix<f64>, rhs: DVector<f64>) -> Result<DVector<f64>> {
        let fail = || Error::Numeric { location: vec![], what: "singular discrete operator".into() };
        if sys.square {
            jac.lu().solve(&rhs).ok_or_else(fail)
        } else {
            let mut a = jac;
            let mut b = rhs;
            for i in 0..a.nrows() {
                let w = sys.sqrt_w[i];
                a.row_mut(i).scale_mut(w);
                b[i] *= w;
            }
            let qr = a.qr();
            let qtb = qr.q().transpose() * b;
            qr.r().solve_upper_triangular(&qtb).ok_or_else(fail)
        }
    }

    /// Newton iteration from `u ≡ 1` with step halving on the weighted
    /// residual norm.
    pub fn solve(&self, t: f64) -> Result<ConformalSolution> {
        let g = self.metric_at(t);
        let sys = self.assemble(&g)?;
        let ex = self.exponents();
        let k_const = self.ball.scalar_curvature();
        let nb = sys.psi.ncols();
        let residual = |c: &DVector<f64>| -> (DVector<f64>, DVector<f64>, f64) {
            let u = sys.psi.clone() * c + DVector::from_element(sys.psi.nrows(), 1.0);
            let lu = &sys.lap * c;
            let mut f = DVector::zeros(u.len());
            let mut scale: f64 = 1.0;
            for i in 0..u.len() {
                let ua = u[i].abs().powf(ex.power);
                f[i] = ex.alpha * lu[i] - sys.scalar[i] * u[i] + k_const * ua;
                scale = scale.max((ex.alpha * lu[i]).abs() + (sys.scalar[i] * u[i]).abs() + (k_const * ua).abs());
            }
            (f, u, scale)
        };
        let merit = |f: &DVector<f64>| f.iter().zip(sys.sqrt_w.iter()).map(|(v, w)| (v * w).powi(2)).sum::<f64>();
        let mut c = DVector::zeros(nb);
        let (mut f, mut u, mut scale) = residual(&c);
        let mut trace = vec![f.amax()];
        let mut iterations = 0;
        let converged = |f: &DVector<f64>, scale: f64| f.amax() <= tolerances::NEWTON_RESIDUAL * scale;
        while !converged(&f, scale) {
            if iterations == MAX_NEWTON {
                return Err(Error::Nonconvergence { iterations, trace });
            }
            let mut jac = sys.lap.scale(ex.alpha);
            for i in 0..jac.nrows() {
                let d = -sys.scalar[i] + k_const * ex.power * u[i].abs().powf(ex.power - 1.0);
                for k in 0..nb {
                    jac[(i, k)] += d * sys.psi[(i, k)];
                }
            }
            let delta = Self::linear_solve(&sys, jac, -f.clone())?;
            let m0 = merit(&f);
            let mut step = 1.0;
            let mut accepted = None;
            for _ in 0..MAX_HALVINGS {
                let trial = &c + delta.scale(step);
                let (ft, ut, st) = residual(&trial);
                if ut.min() > 0.0 && merit(&ft) <= m0 {
                    accepted = Some((trial, ft, ut, st));
                    break;
                }
                step *= 0.5;
            }
            iterations += 1;
            let Some((cn, fnew, unew, snew)) = accepted else {
                return Err(Error::Nonconvergence { iterations, trace });
            };
            let small_step = delta.amax() * step <= 1e-14 * (1.0 + cn.amax());
            // Gauss–Newton on a nonzero residual converges linearly
            let stalled = !sys.square && merit(&fnew) >= (1.0 - 1e-10) * m0;
            c = cn;
            f = fnew;
            u = unew;
            scale = snew;
            trace.push(f.amax());
            // least squares cannot reach a zero residual; stop once the
            // iterate has settled
            if !sys.square && (small_step || stalled) {
                break;
            }
            if sys.square && small_step && !converged(&f, scale) {
                return Err(Error::Nonconvergence { iterations, trace });
            }
        }
        let residual_sup = f.amax();
        Ok(ConformalSolution {
            t,
            correction: self.expansion(&c),
            iterations,
            residual_sup,
            relative_residual: residual_sup / scale,
            u_min: u.min().min(1.0),
            u_max: u.max().max(1.0),
            residual_trace: trace,
        })
    }

    /// `u'(0)`: solves `(n−1)Δv + Kv = (n−2)/4 · DR_g(h)` with `v = 0` on the
    /// boundary.
    pub fn linearized(&self) -> Result<LinearSolution> {
        let g = self.ball.metric();
        let sys = self.assemble(g)?;
        let n = self.ball.dim() as f64;
        let k_const = self.ball.scalar_curvature();
        let points: Vec<Node> = match &self.scheme {
            Scheme::Radial { xi, .. } => {
                let rho = self.ball.coord_radius();
                (1..xi.len())
                    .map(|j| Node { point: self.radial_point(rho * rho * (xi[j] + 1.0) / 2.0), weight: 1.0 })
                    .collect()
            }
            Scheme::Ball { nodes, .. } => nodes.clone(),
        };
        let h = &self.direction;
        let src = map_nodes(&points, |node| Ok((n - 2.0) / 4.0 * linearized_scalar(g, h, &node.point)?))?;
        let rhs = DVector::from_vec(src);
        let op = sys.lap.scale(n - 1.0) + sys.psi.scale(k_const);
        let c = Self::linear_solve(&sys, op.clone(), rhs.clone())?;
        let res = (&op * &c - &rhs).amax();
        let vals = &sys.psi * &c;
        Ok(LinearSolution {
            expansion: self.expansion(&c),
            residual_sup: res,
            source_sup: rhs.amax(),
            sup: vals.amax(),
        })
    }

    /// `∫ u^{2n/(n−2)} dV_{g+th}`.
    pub fn volume(&self, sol: &ConformalSolution) -> Result<f64> {
        let g = self.metric_at(sol.t);
        let vp = self.exponents().volume_power;
        let corr = &sol.correction;
        let rho = self.ball.coord_radius();
        let n = self.ball.dim();
        match self.mode {
            Discretization::Radial { .. } => {
                let rule = crate::fields::GaussRule::legendre(RADIAL_VOLUME_POINTS, 0.0, rho);
                let mut terms = Vec::with_capacity(rule.nodes.len());
                for (r, w) in rule.nodes.iter().zip(&rule.weights) {
                    let p = self.radial_point(r * r);
                    let u = 1.0 + corr.value_at(&p);
                    terms.push(w * u.powf(vp) * g.volume_density_at(&p)? * r.powi(n as i32 - 1));
                }
                Ok(unit_sphere_area(n - 1) * crate::fields::quadrature::pairwise_sum(&terms))
            }
            Discretization::Ball { .. } => {
                let q = self.ball.quadrature(QuadratureOrder::default());
                q.integrate_coordinate(|p| Ok((1.0 + corr.value_at(p)).powf(vp) * g.volume_density_at(p)?))
            }
        }
    }

    /// Largest `t` in `t_start · 2^k ≤ t_cap` for which the solve succeeds
    /// with a positive factor; `None` when even `t_start` fails.
    pub fn largest_solvable_t(&self, t_start: f64, t_cap: f64) -> Option<f64> {
        let mut best = None;
        let mut t = t_start;
        while t <= t_cap {
            let ok = self.solve(t).is_ok() && self.solve(-t).is_ok();
            if !ok {
                break;
            }
            best = Some(t);
            t *= 2.0;
        }
        best
    }
}
