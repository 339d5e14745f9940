//! Deterministic Gauss rules on intervals, spheres and balls.
//!
//! Interval rules are symmetric Gauss–Jacobi rules computed by Golub–Welsch
//! and polished by Newton steps on the orthonormal recurrence. Sphere rules
//! are products: a point of `S^{D-1}` is written `(t, sqrt(1-t^2) ξ)` with
//! `ξ ∈ S^{D-2}`, the `t` factor integrated against `(1-t^2)^{(D-3)/2}` and
//! the recursion ending in the trapezoid rule on the circle.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureOrder {
    /// Gauss–Legendre nodes in the radial direction.
    pub radial: usize,
    /// Polynomial degree integrated exactly on the sphere.
    pub angular_degree: usize,
}

impl Default for QuadratureOrder {
    fn default() -> Self {
        QuadratureOrder { radial: 48, angular_degree: 20 }
    }
}

impl QuadratureOrder {
    pub fn new(radial: usize, angular_degree: usize) -> Self {
        QuadratureOrder { radial, angular_degree }
    }

    pub fn doubled(&self) -> Self {
        QuadratureOrder { radial: 2 * self.radial, angular_degree: 2 * self.angular_degree }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn jacobi_b(k: usize, alpha: f64) -> f64 {
    let k = k as f64;
    let s = 2.0 * k + 2.0 * alpha;
    4.0 * k * (k + alpha) * (k + alpha) * (k + 2.0 * alpha) / (s * s * (s + 1.0) * (s - 1.0))
}

/// `∫_{-1}^{1} (1-t^2)^alpha dt` for `alpha` a non-negative multiple of 1/2.
fn jacobi_mass(alpha: f64) -> f64 {
    let twice = (2.0 * alpha).round() as i64;
    let (mut a, mut m) = if twice % 2 == 0 { (0.0, 2.0) } else { (0.5, std::f64::consts::FRAC_PI_2) };
    while a + 0.25 < alpha {
        a += 1.0;
        m *= 2.0 * a / (2.0 * a + 1.0);
    }
    m
}

impl GaussRule {
    /// `npts`-point Gauss rule for the weight `(1-t^2)^alpha` on `[-1,1]`.
    pub fn symmetric_jacobi(npts: usize, alpha: f64) -> Self {
        assert!(npts >= 1);
        assert!(alpha >= 0.0 && ((2.0 * alpha).round() - 2.0 * alpha).abs() < 1e-12);
        let mu0 = jacobi_mass(alpha);
        let sqrt_b: Vec<f64> = (0..=npts).map(|k| if k == 0 { 0.0 } else { jacobi_b(k, alpha).sqrt() }).collect();
        let mut jm = DMatrix::<f64>::zeros(npts, npts);
        for k in 1..npts {
            jm[(k - 1, k)] = sqrt_b[k];
            jm[(k, k - 1)] = sqrt_b[k];
        }
        let eig = SymmetricEigen::new(jm);
        let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

        // p̂_k orthonormal; returns (p̂_npts, p̂'_npts, Σ_{k<npts} p̂_k²)
        let eval = |t: f64| {
            let mut p_prev = 0.0;
            let mut p = 1.0 / mu0.sqrt();
            let mut d_prev = 0.0;
            let mut d = 0.0;
            let mut sum = p * p;
            for k in 0..npts {
                let p_next = (t * p - sqrt_b[k] * p_prev) / sqrt_b[k + 1];
                let d_next = (p + t * d - sqrt_b[k] * d_prev) / sqrt_b[k + 1];
                p_prev = p;
                p = p_next;
                d_prev = d;
                d = d_next;
                if k + 1 < npts {
                    sum += p * p;
                }
            }
            (p, d, sum)
        };
        let mut weights = Vec::with_capacity(npts);
        for t in nodes.iter_mut() {
            for _ in 0..3 {
                let (p, d, _) = eval(*t);
                if d != 0.0 {
                    *t -= p / d;
                }
            }
            weights.push(1.0 / eval(*t).2);
        }
        // exact symmetry
        for i in 0..npts / 2 {
            let j = npts - 1 - i;
            let t = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -t;
            nodes[j] = t;
            let w = 0.5 * (weights[i] + weights[j]);
            weights[i] = w;
            weights[j] = w;
        }
        if npts % 2 == 1 {
            nodes[npts / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Gauss–Legendre on `[lo, hi]`.
    pub fn legendre(npts: usize, lo: f64, hi: f64) -> Self {
        let base = GaussRule::symmetric_jacobi(npts, 0.0);
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        GaussRule {
            nodes: base.nodes.iter().map(|t| c + h * t).collect(),
            weights: base.weights.iter().map(|w| h * w).collect(),
        }
    }
}

/// Product rule on the unit sphere `S^{dim-1} ⊂ R^dim`.
#[derive(Clone, Debug)]
pub struct SphereRule {
    dim: usize,
    degree: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(dim: usize, degree: usize) -> Self {
        assert!(dim >= 2);
        let (points, weights) = Self::build(dim, degree);
        SphereRule { dim, degree, points, weights }
    }

    fn build(dim: usize, degree: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        if dim == 2 {
            let m = degree + 1;
            let w = 2.0 * std::f64::consts::PI / m as f64;
            let pts = (0..m)
                .map(|k| {
                    let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect();
            return (pts, vec![w; m]);
        }
        let (sub_pts, sub_w) = Self::build(dim - 1, degree);
        let rule = GaussRule::symmetric_jacobi(degree / 2 + 1, (dim as f64 - 3.0) / 2.0);
        let mut pts = Vec::with_capacity(rule.nodes.len() * sub_pts.len());
        let mut ws = Vec::with_capacity(pts.capacity());
        for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
            let s = (1.0 - t * t).sqrt();
            for (xi, wx) in sub_pts.iter().zip(&sub_w) {
                let mut p = Vec::with_capacity(dim);
                p.extend(xi.iter().map(|v| s * v));
                p.push(*t);
                pts.push(p);
                ws.push(wt * wx);
            }
        }
        (pts, ws)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// A node with its full weight (including the radial Jacobian).
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// Product rule on a coordinate ball (or a sub-annulus of it) and on its
/// boundary sphere.
#[derive(Clone, Debug)]
pub struct BallQuadrature {
    dim: usize,
    radius: f64,
    radial: GaussRule,
    sphere: SphereRule,
    order: QuadratureOrder,
}

impl BallQuadrature {
    pub fn new(dim: usize, radius: f64, order: QuadratureOrder) -> Self {
        Self::annulus(dim, radius, 0.0, radius, order)
    }

    /// Ball of `radius` whose volume integrals only sample `inner < |x| < outer`.
    /// Valid for integrands vanishing outside that annulus.
    pub fn annulus(dim: usize, radius: f64, inner: f64, outer: f64, order: QuadratureOrder) -> Self {
        assert!(0.0 <= inner && inner < outer && outer <= radius * (1.0 + 1e-12));
        BallQuadrature {
            dim,
            radius,
            radial: GaussRule::legendre(order.radial, inner, outer),
            sphere: SphereRule::new(dim, order.angular_degree),
            order,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn order(&self) -> QuadratureOrder {
        self.order
    }

    pub fn sphere_rule(&self) -> &SphereRule {
        &self.sphere
    }

    pub fn radial_rule(&self) -> &GaussRule {
        &self.radial
    }

    pub fn ball_nodes(&self) -> Vec<Node> {
        let mut out = Vec::with_capacity(self.radial.nodes.len() * self.sphere.len());
        for (r, wr) in self.radial.nodes.iter().zip(&self.radial.weights) {
            let jac = wr * r.powi(self.dim as i32 - 1);
            for (w, ws) in self.sphere.points.iter().zip(&self.sphere.weights) {
                out.push(Node { point: w.iter().map(|v| r * v).collect(), weight: jac * ws });
            }
        }
        out
    }

    pub fn sphere_nodes(&self) -> Vec<Node> {
        let jac = self.radius.powi(self.dim as i32 - 1);
        self.sphere
            .points
            .iter()
            .zip(&self.sphere.weights)
            .map(|(w, ws)| Node { point: w.iter().map(|v| self.radius * v).collect(), weight: jac * ws })
            .collect()
    }

    /// `∫ f dx` in coordinate measure.
    pub fn integrate_coordinate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        sum_nodes(&self.ball_nodes(), f)
    }

    /// `∫ f ρ dx` where `ρ` is a volume density (e.g. `sqrt(det g)`).
    pub fn integrate_ball<F, D>(&self, f: F, density: D) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
        D: Fn(&[f64]) -> Result<f64> + Sync,
    {
        self.integrate_coordinate(|p| Ok(f(p)? * density(p)?))
    }

    /// `∮ f dA` over the boundary sphere in Euclidean coordinate measure.
    pub fn integrate_sphere<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        sum_nodes(&self.sphere_nodes(), f)
    }

    /// `∮ f σ dA` with an area density relative to the coordinate sphere.
    pub fn integrate_sphere_density<F, D>(&self, f: F, density: D) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
        D: Fn(&[f64]) -> Result<f64> + Sync,
    {
        self.integrate_sphere(|p| Ok(f(p)? * density(p)?))
    }
}

/// Weighted sum of `f` over nodes, evaluated in parallel and reduced in a
/// fixed order.
pub fn sum_nodes<F>(nodes: &[Node], f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let terms: Vec<f64> = nodes
        .par_iter()
        .map(|n| {
            let v = f(&n.point)?;
            if !v.is_finite() {
                return Err(Error::Numeric { location: n.point.clone(), what: format!("integrand value {v}") });
            }
            Ok(v * n.weight)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms))
}

/// Evaluates `f` at every node in parallel, preserving node order.
pub fn map_nodes<T, F>(nodes: &[Node], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Node) -> Result<T> + Sync + Send,
{
    nodes.par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn legendre_integrates_monomials() {
        let r = GaussRule::legendre(10, -1.0, 1.0);
        for k in 0..20 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let q: f64 = r.nodes.iter().zip(&r.weights).map(|(t, w)| w * t.powi(k)).sum();
            assert!((q - exact).abs() < 1e-14, "k={k}: {q} vs {exact}");
        }
    }

    #[test]
    fn gegenbauer_mass() {
        for (alpha, m) in [(0.0, 2.0), (0.5, PI / 2.0), (1.0, 4.0 / 3.0), (1.5, 3.0 * PI / 8.0)] {
            let r = GaussRule::symmetric_jacobi(7, alpha);
            assert_relative_eq!(r.weights.iter().sum::<f64>(), m, max_relative = 1e-14);
        }
    }

    #[test]
    fn sphere_areas() {
        let areas = [(2, 2.0 * PI), (3, 4.0 * PI), (4, 2.0 * PI * PI), (5, 8.0 * PI * PI / 3.0), (6, PI.powi(3))];
        for (d, a) in areas {
            let s = SphereRule::new(d, 6);
            assert_relative_eq!(s.weights().iter().sum::<f64>(), a, max_relative = 1e-13);
        }
    }

    #[test]
    fn sphere_moments() {
        let s = SphereRule::new(3, 20);
        let m = |f: &dyn Fn(&[f64]) -> f64| -> f64 { s.points().iter().zip(s.weights()).map(|(p, w)| w * f(p)).sum() };
        assert_relative_eq!(m(&|p| p[2] * p[2]), 4.0 * PI / 3.0, max_relative = 1e-13);
        assert!(m(&|p| p[0] * p[1]).abs() < 1e-13);
        // ∫ x^4 y^4 z^2 over S^2 = 4π · 3·3·1/(3·5·7·9·11)
        let exact = 4.0 * PI * 9.0 / (3.0 * 5.0 * 7.0 * 9.0 * 11.0);
        assert_relative_eq!(m(&|p| p[0].powi(4) * p[1].powi(4) * p[2].powi(2)), exact, max_relative = 1e-12);
    }

    #[test]
    fn ball_volume_and_potential_integral() {
        let q = BallQuadrature::new(3, 1.0, QuadratureOrder::default());
        let v = q.integrate_coordinate(|_| Ok(1.0)).unwrap();
        assert_relative_eq!(v, 4.0 * PI / 3.0, max_relative = 1e-12);
        let lam = q.integrate_coordinate(|p| Ok((1.0 - p.iter().map(|x| x * x).sum::<f64>()) / 4.0)).unwrap();
        assert!((lam - 2.0 * PI / 15.0).abs() < 1e-10);
        let area = q.integrate_sphere(|_| Ok(1.0)).unwrap();
        assert_relative_eq!(area, 4.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn non_finite_reports_location() {
        let q = BallQuadrature::new(3, 1.0, QuadratureOrder::new(4, 2));
        let err = q.integrate_coordinate(|p| Ok(if p[2] > 0.0 { f64::NAN } else { 0.0 })).unwrap_err();
        match err {
            Error::Numeric { location, .. } => assert!(location[2] > 0.0),
            e => panic!("unexpected {e:?}"),
        }
    }
}
