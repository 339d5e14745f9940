//! Charts, jet-valued fields and quadrature.

pub mod jet;
pub mod quadrature;
pub mod series;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
pub use jet::{Jet2, MAX_DIM};
pub use quadrature::{BallQuadrature, GaussRule, QuadratureOrder, SphereRule};
pub use series::Series;

/// Relative slack used when deciding whether a point lies in a closed chart domain.
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    /// Cartesian coordinates on a coordinate ball.
    ConformalBall,
    /// Polar coordinates `(r, ω)` embedded as Cartesian `y = r ω`, with the
    /// pole and the outer sphere excluded.
    GeodesicPolar,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chart {
    dim: usize,
    kind: ChartKind,
    coord_radius: f64,
}

impl Chart {
    pub fn new(dim: usize, kind: ChartKind, coord_radius: f64) -> Result<Self> {
        if !(3..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "dimension {dim} not supported (need 3..={MAX_DIM})"
            )));
        }
        if !(coord_radius > 0.0 && coord_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("coordinate radius {coord_radius} must be positive")));
        }
        Ok(Chart { dim, kind, coord_radius })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn coord_radius(&self) -> f64 {
        self.coord_radius
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        if p.len() != self.dim {
            return false;
        }
        let r = norm(p);
        let outer = self.coord_radius * (1.0 + DOMAIN_SLACK);
        match self.kind {
            ChartKind::ConformalBall => r <= outer,
            ChartKind::GeodesicPolar => r > 0.0 && r <= outer,
        }
    }

    pub fn check(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::domain(p, format!("expected {} coordinates", self.dim)));
        }
        if !p.iter().all(|v| v.is_finite()) {
            return Err(Error::domain(p, "non-finite coordinate"));
        }
        if !self.contains(p) {
            let reason = match self.kind {
                ChartKind::GeodesicPolar if norm(p) == 0.0 => "pole is excluded from polar charts".to_string(),
                _ => format!("|x| = {} exceeds coordinate radius {}", norm(p), self.coord_radius),
            };
            return Err(Error::domain(p, reason));
        }
        Ok(())
    }
}

/// Closed region of coordinate radii on which a field may be nonzero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    Everywhere,
    Annulus { inner: f64, outer: f64 },
}

impl Support {
    pub fn contains_radius(&self, r: f64) -> bool {
        match *self {
            Support::Everywhere => true,
            Support::Annulus { inner, outer } => r >= inner && r <= outer,
        }
    }

    fn contains_jets(&self, x: &[Jet2]) -> bool {
        match self {
            Support::Everywhere => true,
            _ => self.contains_radius(x.iter().map(|v| v.value() * v.value()).sum::<f64>().sqrt()),
        }
    }

    /// Smallest support containing both.
    pub fn union(&self, other: &Support) -> Support {
        match (*self, *other) {
            (Support::Annulus { inner: a, outer: b }, Support::Annulus { inner: c, outer: d }) => {
                Support::Annulus { inner: a.min(c), outer: b.max(d) }
            }
            _ => Support::Everywhere,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryFlag {
    VanishesOnBoundary,
    TangentialPartVanishes,
    Unconstrained,
}

impl BoundaryFlag {
    /// Flag of a sum of two fields.
    pub fn combine(self, other: BoundaryFlag) -> BoundaryFlag {
        use BoundaryFlag::*;
        match (self, other) {
            (VanishesOnBoundary, VanishesOnBoundary) => VanishesOnBoundary,
            (Unconstrained, _) | (_, Unconstrained) => Unconstrained,
            _ => TangentialPartVanishes,
        }
    }
}

pub(crate) fn norm(p: &[f64]) -> f64 {
    p.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn zero_jet(nvars: usize) -> Jet2 {
    if nvars == 0 {
        Jet2::constant(0.0)
    } else {
        Jet2::variable(0.0, 0, nvars).scale(0.0)
    }
}

type ScalarFn = dyn Fn(&[Jet2]) -> Jet2 + Send + Sync;
type TensorFn = dyn Fn(&[Jet2]) -> SymJet + Send + Sync;
type VectorFn = dyn Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync;

/// Symmetric matrix of jets stored as its upper triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct SymJet {
    dim: usize,
    data: Vec<Jet2>,
}

impl SymJet {
    pub fn zeros(dim: usize) -> Self {
        SymJet { dim, data: vec![Jet2::constant(0.0); dim * (dim + 1) / 2] }
    }

    /// Builds from a generator called once for each `i <= j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Jet2) -> Self {
        let mut out = SymJet::zeros(dim);
        for j in 0..dim {
            for i in 0..=j {
                out.data[j * (j + 1) / 2 + i] = f(i, j);
            }
        }
        out
    }

    pub fn identity(dim: usize) -> Self {
        SymJet::from_fn(dim, |i, j| Jet2::constant(if i == j { 1.0 } else { 0.0 }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Jet2 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.data[hi * (hi + 1) / 2 + lo]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Jet2) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        self.data[hi * (hi + 1) / 2 + lo] = v;
    }

    pub fn map(&self, f: impl Fn(Jet2) -> Jet2) -> Self {
        SymJet { dim: self.dim, data: self.data.iter().map(|v| f(*v)).collect() }
    }

    pub fn add(&self, other: &SymJet) -> Self {
        SymJet { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect() }
    }

    pub fn scale_by(&self, s: Jet2) -> Self {
        self.map(|v| v * s)
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.get(i, j).value();
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(Jet2::is_finite)
    }
}

/// A smooth scalar field on a chart, evaluated as jets.
#[derive(Clone)]
pub struct ScalarField {
    chart: Chart,
    support: Support,
    f: Arc<ScalarFn>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField").field("chart", &self.chart).field("support", &self.support).finish()
    }
}

impl ScalarField {
    pub fn new(chart: Chart, f: impl Fn(&[Jet2]) -> Jet2 + Send + Sync + 'static) -> Self {
        ScalarField { chart, support: Support::Everywhere, f: Arc::new(f) }
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }

    pub fn constant(chart: Chart, v: f64) -> Self {
        ScalarField::new(chart, move |_| Jet2::constant(v))
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// Evaluates on jet coordinates without a domain check, so the field can
    /// be composed with coordinate maps.
    pub fn eval(&self, x: &[Jet2]) -> Jet2 {
        if !self.support.contains_jets(x) {
            return zero_jet(x.first().map_or(0, Jet2::nvars));
        }
        (self.f)(x)
    }

    pub fn eval_at(&self, p: &[f64]) -> Result<Jet2> {
        self.chart.check(p)?;
        Ok(self.eval(&Jet2::seed(p)))
    }

    pub fn value_at(&self, p: &[f64]) -> Result<f64> {
        Ok(self.eval_at(p)?.value())
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        let (a, b) = (self.clone(), other.clone());
        let support = self.support.union(&other.support);
        ScalarField::new(self.chart, move |x| a.eval(x) + b.eval(x)).with_support(support)
    }

    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        let (a, b) = (self.clone(), other.clone());
        ScalarField::new(self.chart, move |x| a.eval(x) * b.eval(x))
    }

    pub fn scale(&self, s: f64) -> ScalarField {
        let a = self.clone();
        ScalarField::new(self.chart, move |x| a.eval(x) * s).with_support(self.support)
    }
}

/// A smooth symmetric (0,2) tensor field, components in chart coordinates.
#[derive(Clone)]
pub struct SymTensorField {
    chart: Chart,
    support: Support,
    boundary_flag: BoundaryFlag,
    f: Arc<TensorFn>,
}

impl fmt::Debug for SymTensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymTensorField")
            .field("chart", &self.chart)
            .field("support", &self.support)
            .field("boundary_flag", &self.boundary_flag)
            .finish()
    }
}

impl SymTensorField {
    pub fn new(chart: Chart, f: impl Fn(&[Jet2]) -> SymJet + Send + Sync + 'static) -> Self {
        SymTensorField { chart, support: Support::Everywhere, boundary_flag: BoundaryFlag::Unconstrained, f: Arc::new(f) }
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }

    pub fn with_boundary_flag(mut self, flag: BoundaryFlag) -> Self {
        self.boundary_flag = flag;
        self
    }

    pub fn zero(chart: Chart) -> Self {
        let n = chart.dim();
        SymTensorField::new(chart, move |_| SymJet::zeros(n)).with_boundary_flag(BoundaryFlag::VanishesOnBoundary)
    }

    /// Constant-coefficient matrix field (row-major input, symmetrised).
    pub fn constant_matrix(chart: Chart, m: &[f64]) -> Self {
        let n = chart.dim();
        let m = m.to_vec();
        SymTensorField::new(chart, move |_| {
            SymJet::from_fn(n, |i, j| Jet2::constant(0.5 * (m[i * n + j] + m[j * n + i])))
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn boundary_flag(&self) -> BoundaryFlag {
        self.boundary_flag
    }

    pub fn eval(&self, x: &[Jet2]) -> SymJet {
        let n = self.chart.dim();
        if !self.support.contains_jets(x) {
            let z = zero_jet(x.first().map_or(0, Jet2::nvars));
            return SymJet::from_fn(n, |_, _| z);
        }
        (self.f)(x)
    }

    pub fn eval_at(&self, p: &[f64]) -> Result<SymJet> {
        self.chart.check(p)?;
        Ok(self.eval(&Jet2::seed(p)))
    }

    pub fn add(&self, other: &SymTensorField) -> SymTensorField {
        let (a, b) = (self.clone(), other.clone());
        SymTensorField::new(self.chart, move |x| a.eval(x).add(&b.eval(x)))
            .with_support(self.support.union(&other.support))
            .with_boundary_flag(self.boundary_flag.combine(other.boundary_flag))
    }

    pub fn scale(&self, s: f64) -> SymTensorField {
        let a = self.clone();
        SymTensorField::new(self.chart, move |x| a.eval(x).map(|v| v * s))
            .with_support(self.support)
            .with_boundary_flag(self.boundary_flag)
    }

    /// Pointwise product with a scalar field. The result vanishes on the
    /// boundary when the scalar does.
    pub fn times_scalar(&self, s: &ScalarField, flag: BoundaryFlag) -> SymTensorField {
        let (a, f) = (self.clone(), s.clone());
        SymTensorField::new(self.chart, move |x| a.eval(x).scale_by(f.eval(x)))
            .with_support(self.support)
            .with_boundary_flag(flag)
    }

    /// `s * g` for a scalar `s` and tensor `g`.
    pub fn scalar_times(s: &ScalarField, g: &SymTensorField, flag: BoundaryFlag) -> SymTensorField {
        g.times_scalar(s, flag)
    }
}

/// A smooth vector field (contravariant components).
#[derive(Clone)]
pub struct VectorField {
    chart: Chart,
    f: Arc<VectorFn>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField").field("chart", &self.chart).finish()
    }
}

impl VectorField {
    pub fn new(chart: Chart, f: impl Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync + 'static) -> Self {
        VectorField { chart, f: Arc::new(f) }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn eval(&self, x: &[Jet2]) -> Vec<Jet2> {
        (self.f)(x)
    }

    pub fn eval_at(&self, p: &[f64]) -> Result<Vec<Jet2>> {
        self.chart.check(p)?;
        Ok(self.eval(&Jet2::seed(p)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit_chart(n: usize) -> Chart {
        Chart::new(n, ChartKind::ConformalBall, 1.0).unwrap()
    }

    #[test]
    fn euclidean_potential_jet() {
        let chart = unit_chart(3);
        let lam = ScalarField::new(chart, |x| (1.0 - jet::norm_sq(x)) / 4.0);
        let j = lam.eval_at(&[0.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(j.value(), 0.25);
        for i in 0..3 {
            assert_eq!(j.grad(i), 0.0);
            for k in 0..3 {
                assert_abs_diff_eq!(j.hess(i, k), if i == k { -0.5 } else { 0.0 });
            }
        }
    }

    #[test]
    fn outside_domain_is_an_error() {
        let chart = unit_chart(3);
        let f = ScalarField::constant(chart, 1.0);
        assert!(matches!(f.eval_at(&[1.5, 0.0, 0.0]), Err(Error::Domain { .. })));
        let polar = Chart::new(3, ChartKind::GeodesicPolar, 1.0).unwrap();
        assert!(ScalarField::constant(polar, 1.0).eval_at(&[0.0; 3]).is_err());
    }

    #[test]
    fn outside_support_is_exact_zero() {
        let chart = unit_chart(3);
        let f = ScalarField::new(chart, |x| x[0].exp()).with_support(Support::Annulus { inner: 0.2, outer: 0.5 });
        let j = f.eval_at(&[0.7, 0.0, 0.0]).unwrap();
        assert_eq!(j.value(), 0.0);
        assert_eq!(j.gradient(), vec![0.0; 3]);
        assert_eq!(j.hessian(), vec![0.0; 9]);
        assert!(f.eval_at(&[0.3, 0.0, 0.0]).unwrap().value() > 0.0);
    }

    #[test]
    fn tensor_components_symmetric() {
        let chart = unit_chart(3);
        let h = SymTensorField::new(chart, |x| SymJet::from_fn(3, |i, j| x[i] * x[j] + (i + j) as f64));
        let v = h.eval_at(&[0.1, 0.2, 0.3]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(v.get(i, j), v.get(j, i));
            }
        }
    }
}
