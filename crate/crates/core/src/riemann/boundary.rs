//! Geometry of coordinate spheres `{|x| = ρ}` as hypersurfaces.

use super::curvature::CurvaturePoint;
use super::{invert_jet, MetricField};
use crate::error::{Error, Result};
use crate::fields::{Jet2, SymJet};

/// Extrinsic and intrinsic geometry of a coordinate sphere at one point.
#[derive(Clone, Debug)]
pub struct BoundaryGeometry {
    pub point: Vec<f64>,
    /// Outward unit normal, coordinate components.
    pub normal: Vec<f64>,
    /// `∇_k ν^i` at `i n + k`.
    pub normal_gradient: Vec<f64>,
    /// Orthonormal tangent frame (coordinate components), built by
    /// Gram–Schmidt from the coordinate axes in increasing order, skipping
    /// the axis most aligned with the position vector.
    pub tangent_frame: Vec<Vec<f64>>,
    /// `II(e_A, e_B) = ⟨∇_{e_A} ν, e_B⟩` in the tangent frame.
    pub second_fundamental: Vec<f64>,
    pub mean_curvature: f64,
    /// `div ν` of the unit normal field of the level spheres.
    pub normal_divergence: f64,
    /// Induced metric in the local sphere chart `u ↦ ρ (p̂ + T u)/|p̂ + T u|` at `u = 0`.
    pub induced_metric: Vec<f64>,
    /// Ratio of the induced area element to the Euclidean one of the coordinate sphere.
    pub area_density: f64,
    /// Scalar curvature of the induced metric, computed intrinsically.
    pub boundary_scalar: f64,
    /// `Ric(ν, ν)` of the ambient metric.
    pub ricci_normal: f64,
    pub curvature: CurvaturePoint,
}

impl BoundaryGeometry {
    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `∂f/∂ν` from a coordinate gradient.
    pub fn normal_derivative(&self, gradient: &[f64]) -> f64 {
        self.normal.iter().zip(gradient).map(|(a, b)| a * b).sum()
    }

    /// `max |II_AB − (H/(n−1)) δ_AB|`.
    pub fn umbilic_defect(&self) -> f64 {
        let m = self.dim() - 1;
        let mean = self.mean_curvature / m as f64;
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                let model = if a == b { mean } else { 0.0 };
                worst = worst.max((self.second_fundamental[a * m + b] - model).abs());
            }
        }
        worst
    }

    /// `⟨II, h⟩` for a coordinate-component 2-tensor `h`.
    pub fn second_fundamental_pairing(&self, h: &[f64]) -> f64 {
        let n = self.dim();
        let m = n - 1;
        let mut s = 0.0;
        for a in 0..m {
            for b in 0..m {
                s += self.second_fundamental[a * m + b] * bilinear(h, n, &self.tangent_frame[a], &self.tangent_frame[b]);
            }
        }
        s
    }

    /// `max_{A,B} |h(e_A, e_B)|` over the tangent frame.
    pub fn tangential_sup(&self, h: &[f64]) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for a in &self.tangent_frame {
            for b in &self.tangent_frame {
                worst = worst.max(bilinear(h, n, a, b).abs());
            }
        }
        worst
    }
}

/// `h(u, v)` for row-major coordinate components.
pub fn bilinear(h: &[f64], n: usize, u: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += h[i * n + j] * u[i] * v[j];
        }
    }
    s
}

fn inner(g: &[f64], n: usize, u: &[f64], v: &[f64]) -> f64 {
    bilinear(g, n, u, v)
}

/// Index of the coordinate axis most aligned with `p` (lowest index on ties).
fn dominant_axis(p: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..p.len() {
        if p[i].abs() > p[best].abs() {
            best = i;
        }
    }
    best
}

/// Geometry of the level sphere through `p`.
pub fn level_sphere_geometry(metric: &MetricField, p: &[f64]) -> Result<BoundaryGeometry> {
    let n = p.len();
    metric.chart().check(p)?;
    let rho = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rho == 0.0 {
        return Err(Error::DegenerateBoundary { point: p.to_vec() });
    }
    let x = Jet2::seed(p);
    let gj = metric.eval(&x);
    let cp = CurvaturePoint::from_metric_jets(&gj, p)?;
    let ginv = invert_jet(&gj).ok_or_else(|| Error::SingularMetric { point: p.to_vec() })?;

    let r = crate::fields::jet::norm_sq(&x).sqrt();
    let conormal: Vec<Jet2> = x.iter().map(|xi| *xi / r).collect();
    let raised: Vec<Jet2> = (0..n).map(|i| (0..n).map(|j| ginv.get(i, j) * conormal[j]).sum()).collect();
    let len = crate::fields::jet::dot(&raised, &conormal).sqrt();
    let nu: Vec<Jet2> = raised.iter().map(|w| *w / len).collect();
    let normal: Vec<f64> = nu.iter().map(Jet2::value).collect();

    let mut normal_gradient = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let mut s = nu[i].grad(k);
            for q in 0..n {
                s += cp.gamma(i, k, q) * normal[q];
            }
            normal_gradient[i * n + k] = s;
        }
    }
    let normal_divergence = (0..n).map(|i| normal_gradient[i * n + i]).sum();

    let g = &cp.metric;
    let skip = dominant_axis(p);
    let mut tangent_frame: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for axis in (0..n).filter(|&i| i != skip) {
        let mut v = vec![0.0; n];
        v[axis] = 1.0;
        let c = inner(g, n, &v, &normal);
        for i in 0..n {
            v[i] -= c * normal[i];
        }
        for t in &tangent_frame {
            let c = inner(g, n, &v, t);
            for i in 0..n {
                v[i] -= c * t[i];
            }
        }
        let l = inner(g, n, &v, &v).sqrt();
        if !(l > 1e-12) {
            return Err(Error::DegenerateBoundary { point: p.to_vec() });
        }
        v.iter_mut().for_each(|c| *c /= l);
        tangent_frame.push(v);
    }
    let m = n - 1;
    let mut second_fundamental = vec![0.0; m * m];
    for a in 0..m {
        // ∇_{e_A} ν
        let dv: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|k| normal_gradient[i * n + k] * tangent_frame[a][k]).sum())
            .collect();
        for b in 0..m {
            second_fundamental[a * m + b] = inner(g, n, &dv, &tangent_frame[b]);
        }
    }
    let mean_curvature = (0..m).map(|a| second_fundamental[a * m + a]).sum();
    let ricci_normal = bilinear(&cp.ricci, n, &normal, &normal);

    let (induced_metric, boundary_scalar) = intrinsic_sphere(metric, p, rho, skip)?;
    let det = nalgebra::DMatrix::from_row_slice(m, m, &induced_metric).determinant();
    if !(det > 0.0) {
        return Err(Error::DegenerateBoundary { point: p.to_vec() });
    }
    let area_density = det.sqrt() / rho.powi(m as i32);

    Ok(BoundaryGeometry {
        point: p.to_vec(),
        normal,
        normal_gradient,
        tangent_frame,
        second_fundamental,
        mean_curvature,
        normal_divergence,
        induced_metric,
        area_density,
        boundary_scalar,
        ricci_normal,
        curvature: cp,
    })
}

/// Geometry of the chart boundary `Σ` at `p`; `p` must lie on it.
pub fn boundary_geometry(metric: &MetricField, p: &[f64]) -> Result<BoundaryGeometry> {
    let rho = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = metric.chart().coord_radius();
    if (rho - target).abs() > 1e-9 * target {
        return Err(Error::domain(p, format!("|x| = {rho} is not on the boundary sphere of radius {target}")));
    }
    level_sphere_geometry(metric, p)
}

/// Induced metric and its scalar curvature from a local chart of the sphere.
fn intrinsic_sphere(metric: &MetricField, p: &[f64], rho: f64, skip: usize) -> Result<(Vec<f64>, f64)> {
    let n = p.len();
    let m = n - 1;
    let phat: Vec<f64> = p.iter().map(|v| v / rho).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    for axis in (0..n).filter(|&i| i != skip) {
        let mut v = vec![0.0; n];
        v[axis] = 1.0;
        let c = phat[axis];
        for i in 0..n {
            v[i] -= c * phat[i];
        }
        for t in &basis {
            let c: f64 = v.iter().zip(t).map(|(a, b)| a * b).sum();
            for i in 0..n {
                v[i] -= c * t[i];
            }
        }
        let l = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter_mut().for_each(|c| *c /= l);
        basis.push(v);
    }
    let u: Vec<Jet2> = (0..m).map(|a| Jet2::variable(0.0, a, m)).collect();
    let q: Vec<Jet2> = (0..n)
        .map(|i| {
            let mut s = Jet2::constant(phat[i]);
            for a in 0..m {
                s += u[a] * basis[a][i];
            }
            s
        })
        .collect();
    let qn = crate::fields::jet::norm_sq(&q).sqrt();
    let inv = qn.recip();
    let inv3 = inv * inv * inv;
    let xs: Vec<Jet2> = q.iter().map(|qi| *qi * inv * rho).collect();
    let tangents: Vec<Vec<Jet2>> = (0..m)
        .map(|a| {
            let qt: Jet2 = (0..n).map(|i| q[i] * basis[a][i]).sum();
            (0..n).map(|i| (inv * basis[a][i] - q[i] * qt * inv3) * rho).collect()
        })
        .collect();
    let gx = metric.eval(&xs);
    let gamma = SymJet::from_fn(m, |a, b| {
        let mut s = Jet2::constant(0.0);
        for i in 0..n {
            for j in 0..n {
                s += gx.get(i, j) * tangents[a][i] * tangents[b][j];
            }
        }
        s
    });
    let cp = CurvaturePoint::from_metric_jets(&gamma, p).map_err(|_| Error::DegenerateBoundary { point: p.to_vec() })?;
    Ok((cp.metric.clone(), cp.scalar))
}
