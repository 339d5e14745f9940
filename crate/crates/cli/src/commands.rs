//! One function per command; each returns report entries.

use std::f64::consts::PI;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use critvol::fields::{jet, BoundaryFlag, QuadratureOrder, ScalarField, SymTensorField};
use critvol::spaceform::{Model, SpaceFormBall};
use critvol::tolerances;
use critvol::ttensor::{annulus_point, assemble_tt, ball_tt_direction, solve_profile, tt_defects, RadialProfile, SphericalHarmonic, WarpedMetric};
use critvol::variation::oracle::{fd_linearized_scalar, fd_second_scalar, random_polynomial_tensor, relative_error};
use critvol::variation::{
    boundary_identities, critical_residual, first_variation, linearized_scalar, parallel_direction_value,
    path_first_variation, quadrature_for, second_scalar, second_variation,
};
use critvol::yamabe::{
    constraint_defect, effective_direction, first_eigenvalue, ConformalProblem, Discretization, YamabePath,
};

use crate::config::{Command, DirectionSpec, HarmonicSpec, ModelKind, ModelSpec, ScenarioConfig};
use crate::directions::{self, default_hhat, parallel_direction};
use crate::report::{Entry, Report};

pub mod anchor {
    pub const CRITICAL: &str = "critical-point equation −(Δλ)g + ∇²λ − λ Ric = g with λ = 0 on the boundary";
    pub const UMBILIC: &str = "boundary identity H ∂λ/∂ν = −1";
    pub const RIC_BOUNDARY: &str = "boundary identity 2 Ric(ν,ν) + R_Σ − K = (n−2)/(n−1) H²";
    pub const LINEARIZATION: &str = "linearized scalar curvature DR(h) = −Δ tr h + div div h − ⟨Ric, h⟩";
    pub const SECOND_SCALAR: &str = "second derivative of R along g + t h + ½ t² h′";
    pub const TT: &str = "trace-free divergence-free tensor from a radial profile and a degree-2 spherical harmonic";
    pub const SECOND_VARIATION: &str = "second variation of volume at a critical metric";
    pub const TT_POSITIVE: &str = "TT directions on Euclidean balls and spherical balls inside the hemisphere increase V″";
    pub const TT_HYPERBOLIC: &str = "TT directions supported in a hyperbolic ball with λ₁ > 8 increase V″";
    pub const TT_LARGE_SPHERE: &str = "TT directions on spherical balls larger than the hemisphere decrease V″";
    pub const SADDLE: &str = "λĥ directions on the Euclidean ball: V″ = (n−6)/(8(n−1)) ∫ λ²|ĥ|²";
    pub const SADDLE_VALUE: &str = "λĥ with ĥ = diag(1,−1,0) on the unit 3-ball: V″ = −π/140";
    pub const KAPPA: &str = "curved κ-families converge to the Euclidean saddle: F_κ(h_κ) − F₀(h₀) = O(κ²)";
    pub const PATH: &str = "V″(0) along the constant-scalar-curvature path equals the second-variation formula at its tangent";
    pub const PATH_FIRST: &str = "V′(0) = 0 along constant-scalar-curvature paths at a critical metric";
    pub const EINSTEIN_FLUX: &str = "Einstein balls: V′(0) = −(1/κ) ∮ H′(0) along paths fixing K and the boundary metric";
    pub const CONSTRAINT: &str = "solved path metrics have scalar curvature K";
    pub const CHAIN_FLAT: &str = "flat volume chain |Σ| = n/(n−1) H V";
    pub const CHAIN_GENERAL: &str = "volume chain |Σ| = (H/(n−1)) ∫ (Kλ + n) dV";
    pub const MINKOWSKI: &str = "Minkowski equality |Σ|² = n/(n−1) V ∮ H for round spheres";
    pub const EIGEN: &str = "first Dirichlet eigenvalue of the geodesic ball";
    pub const EIGEN_MARGIN: &str = "(n−1)λ₁ − K > 0 makes the conformal Dirichlet problem solvable near t = 0";
}

/// Process-level options that are not part of the scenario.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    /// Overrides both quadrature orders.
    pub quad_order: Option<usize>,
}

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    opts: RunOptions,
}

impl Ctx<'_> {
    fn seed(&self) -> u64 {
        self.opts.seed.or(self.cfg.seed).unwrap_or(0)
    }

    fn quadrature(&self, default: QuadratureOrder) -> QuadratureOrder {
        match (self.opts.quad_order, self.cfg.quadrature) {
            (Some(k), _) => QuadratureOrder::new(k, k),
            (None, Some(q)) => q.order(),
            (None, None) => default,
        }
    }
}

fn describe(m: &ModelSpec) -> String {
    match m.kind {
        ModelKind::Euclidean => format!("euclidean n={} R={}", m.dim, m.radius),
        _ => format!("{} n={} R={} κ={}", format!("{:?}", m.kind).to_lowercase(), m.dim, m.radius, m.kappa),
    }
}

fn scaled_margin(value: f64, reference: f64) -> f64 {
    value.abs() / reference.abs().max(f64::MIN_POSITIVE)
}

pub fn run(cfg: &ScenarioConfig, opts: RunOptions) -> Result<Report> {
    let ctx = Ctx { cfg, opts };
    let mut out_of_scope = Vec::new();
    let entries = match cfg.command {
        Command::CriticalCheck => critical_check(&ctx)?,
        Command::LinearizationCheck => fd_check(&ctx, false)?,
        Command::SecondScalarCheck => fd_check(&ctx, true)?,
        Command::TtBuild => tt_build(&ctx)?,
        Command::SecondVariation => second_variation_cmd(&ctx)?,
        Command::SaddleDemo => saddle_demo(&ctx)?,
        Command::LargeBallDemo => large_ball_demo(&ctx)?,
        Command::YamabePath => {
            out_of_scope.push(
                "existence interval of the conformal problem: only the largest solvable |t| found by doubling is reported".into(),
            );
            yamabe_path(&ctx)?
        }
        Command::VolumeChain => {
            out_of_scope.push("volume lower bound V(g) ≥ V₀ for non-round convex boundaries".into());
            out_of_scope.push("rigidity in the equality cases".into());
            volume_chain(&ctx)?
        }
        Command::EigenCheck => eigen_check(&ctx)?,
    };
    let config = serde_json::to_value(cfg).context("config echo")?;
    Ok(Report::new(cfg.command.name(), config, entries, out_of_scope))
}

fn critical_check(ctx: &Ctx) -> Result<Vec<Entry>> {
    let tol = ctx.cfg.tolerances.critical_residual.unwrap_or(tolerances::CRITICAL_RESIDUAL);
    let order = ctx.quadrature(QuadratureOrder::new(12, 8));
    let mut out = Vec::new();
    for m in &ctx.cfg.models {
        let name = describe(m);
        let ball = m.ball()?;
        let q = ball.quadrature(order);
        let lambda = ball.critical_potential().lambda;
        match critical_residual(ball.metric(), &lambda, &q) {
            Ok(r) => {
                out.push(Entry::at_most(format!("{name}: residual sup"), anchor::CRITICAL, r.sup, tol).with_detail(&r));
                out.push(Entry::at_most(format!("{name}: potential on boundary"), anchor::CRITICAL, r.boundary_sup, 1e-12));
            }
            Err(e) => out.push(Entry::failed(format!("{name}: residual"), anchor::CRITICAL, &e)),
        }
        match boundary_identities(&ball, &q) {
            Ok(b) => {
                out.push(Entry::at_most(
                    format!("{name}: H ∂λ/∂ν + 1"),
                    anchor::UMBILIC,
                    b.umbilic_product_defect,
                    tolerances::UMBILIC_PRODUCT,
                ));
                out.push(Entry::at_most(
                    format!("{name}: Ricci boundary identity"),
                    anchor::RIC_BOUNDARY,
                    b.ric_boundary_defect,
                    tolerances::RIC_BOUNDARY,
                ));
            }
            Err(e) => out.push(Entry::failed(format!("{name}: boundary"), anchor::UMBILIC, &e)),
        }
    }
    Ok(out)
}

fn interior_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-radius..radius)).collect();
        if p.iter().map(|v| v * v).sum::<f64>() < radius * radius {
            return p;
        }
    }
}

#[derive(Serialize)]
struct FdSummary {
    directions: usize,
    points: usize,
    step: f64,
    relative_floor: f64,
    worst_analytic: f64,
    worst_difference: f64,
}

/// Analytic first or second scalar-curvature derivative against
/// Richardson-extrapolated differences of the full nonlinear `R`.
fn fd_check(ctx: &Ctx, second: bool) -> Result<Vec<Entry>> {
    let (tol, step, floor, anchor) = if second {
        (ctx.cfg.tolerances.second_scalar_rel.unwrap_or(tolerances::SECOND_SCALAR_REL), 2e-2, 1e-2, anchor::SECOND_SCALAR)
    } else {
        (ctx.cfg.tolerances.linearization_rel.unwrap_or(tolerances::LINEARIZATION_REL), 1e-2, 1e-3, anchor::LINEARIZATION)
    };
    let ndir = ctx.cfg.directions.unwrap_or(10);
    let npts = ctx.cfg.samples.unwrap_or(20);
    let mut out = Vec::new();
    for (k, m) in ctx.cfg.models.iter().enumerate() {
        let name = describe(m);
        let ball = m.ball()?;
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed().wrapping_add(k as u64));
        let mut worst = (0.0f64, 0.0, 0.0);
        let mut failure = None;
        'dirs: for d in 0..ndir {
            let dseed = rng.gen::<u64>();
            let h = random_polynomial_tensor(*ball.chart(), dseed);
            let h2 = random_polynomial_tensor(*ball.chart(), dseed ^ 0x5bd1_e995);
            for _ in 0..npts {
                let p = interior_point(&mut rng, ball.dim(), 0.9 * ball.coord_radius());
                let pair = if second {
                    second_scalar(ball.metric(), &h, &h2, &p)
                        .and_then(|a| Ok((a, fd_second_scalar(ball.metric(), &h, &h2, &p, step)?)))
                } else {
                    linearized_scalar(ball.metric(), &h, &p)
                        .and_then(|a| Ok((a, fd_linearized_scalar(ball.metric(), &h, &p, step)?)))
                };
                match pair {
                    Ok((a, b)) => {
                        let err = relative_error(a, b, floor);
                        if err > worst.0 || !err.is_finite() {
                            worst = (err, a, b);
                        }
                    }
                    Err(e) => {
                        failure = Some(format!("direction {d}: {e}"));
                        break 'dirs;
                    }
                }
            }
        }
        let label = format!("{name}: worst relative error");
        match failure {
            Some(e) => out.push(Entry::failed(label, anchor, &e)),
            None => out.push(Entry::at_most(label, anchor, worst.0, tol).with_detail(FdSummary {
                directions: ndir,
                points: npts,
                step,
                relative_floor: floor,
                worst_analytic: worst.1,
                worst_difference: worst.2,
            })),
        }
    }
    Ok(out)
}

/// Areal radius `sn(r)` of the geodesic sphere of radius `r`.
fn areal(ball: &SpaceFormBall, r: f64) -> f64 {
    let k = ball.curvature_scale();
    match ball.model() {
        Model::Euclidean => r,
        Model::Hyperbolic => (k * r).sinh() / k,
        Model::Spherical => (k * r).sin() / k,
    }
}

fn tt_support(ctx: &Ctx, ball: &SpaceFormBall) -> (HarmonicSpec, f64, f64) {
    match &ctx.cfg.direction {
        Some(DirectionSpec::TtProfile { harmonic, inner, outer }) => (harmonic.clone(), *inner, *outer),
        _ => {
            let limit = match ball.model() {
                Model::Spherical => ball.geodesic_radius().min(0.5 * PI / ball.curvature_scale()),
                _ => ball.geodesic_radius(),
            };
            (HarmonicSpec::Catalogue, 0.2 * limit, 0.8 * limit)
        }
    }
}

fn tt_build(ctx: &Ctx) -> Result<Vec<Entry>> {
    let npts = ctx.cfg.samples.unwrap_or(200);
    let t = &ctx.cfg.tolerances;
    let (tr_tol, div_tol) = (t.tt_trace.unwrap_or(tolerances::TT_TRACE), t.tt_divergence.unwrap_or(tolerances::TT_DIVERGENCE));
    let mut out = Vec::new();
    for (k, m) in ctx.cfg.models.iter().enumerate() {
        let ball = m.ball()?;
        let (spec, inner, outer) = tt_support(ctx, &ball);
        let sphere_dim = ball.dim() - 1;
        // polar chart in areal radius, verified by the generic tensor calculus
        let polar_outer = match ball.model() {
            Model::Spherical => 1.0 / ball.curvature_scale(),
            _ => areal(&ball, ball.geodesic_radius()),
        };
        let metric = WarpedMetric::space_form(sphere_dim, polar_outer, ball.sectional())?;
        let (r1, r2) = (areal(&ball, inner), areal(&ball, outer));
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed().wrapping_add(100 + k as u64));
        let points: Vec<Vec<f64>> = (0..npts).map(|_| annulus_point(&mut rng, ball.dim(), r1, r2)).collect();
        for y in directions::harmonics(&spec, sphere_dim)? {
            let name = format!("{}: {}", describe(m), y.label());
            let built = RadialProfile::bump(r1, r2, 1.0)
                .and_then(|a| solve_profile(&metric, &a, &y))
                .and_then(|p| Ok((p.determinant(), tt_defects(&metric.metric(), &assemble_tt(&p), &points)?)));
            match built {
                Ok((det, d)) => {
                    out.push(Entry::at_most(format!("{name}: |tr h| sup"), anchor::TT, d.trace_sup, tr_tol).with_detail(
                        serde_json::json!({ "points": npts, "areal_support": [r1, r2], "determinant": det }),
                    ));
                    out.push(Entry::at_most(format!("{name}: |div h| sup"), anchor::TT, d.divergence_sup, div_tol));
                    out.push(Entry::diagnostic(format!("{name}: |div div h| sup"), anchor::TT, d.second_divergence_sup));
                }
                Err(e) => out.push(Entry::failed(name.clone(), anchor::TT, &e)),
            }
            // the same tensor moved to the conformally flat chart of the ball
            let moved = ball_tt_direction(&ball, &y, inner, outer).and_then(|h| {
                let pts: Vec<Vec<f64>> = {
                    let s1 = 2.0 * r1 / (1.0 + (1.0 - ball.sectional() * r1 * r1).sqrt());
                    let s2 = 2.0 * r2 / (1.0 + (1.0 - ball.sectional() * r2 * r2).sqrt());
                    (0..npts.min(50)).map(|_| annulus_point(&mut rng, ball.dim(), s1, s2)).collect()
                };
                tt_defects(ball.metric(), &h, &pts)
            });
            match moved {
                Ok(d) => out.push(Entry::at_most(
                    format!("{name}: ball chart trace and divergence"),
                    anchor::TT,
                    d.trace_sup.max(d.divergence_sup),
                    tolerances::TT_TRANSPLANT,
                )),
                Err(e) => out.push(Entry::failed(format!("{name}: ball chart"), anchor::TT, &e)),
            }
        }
    }
    Ok(out)
}

/// The theory's sign for a TT direction, if it makes one: `Some(true)` for
/// positive. Hyperbolic balls qualify when the support ball has `λ₁ > 8`.
fn tt_expected_sign(ball: &SpaceFormBall, outer: f64) -> Result<(Option<bool>, &'static str)> {
    let k = ball.curvature_scale();
    Ok(match ball.model() {
        Model::Euclidean => (Some(true), anchor::TT_POSITIVE),
        Model::Spherical if k * ball.geodesic_radius() < 0.5 * PI => (Some(true), anchor::TT_POSITIVE),
        Model::Spherical => (Some(false), anchor::TT_LARGE_SPHERE),
        Model::Hyperbolic => {
            let e = first_eigenvalue(Model::Hyperbolic, ball.dim(), outer, k)?;
            // λ₁ scales like κ²; the criterion is for unit curvature
            ((e.lower / (k * k) > 8.0).then_some(true), anchor::TT_HYPERBOLIC)
        }
    })
}

fn second_variation_cmd(ctx: &Ctx) -> Result<Vec<Entry>> {
    let spec = ctx.cfg.direction.as_ref().context("direction required")?;
    let order = ctx.quadrature(QuadratureOrder::new(32, 16));
    let mut out = Vec::new();
    for m in &ctx.cfg.models {
        let ball = m.ball()?;
        let lambda = ball.critical_potential().lambda;
        for dir in directions::build(spec, &ball)? {
            let name = format!("{}: {}", describe(m), dir.label);
            let q = quadrature_for(&dir.field, ball.dim(), ball.coord_radius(), order);
            let b = match second_variation(ball.metric(), &lambda, &dir.field, &q) {
                Ok(b) => b,
                Err(e) => {
                    out.push(Entry::failed(name, anchor::SECOND_VARIATION, &e));
                    continue;
                }
            };
            out.push(Entry::diagnostic(format!("{name}: total"), anchor::SECOND_VARIATION, b.total).with_detail(&b));
            out.push(Entry::at_most(
                format!("{name}: critical residual at nodes"),
                anchor::CRITICAL,
                b.residual_sup,
                tolerances::CRITICAL_PRECONDITION,
            ));
            match spec {
                DirectionSpec::TtProfile { outer, .. } => {
                    out.push(Entry::at_most(
                        format!("{name}: reduced TT form"),
                        anchor::SECOND_VARIATION,
                        relative_error(b.total, b.reduced_tt, 0.0),
                        tolerances::REDUCED_FORM_REL,
                    ));
                    let (sign, anchor) = tt_expected_sign(&ball, *outer)?;
                    out.push(match sign {
                        Some(true) => Entry::above(format!("{name}: sign"), anchor, b.total, 0.0),
                        Some(false) => Entry::below(format!("{name}: sign"), anchor, b.total, 0.0),
                        None => Entry::diagnostic(format!("{name}: sign (no claim)"), anchor, b.total),
                    });
                }
                DirectionSpec::ParallelTracefree { hhat } if ball.model() == Model::Euclidean => {
                    let flat: Vec<f64> = hhat.iter().flatten().copied().collect();
                    let formula = parallel_direction_value(&lambda, &flat, &q)?;
                    out.push(Entry::at_most(
                        format!("{name}: against (n−6)/(8(n−1)) ∫λ²|ĥ|²"),
                        anchor::SADDLE,
                        relative_error(b.total, formula, 0.0),
                        tolerances::SADDLE_FORMULA_REL,
                    ));
                    if ball.dim() == 3 && (m.radius - 1.0).abs() < 1e-15 && flat == default_hhat(3) {
                        out.push(Entry::at_most(
                            format!("{name}: against −π/140"),
                            anchor::SADDLE_VALUE,
                            relative_error(b.total, -PI / 140.0, 0.0),
                            tolerances::SADDLE_VALUE_REL,
                        ));
                    }
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

/// Default conformal-solve grid for ball mode in dimension `n`.
pub fn default_ball_grid(n: usize) -> Discretization {
    match n {
        0..=3 => Discretization::default_ball(),
        4 => Discretization::Ball { degree: 6, radial: 8, angular: 12 },
        _ => Discretization::Ball { degree: 4, radial: 6, angular: 8 },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaRow {
    pub kappa: f64,
    /// `F_κ(h_κ)`
    pub value: f64,
    pub difference: f64,
    /// Sup of the conformal correction `v_κ` at the solve nodes.
    pub correction_sup: f64,
}

/// `F_κ(h_κ)` with `h_κ = h₀ + 4/(n−2) v_κ g_κ`, where `h₀ = λ₀ ĥ` uses the
/// Euclidean potential `λ₀ = (1 − |x|²)/(2(n−1))` of the unit ball.
pub fn kappa_family_value(model: Model, dim: usize, kappa: f64, grid: Discretization, order: QuadratureOrder) -> Result<(f64, f64)> {
    let ball = SpaceFormBall::unit_family(model, dim, kappa)?;
    let n = dim as f64;
    let lambda0 = ScalarField::new(*ball.chart(), move |x| (jet::norm_sq(x) * -1.0 + 1.0) * (1.0 / (2.0 * (n - 1.0))));
    let h0 = SymTensorField::constant_matrix(*ball.chart(), &default_hhat(dim)).times_scalar(&lambda0, BoundaryFlag::VanishesOnBoundary);
    let (h, sup) = if model == Model::Euclidean {
        (h0, 0.0)
    } else {
        let problem = ConformalProblem::new(&ball, &h0, grid)?;
        let v = problem.linearized()?;
        (effective_direction(&problem, &v), v.sup)
    };
    let q = ball.quadrature(order);
    let b = second_variation(ball.metric(), &ball.critical_potential().lambda, &h, &q)?;
    Ok((b.total, sup))
}

/// Least-squares slope of `log |difference|` against `log κ`.
pub fn observed_order(rows: &[KappaRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.kappa.ln(), r.difference.abs().ln())).collect();
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Product rules grow like `angular^(n−1)`; λĥ integrands are low-degree
/// polynomials, so small orders are already exact in high dimension.
fn saddle_order(n: usize) -> QuadratureOrder {
    match n {
        0..=3 => QuadratureOrder::new(24, 12),
        4 => QuadratureOrder::new(12, 8),
        _ => QuadratureOrder::new(8, 6),
    }
}

fn saddle_demo(ctx: &Ctx) -> Result<Vec<Entry>> {
    let kappas = ctx.cfg.kappas.clone().unwrap_or_else(|| vec![0.4, 0.2, 0.1, 0.05]);
    let mut out = Vec::new();
    for m in &ctx.cfg.models {
        let n = m.dim;
        let nf = n as f64;
        let name = format!("n={n}");
        let order = ctx.quadrature(saddle_order(n));
        if m.kind == ModelKind::Euclidean {
            let ball = m.ball()?;
            let lambda = ball.critical_potential().lambda;
            let hhat = default_hhat(n);
            let h = parallel_direction(&ball, &hhat);
            let q = ball.quadrature(order);
            let b = second_variation(ball.metric(), &lambda, &h, &q)?;
            let formula = parallel_direction_value(&lambda, &hhat, &q)?;
            let coefficient = (nf - 6.0) / (8.0 * (nf - 1.0));
            let detail = serde_json::json!({ "coefficient": coefficient, "formula": formula, "breakdown": b });
            if n == 6 {
                out.push(
                    Entry::diagnostic(format!("{name}: V″ (boundary case, coefficient 0)"), anchor::SADDLE, b.total)
                        .with_detail(detail),
                );
            } else if n < 6 {
                out.push(Entry::below(format!("{name}: V″ along λĥ"), anchor::SADDLE, b.total, 0.0).with_detail(detail));
            } else {
                out.push(Entry::diagnostic(format!("{name}: V″ along λĥ"), anchor::SADDLE, b.total).with_detail(detail));
            }
            // at n = 6 both sides vanish; compare against the size of ∫λ²|ĥ|²
            let scale = formula.abs().max(b.weighted_norm_sq.abs() * 1e-3);
            out.push(Entry::at_most(
                format!("{name}: against coefficient formula"),
                anchor::SADDLE,
                (b.total - formula).abs() / scale,
                tolerances::SADDLE_FORMULA_REL,
            ));
            continue;
        }
        // κ sweep for a curved model; the Euclidean value anchors the fit
        let model: Model = m.kind.into();
        let grid = ctx.cfg.grid.unwrap_or_else(|| default_ball_grid(n));
        let label = format!("{:?} n={n}", m.kind).to_lowercase();
        let (f0, _) = kappa_family_value(Model::Euclidean, n, 0.0, grid, order)?;
        let mut rows = Vec::new();
        for &kappa in &kappas {
            match kappa_family_value(model, n, kappa, grid, order) {
                Ok((value, correction_sup)) => rows.push(KappaRow { kappa, value, difference: value - f0, correction_sup }),
                Err(e) => out.push(Entry::failed(format!("{label} κ={kappa}"), anchor::KAPPA, &e)),
            }
        }
        if rows.len() < 2 {
            continue;
        }
        let p = observed_order(&rows);
        out.push(
            Entry::above(format!("{label}: observed order of F_κ − F₀"), anchor::KAPPA, p, tolerances::KAPPA_MIN_ORDER - 1e-12)
                .with_detail(serde_json::json!({ "euclidean_value": f0, "rows": rows })),
        );
        let probe = rows.iter().min_by(|a, b| (a.kappa - 0.1).abs().total_cmp(&(b.kappa - 0.1).abs())).expect("rows");
        out.push(Entry::below(format!("{label}: F at κ={}", probe.kappa), anchor::KAPPA, probe.value, 0.0));
    }
    Ok(out)
}

fn large_ball_demo(ctx: &Ctx) -> Result<Vec<Entry>> {
    let order = ctx.quadrature(QuadratureOrder::new(32, 16));
    let mut out = Vec::new();
    for m in &ctx.cfg.models {
        let name = describe(m);
        if m.kind != ModelKind::Spherical {
            out.push(Entry::failed(name, anchor::TT_LARGE_SPHERE, &"large-ball-demo needs spherical models"));
            continue;
        }
        let ball = m.ball()?;
        let n = ball.dim();
        let k = ball.curvature_scale();
        let e = first_eigenvalue(Model::Spherical, n, ball.geodesic_radius(), k)?;
        out.push(Entry::diagnostic(format!("{name}: λ₁ (below n κ² past the hemisphere)"), anchor::EIGEN, e.value()));
        let (spec, inner, outer) = match &ctx.cfg.direction {
            Some(DirectionSpec::TtProfile { harmonic, inner, outer }) => (harmonic.clone(), *inner, *outer),
            _ => (HarmonicSpec::Catalogue, 0.3 / k, 1.3 / k),
        };
        let lambda = ball.critical_potential().lambda;
        let hs: Vec<SphericalHarmonic> = directions::harmonics(&spec, n - 1)?.into_iter().take(3).collect();
        for y in hs {
            let label = format!("{name}: {} on ({inner}, {outer})", y.label());
            let res = ball_tt_direction(&ball, &y, inner, outer).and_then(|h| {
                let q = quadrature_for(&h, n, ball.coord_radius(), order);
                second_variation(ball.metric(), &lambda, &h, &q)
            });
            out.push(match res {
                Ok(b) => {
                    let (sign, anchor) = tt_expected_sign(&ball, outer)?;
                    let entry = match sign {
                        Some(false) => Entry::below(format!("{label}: V″"), anchor, b.total, 0.0),
                        Some(true) => Entry::above(format!("{label}: V″"), anchor, b.total, 0.0),
                        None => Entry::diagnostic(format!("{label}: V″"), anchor, b.total),
                    };
                    entry.with_detail(&b)
                }
                Err(e) => Entry::failed(label, anchor::TT_LARGE_SPHERE, &e),
            });
        }
    }
    Ok(out)
}

fn is_radially_symmetric(spec: &DirectionSpec) -> bool {
    matches!(spec, DirectionSpec::Conformal { .. })
}

#[derive(Serialize)]
struct PathDetail {
    step: f64,
    grid: Discretization,
    derivatives: critvol::yamabe::VolumeDerivatives,
    second_variation_of_tangent: f64,
    second_variation_of_direction: f64,
    correction_sup: f64,
    largest_solvable_t: Option<f64>,
}

fn yamabe_path(ctx: &Ctx) -> Result<Vec<Entry>> {
    let spec = ctx.cfg.direction.as_ref().context("direction required")?;
    let step = ctx.cfg.step.unwrap_or(0.1);
    let order = ctx.quadrature(QuadratureOrder::new(32, 16));
    let t = &ctx.cfg.tolerances;
    let rel_tol = t.path_second_derivative_rel.unwrap_or(tolerances::PATH_SECOND_DERIVATIVE_REL);
    let first_tol = t.path_first_derivative.unwrap_or(tolerances::PATH_FIRST_DERIVATIVE);
    let mut csv_rows = Vec::new();
    let mut out = Vec::new();
    for m in &ctx.cfg.models {
        let ball = m.ball()?;
        let grid = ctx.cfg.grid.unwrap_or_else(|| {
            if is_radially_symmetric(spec) {
                Discretization::default()
            } else {
                default_ball_grid(ball.dim())
            }
        });
        let lambda = ball.critical_potential().lambda;
        for dir in directions::build(spec, &ball)? {
            let name = format!("{}: {}", describe(m), dir.label);
            let solved = ConformalProblem::new(&ball, &dir.field, grid).and_then(|p| {
                let path = YamabePath::solve(&p, step)?;
                let lin = p.linearized()?;
                Ok((p, path, lin))
            });
            let (problem, path, lin) = match solved {
                Ok(v) => v,
                Err(e) => {
                    out.push(Entry::failed(name, anchor::PATH, &e));
                    continue;
                }
            };
            let d = path.derivatives();
            let heff = effective_direction(&problem, &lin);
            let q = quadrature_for(&heff, ball.dim(), ball.coord_radius(), order);
            let sv = second_variation(ball.metric(), &lambda, &heff, &q)?;
            let sv_raw = second_variation(ball.metric(), &lambda, &dir.field, &q)?;
            let detail = PathDetail {
                step,
                grid,
                derivatives: d,
                second_variation_of_tangent: sv.total,
                second_variation_of_direction: sv_raw.total,
                correction_sup: lin.sup,
                largest_solvable_t: problem.largest_solvable_t(step, 16.0 * step),
            };
            out.push(Entry::at_most(format!("{name}: |V′(0)|"), anchor::PATH_FIRST, d.first.abs(), first_tol));
            // rotationally symmetric paths are rigid: V″ = formula = 0
            if sv.total.abs() < 1e-10 {
                out.push(
                    Entry::at_most(format!("{name}: |V″(0) − formula| (both vanish)"), anchor::PATH, (d.second - sv.total).abs(), 1e-8)
                        .with_detail(&detail),
                );
            } else {
                out.push(
                    Entry::at_most(format!("{name}: V″(0) against formula"), anchor::PATH, relative_error(d.second, sv.total, 0.0), rel_tol)
                        .with_detail(&detail),
                );
            }
            let probe: Vec<Vec<f64>> = (1..=5)
                .map(|i| {
                    let mut p = vec![0.0; ball.dim()];
                    p[0] = 0.15 * i as f64 * ball.coord_radius();
                    p[ball.dim() - 1] = 0.05 * i as f64 * ball.coord_radius();
                    p
                })
                .collect();
            let end = path.samples.iter().max_by(|a, b| a.t.total_cmp(&b.t)).expect("samples");
            let defect = constraint_defect(&problem, &end.solution, &probe)?;
            let label = format!("{name}: |R − K| at t={}", end.t);
            out.push(match grid {
                Discretization::Radial { .. } => Entry::at_most(label, anchor::CONSTRAINT, defect, 1e-6),
                // least-squares collocation: the pointwise residual is a discretization diagnostic
                Discretization::Ball { .. } => Entry::diagnostic(label, anchor::CONSTRAINT, defect),
            });
            if ball.model() != Model::Euclidean {
                let bq = ball.quadrature(order);
                let flux = path_first_variation(&ball, &lambda, &heff, &bq)?;
                let raw = first_variation(ball.metric(), &dir.field, &bq)?;
                let einstein = flux.einstein_flux.unwrap_or(0.0);
                // TT and other trace-free directions have DV(h) = 0 exactly
                let scale = raw.abs().max(1e-6);
                out.push(
                    Entry::at_most(
                        format!("{name}: |V′ + (1/κ)∮H′| at the tangent, relative to the raw direction"),
                        anchor::EINSTEIN_FLUX,
                        scaled_margin(flux.volume_derivative - einstein, scale),
                        1e-4,
                    )
                    .with_detail(serde_json::json!({ "tangent": flux, "raw_volume_derivative": raw })),
                );
            }
            for (t, v, it, res) in path.rows() {
                csv_rows.push((name.clone(), t, v, it, res));
            }
        }
    }
    if let Some(path) = &ctx.cfg.csv {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(["direction", "t", "volume", "newton_iterations", "residual_sup"])?;
        for (name, t, v, it, res) in csv_rows {
            w.write_record([name, format!("{t:e}"), format!("{v:.17e}"), it.to_string(), format!("{res:e}")])?;
        }
        w.flush()?;
    }
    Ok(out)
}

fn volume_chain(ctx: &Ctx) -> Result<Vec<Entry>> {
    let order = ctx.quadrature(QuadratureOrder::new(24, 12));
    let mut out = Vec::new();
    for m in &ctx.cfg.models {
        let name = describe(m);
        let ball = m.ball()?;
        let b = boundary_identities(&ball, &ball.quadrature(order))?;
        let rel = |a: f64, c: f64| (a - c).abs() / c.abs();
        out.push(Entry::at_most(format!("{name}: H ∂λ/∂ν + 1"), anchor::UMBILIC, b.umbilic_product_defect, tolerances::UMBILIC_PRODUCT));
        out.push(Entry::at_most(format!("{name}: Ricci boundary identity"), anchor::RIC_BOUNDARY, b.ric_boundary_defect, tolerances::RIC_BOUNDARY));
        out.push(
            Entry::at_most(format!("{name}: general volume chain"), anchor::CHAIN_GENERAL, rel(b.general_chain_rhs, b.area), tolerances::VOLUME_CHAIN)
                .with_detail(&b),
        );
        if ball.model() == Model::Euclidean {
            out.push(Entry::at_most(format!("{name}: flat volume chain"), anchor::CHAIN_FLAT, rel(b.flat_chain_rhs, b.area), tolerances::VOLUME_CHAIN));
            out.push(Entry::at_most(format!("{name}: Minkowski equality"), anchor::MINKOWSKI, rel(b.minkowski_rhs, b.minkowski_lhs), tolerances::VOLUME_CHAIN));
        } else {
            out.push(Entry::diagnostic(format!("{name}: flat chain gap (holds only for K = 0)"), anchor::CHAIN_FLAT, rel(b.flat_chain_rhs, b.area)));
        }
    }
    Ok(out)
}

fn eigen_check(ctx: &Ctx) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for m in &ctx.cfg.models {
        let name = describe(m);
        let model: Model = m.kind.into();
        let n = m.dim as f64;
        let k = if m.kind == ModelKind::Euclidean { 1.0 } else { m.kappa };
        let e = first_eigenvalue(model, m.dim, m.radius, k)?;
        let lam = e.value();
        out.push(Entry::at_most(format!("{name}: bracket width / λ₁"), anchor::EIGEN, e.width() / lam, tolerances::EIGEN_BRACKET_REL).with_detail(e));
        out.push(Entry::diagnostic(format!("{name}: (n−1)λ₁ − K"), anchor::EIGEN_MARGIN, e.operator_margin()));
        match m.kind {
            ModelKind::Euclidean if m.dim == 3 => {
                // eigenfunction sin(πr/R)/r
                let exact = (PI / m.radius).powi(2);
                out.push(Entry::at_most(format!("{name}: |λ₁ − π²/R²|"), anchor::EIGEN, (lam - exact).abs() * m.radius.powi(2), tolerances::EIGEN_EUCLIDEAN));
            }
            ModelKind::Euclidean => out.push(Entry::diagnostic(format!("{name}: λ₁"), anchor::EIGEN, lam)),
            ModelKind::Hyperbolic => {
                out.push(Entry::above(format!("{name}: λ₁ above (n−1)²κ²/4"), anchor::EIGEN, lam, (n - 1.0).powi(2) * k * k / 4.0));
            }
            ModelKind::Spherical => {
                let hemi = 0.5 * PI / k;
                let target = n * k * k;
                if (m.radius - hemi).abs() < 1e-12 * hemi {
                    out.push(Entry::at_most(format!("{name}: |λ₁ − n κ²| at the hemisphere"), anchor::EIGEN, (lam - target).abs(), tolerances::EIGEN_HEMISPHERE));
                } else if m.radius < hemi {
                    out.push(Entry::above(format!("{name}: λ₁ above n κ²"), anchor::EIGEN, e.lower, target));
                } else {
                    out.push(Entry::below(format!("{name}: λ₁ below n κ²"), anchor::EIGEN, e.upper, target));
                }
            }
        }
    }
    Ok(out)
}
