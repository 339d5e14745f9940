//! Scenario configuration, validated before any computation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use critvol::fields::QuadratureOrder;
use critvol::spaceform::{Model, SpaceFormBall};
use critvol::yamabe::Discretization;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CriticalCheck,
    LinearizationCheck,
    SecondScalarCheck,
    TtBuild,
    SecondVariation,
    SaddleDemo,
    LargeBallDemo,
    YamabePath,
    VolumeChain,
    EigenCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CriticalCheck => "critical-check",
            Command::LinearizationCheck => "linearization-check",
            Command::SecondScalarCheck => "second-scalar-check",
            Command::TtBuild => "tt-build",
            Command::SecondVariation => "second-variation",
            Command::SaddleDemo => "saddle-demo",
            Command::LargeBallDemo => "large-ball-demo",
            Command::YamabePath => "yamabe-path",
            Command::VolumeChain => "volume-chain",
            Command::EigenCheck => "eigen-check",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Euclidean,
    Hyperbolic,
    Spherical,
}

impl From<ModelKind> for Model {
    fn from(m: ModelKind) -> Model {
        match m {
            ModelKind::Euclidean => Model::Euclidean,
            ModelKind::Hyperbolic => Model::Hyperbolic,
            ModelKind::Spherical => Model::Spherical,
        }
    }
}

/// A geodesic ball. `kappa` is the curvature scale (ignored for Euclidean).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub dim: usize,
    pub radius: f64,
    #[serde(default = "one")]
    pub kappa: f64,
}

fn one() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn ball(&self) -> critvol::error::Result<SpaceFormBall> {
        let kappa = if self.kind == ModelKind::Euclidean { 0.0 } else { self.kappa };
        SpaceFormBall::new(self.kind.into(), self.dim, self.radius, kappa)
    }
}

/// Which spherical harmonic a TT direction uses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HarmonicSpec {
    /// `y_i y_j`, `i ≠ j`
    Product { i: usize, j: usize },
    /// `y_i² − y_j²`
    Difference { i: usize, j: usize },
    /// Every entry of the default degree-2 catalogue.
    Catalogue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DirectionSpec {
    /// Trace-free divergence-free tensor supported between geodesic radii
    /// `inner < outer`.
    TtProfile { harmonic: HarmonicSpec, inner: f64, outer: f64 },
    /// `λ ĥ` with the critical potential `λ` and a constant trace-free matrix.
    ParallelTracefree { hhat: Vec<Vec<f64>> },
    /// `w g` with `w = amplitude (1 − |x|²/ρ²)`.
    Conformal { amplitude: f64 },
    /// A seeded random polynomial tensor of degree ≤ 2, optionally
    /// multiplied by `ρ² − |x|²` so that it vanishes on the boundary.
    CustomPolynomial { seed: u64, vanish_on_boundary: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub radial: usize,
    pub angular: usize,
}

impl QuadratureSpec {
    pub fn order(&self) -> QuadratureOrder {
        QuadratureOrder::new(self.radial, self.angular)
    }
}

/// Tolerance overrides; unset fields use the built-in acceptance values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub critical_residual: Option<f64>,
    pub linearization_rel: Option<f64>,
    pub second_scalar_rel: Option<f64>,
    pub tt_trace: Option<f64>,
    pub tt_divergence: Option<f64>,
    pub path_second_derivative_rel: Option<f64>,
    pub path_first_derivative: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub command: Command,
    /// Balls to run on; most commands loop over all of them.
    pub models: Vec<ModelSpec>,
    #[serde(default)]
    pub direction: Option<DirectionSpec>,
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
    /// Conformal-solve discretization for `yamabe-path` and `saddle-demo`.
    #[serde(default)]
    pub grid: Option<Discretization>,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    /// Random sample points per direction (checks that sample points).
    #[serde(default)]
    pub samples: Option<usize>,
    /// Random directions per model for the finite-difference checks.
    #[serde(default)]
    pub directions: Option<usize>,
    /// Curvature scales of the `saddle-demo` sweep.
    #[serde(default)]
    pub kappas: Option<Vec<f64>>,
    /// Path step for `yamabe-path`.
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// `t, V(t)` table written by `yamabe-path`.
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.models.is_empty() {
            return bad("`models` must list at least one ball".into());
        }
        // the shooting eigenvalue solver also handles the disc
        let lowest = if self.command == Command::EigenCheck { 2 } else { 3 };
        for m in &self.models {
            if !(lowest..=6).contains(&m.dim) {
                return bad(format!("dimension {} outside {lowest}..=6", m.dim));
            }
            if !(m.radius > 0.0 && m.radius.is_finite()) {
                return bad(format!("radius must be positive, got {}", m.radius));
            }
            if m.kind != ModelKind::Euclidean && !(m.kappa > 0.0 && m.kappa.is_finite()) {
                return bad(format!("kappa must be positive, got {}", m.kappa));
            }
            if m.kind == ModelKind::Spherical && m.kappa * m.radius >= std::f64::consts::PI {
                return bad("spherical balls need κR < π".into());
            }
        }
        if let Some(q) = self.quadrature {
            if q.radial == 0 || q.angular == 0 {
                return bad("quadrature orders must be positive".into());
            }
        }
        match &self.direction {
            Some(DirectionSpec::TtProfile { inner, outer, .. }) if !(*inner > 0.0 && outer > inner) => {
                return bad(format!("TT support needs 0 < inner < outer, got ({inner}, {outer})"));
            }
            Some(DirectionSpec::ParallelTracefree { hhat }) => {
                for m in &self.models {
                    if hhat.len() != m.dim || hhat.iter().any(|row| row.len() != m.dim) {
                        return bad(format!("hhat must be {0}×{0}", m.dim));
                    }
                }
                let n = hhat.len();
                let trace: f64 = (0..n).map(|i| hhat[i][i]).sum();
                let asym = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).any(|(i, j)| hhat[i][j] != hhat[j][i]);
                if trace.abs() > 1e-14 || asym {
                    return bad("hhat must be symmetric and trace-free".into());
                }
            }
            _ => {}
        }
        if let Some(k) = &self.kappas {
            if k.iter().any(|v| !(*v > 0.0)) || k.len() < 2 {
                return bad("`kappas` needs at least two positive values".into());
            }
        }
        if let Some(s) = self.step {
            if !(s > 0.0) {
                return bad("`step` must be positive".into());
            }
        }
        let needs_direction = matches!(self.command, Command::SecondVariation | Command::YamabePath);
        if needs_direction && self.direction.is_none() {
            return bad(format!("`{}` needs a `direction`", self.command.name()));
        }
        Ok(())
    }
}
