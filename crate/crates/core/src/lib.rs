//! Numerical toolkit for the volume functional on constant-scalar-curvature
//! metrics with fixed boundary metric.
//!
//! The crate is organised bottom-up:
//!
//! * [`fields`]: charts, second-order jets, jet-valued fields, quadrature.
//! * [`riemann`]: curvature, covariant operators and boundary geometry.
//! * [`spaceform`]: geodesic balls in Euclidean, hyperbolic and spherical space.
//! * [`variation`]: first and second variations of scalar curvature and volume.
//! * [`ttensor`]: trace-free, divergence-free tensors with compact support.
//! * [`yamabe`]: conformal Dirichlet problems restoring constant scalar curvature.

pub mod error;
pub mod fields;
pub mod riemann;
pub mod spaceform;
pub mod tolerances;
pub mod ttensor;
pub mod variation;
pub mod yamabe;

pub use error::{Error, Result};
