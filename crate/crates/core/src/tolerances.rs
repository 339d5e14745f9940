//! Pinned tolerances shared by library checks, the CLI and the test suites.

pub const CRITICAL_RESIDUAL: f64 = 1e-8;
/// Residual admitted by the second-variation precondition.
pub const CRITICAL_PRECONDITION: f64 = 1e-6;
pub const TRACE_IDENTITY: f64 = 1e-9;
pub const HESSIAN_IDENTITY: f64 = 1e-9;
pub const UMBILIC_PRODUCT: f64 = 1e-9;
pub const RIC_BOUNDARY: f64 = 1e-6;
pub const VOLUME_CHAIN: f64 = 1e-10;

pub const LINEARIZATION_REL: f64 = 1e-6;
pub const SECOND_SCALAR_REL: f64 = 1e-5;

pub const TT_TRACE: f64 = 1e-10;
pub const TT_DIVERGENCE: f64 = 1e-8;
pub const TT_SECOND_DIVERGENCE: f64 = 1e-7;
pub const TT_TRANSPLANT: f64 = 1e-7;

pub const SADDLE_VALUE_REL: f64 = 1e-6;
pub const SADDLE_FORMULA_REL: f64 = 1e-8;
pub const REDUCED_FORM_REL: f64 = 1e-8;

pub const PATH_FIRST_DERIVATIVE: f64 = 1e-6;
pub const PATH_SECOND_DERIVATIVE_REL: f64 = 1e-3;
pub const NEWTON_RESIDUAL: f64 = 1e-10;

pub const EIGEN_EUCLIDEAN: f64 = 1e-8;
pub const EIGEN_HEMISPHERE: f64 = 1e-6;
pub const EIGEN_BRACKET_REL: f64 = 1e-6;

pub const KAPPA_MIN_ORDER: f64 = 1.8;
