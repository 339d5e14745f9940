//! Variational formulas for scalar curvature, volume and mean curvature.

pub mod boundary;
pub mod oracle;
pub mod scalar;
pub mod volume;

pub use boundary::{
    boundary_identities, mean_curvature_prime, path_first_variation, tangential_boundary_sup, BoundaryIdentities,
    PathFirstVariation,
};
pub use scalar::{critical_residual, linearized_scalar, second_scalar, DirectionPoint, ResidualReport};
pub use volume::{
    first_variation, parallel_direction_value, quadrature_for, second_variation, volume, SecondVariationBreakdown,
};

#[cfg(test)]
mod tests;
