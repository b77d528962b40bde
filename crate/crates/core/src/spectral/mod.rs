//! Field arithmetic on the periodic torus: transforms, Fourier
//! multipliers, dealiasing, Leray projection and Lebesgue norms.

mod field;
mod grid;
pub mod ops;
pub mod random;

pub use field::{Field, Rep};
pub use grid::Grid;
pub use ops::{
    advect, cross, dealias, differentiate, gradient_norm_sq, inner_product, l2_norm_sq,
    leray_project, lp_norm, multiply, relative_divergence, riesz_perp, DiffOp,
};
