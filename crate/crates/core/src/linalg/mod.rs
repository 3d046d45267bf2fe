//! Exact dense linear algebra over F_q.

mod berkowitz;
mod grassmannian;
mod matrix;
mod poly;
mod subspace;

pub use grassmannian::{gaussian_binomial, grassmannian_iter, pivot_patterns, projective_points, subspaces_with_pivots};
pub use matrix::{dot, is_zero_vec, pencil_det, vec_add, vec_axpy, vec_scale, vec_sub, Matrix, Vector};
pub use poly::Polynomial;
pub use subspace::Subspace;
