//! Boundary element operators for the exterior Laplace problem.

mod dtn;
mod operators;

pub use dtn::{build_dtn_johnson_nedelec, build_dtn_symmetric, solve_density, Coupling, DtnMatrix};
pub use operators::{assemble_layer_operators, BemOperators};
