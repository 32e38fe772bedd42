//! Decoupled FEM/BEM tangent-plane integrator for the eddy-current
//! Landau–Lifshitz–Gilbert system.

pub mod bem;
pub mod convergence;
pub mod coupled;
pub mod eddy;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod io;
pub mod llg;
pub mod mesh;
pub mod numerics;
pub mod quadrature;
mod scalar;
pub mod selftest;
pub mod simulator;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SparseMatrix = numerics::SparseMatrix<f64>;
pub type DenseMatrix = numerics::DenseMatrix<f64>;
