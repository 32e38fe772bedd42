//! Sparse and dense linear algebra shared by the assembly and time-stepping modules.

mod dense;
mod eigen;
mod gmres;
mod precond;
mod skyline;
mod sparse;

pub use dense::{Cholesky, DenseMatrix, Lu};
pub use eigen::smallest_eigenvalue_symmetric;
pub use gmres::{gmres_solve, GmresOutcome, IdentityPreconditioner, LinearOperator, Preconditioner, SolverConfig};
pub use precond::{block_diagonal_preconditioner, BlockDiagonal};
pub use skyline::EnvelopeCholesky;
pub use sparse::{SparseMatrix, TripletBuilder};
