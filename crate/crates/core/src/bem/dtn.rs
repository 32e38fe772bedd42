//! Discrete Dirichlet-to-Neumann operators from the layer operators.

use super::BemOperators;
use crate::error::{Error, Result};
use crate::numerics::Cholesky;
use crate::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    Symmetric,
    JohnsonNedelec,
}

#[derive(Debug, Clone)]
pub struct DtnMatrix {
    pub s: DenseMatrix,
    pub coupling: Coupling,
    v_factor: Cholesky<f64>,
}

impl DtnMatrix {
    /// Solves `V μ = f` with the stored factorization.
    pub fn solve_v(&self, f: &[f64]) -> Vec<f64> {
        self.v_factor.solve(f)
    }

    pub fn dim(&self) -> usize {
        self.s.n_rows()
    }
}

/// `K − ½ M0`, the trace part of the exterior Calderón identity.
fn double_layer_trace(ops: &BemOperators) -> Result<DenseMatrix> {
    ops.k.linear_combination(1.0, &ops.m0, -0.5)
}

fn factor_v(ops: &BemOperators) -> Result<Cholesky<f64>> {
    ops.v.cholesky().map_err(|_| Error::Assembly("single-layer matrix is not positive definite".into()))
}

/// Density `μ` with `V μ = (K − ½M0) λ`.
pub fn solve_density(ops: &BemOperators, lambda: &[f64]) -> Result<Vec<f64>> {
    if lambda.len() != ops.k.n_cols() {
        return Err(Error::DimensionMismatch { expected: ops.k.n_cols(), found: lambda.len() });
    }
    let rhs = double_layer_trace(ops)?.mul_vec(lambda);
    Ok(factor_v(ops)?.solve(&rhs))
}

/// `S = −Bᵀ V⁻¹ B − W` with `B = K − ½M0`.
pub fn build_dtn_symmetric(ops: &BemOperators) -> Result<DtnMatrix> {
    let chol = factor_v(ops)?;
    let b = double_layer_trace(ops)?;
    let vinv_b = chol.solve_matrix(&b);
    let s = b.transpose().matmul(&vinv_b)?.linear_combination(-1.0, &ops.w, -1.0)?.symmetrized();
    Ok(DtnMatrix { s, coupling: Coupling::Symmetric, v_factor: chol })
}

/// `S = M0ᵀ V⁻¹ (K − ½M0)`; not symmetric in general.
pub fn build_dtn_johnson_nedelec(ops: &BemOperators) -> Result<DtnMatrix> {
    let chol = factor_v(ops)?;
    let b = double_layer_trace(ops)?;
    let s = ops.m0.transpose().matmul(&chol.solve_matrix(&b))?;
    Ok(DtnMatrix { s, coupling: Coupling::JohnsonNedelec, v_factor: chol })
}
