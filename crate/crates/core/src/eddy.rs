//! Implicit step for the magnetic field and its boundary potential in `X_h`.

use log::warn;

use crate::bem::{Coupling, DtnMatrix};
use crate::coupled::{reduce_matrix, XhSpace, XhVector};
use crate::error::{Error, Result};
use crate::fem::{elementwise_curl, EdgeField, FemMatrices, NodalVectorField};
use crate::geometry::{scale, Vec3};
use crate::mesh::Mesh;
use crate::numerics::{block_diagonal_preconditioner, gmres_solve, BlockDiagonal, SolverConfig};
use crate::scalar::dot;
use crate::{DenseMatrix, SparseMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EddyParams {
    pub sigma: f64,
    pub mu0: f64,
    pub k: f64,
    pub solver: SolverConfig,
}

impl EddyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.mu0 > 0.0 && self.k > 0.0) {
            return Err(Error::InvalidArgument("sigma, mu0 and k must be positive".into()));
        }
        self.solver.validate()
    }
}

#[derive(Debug, Clone)]
pub struct EddySystem {
    /// Gram matrix of `⟨ξ,ψ⟩ − ⟨Sζ,η⟩` on `X_h`.
    pub a_red: SparseMatrix,
    /// `σ⁻¹μ₀⁻¹⟨∇×ξ, ∇×ψ⟩` on `X_h`.
    pub b_red: SparseMatrix,
    /// `a_red / k + b_red`.
    pub system: SparseMatrix,
    /// `Pᵀ X_mixᵀ`: nodal vector field (interleaved) → load on `X_h`.
    pub coupling: SparseMatrix,
    pub params: EddyParams,
    precond: BlockDiagonal<f64>,
}

pub fn assemble_eddy_system(space: &XhSpace, mats: &FemMatrices, dtn: &DtnMatrix, params: EddyParams) -> Result<EddySystem> {
    params.validate()?;
    let nb = space.num_boundary_nodes();
    if dtn.dim() != nb {
        return Err(Error::DimensionMismatch { expected: nb, found: dtn.dim() });
    }
    let neg_s = dtn.s.scaled(-1.0);
    if neg_s.symmetrized().cholesky().is_err() {
        match dtn.coupling {
            Coupling::Symmetric => {
                return Err(Error::Assembly("Dirichlet-to-Neumann matrix is not negative definite".into()));
            }
            // not elliptic on non-smooth boundaries; GMRES does not need definiteness
            Coupling::JohnsonNedelec => warn!("Johnson-Nedelec DtN matrix has an indefinite symmetric part"),
        }
    }
    let a_full = SparseMatrix::block_diag(&mats.m_nd, &SparseMatrix::from_dense(&neg_s));
    let b_full = SparseMatrix::block_diag(
        &mats.c_nd.scaled(1.0 / (params.sigma * params.mu0)),
        &SparseMatrix::zeros(nb, nb),
    );
    let a_red = reduce_matrix(&a_full, space)?;
    let b_red = reduce_matrix(&b_full, space)?;
    let system = a_red.linear_combination(1.0 / params.k, &b_red, 1.0)?;
    let coupling = space.prolongation().transpose().matmul(&mats.x_mix.transpose())?;

    let ranges: Vec<_> = [space.interior_range(), space.boundary_range()].into_iter().filter(|r| !r.is_empty()).collect();
    let precond = block_diagonal_preconditioner(&system, &ranges)?;
    Ok(EddySystem { a_red, b_red, system, coupling, params, precond })
}

impl EddySystem {
    pub fn dim(&self) -> usize {
        self.system.n_rows()
    }

    /// Right-hand side `a_red x_prev / k − Pᵀ X_mixᵀ v`.
    pub fn rhs(&self, prev: &XhVector, v: &NodalVectorField) -> Result<Vec<f64>> {
        if prev.coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: prev.coeffs.len() });
        }
        if 3 * v.len() != self.coupling.n_cols() {
            return Err(Error::DimensionMismatch { expected: self.coupling.n_cols() / 3, found: v.len() });
        }
        let mut r = self.a_red.mul_vec(&prev.coeffs);
        let load = self.coupling.mul_vec(&v.flat());
        for (ri, li) in r.iter_mut().zip(&load) {
            *ri = *ri / self.params.k - li;
        }
        Ok(r)
    }

    /// Right-hand side `−b_red x_prev − Pᵀ X_mixᵀ v` of the increment form.
    pub fn increment_rhs(&self, prev: &XhVector, v: &NodalVectorField) -> Result<Vec<f64>> {
        if prev.coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: prev.coeffs.len() });
        }
        if 3 * v.len() != self.coupling.n_cols() {
            return Err(Error::DimensionMismatch { expected: self.coupling.n_cols() / 3, found: v.len() });
        }
        let mut r = self.b_red.mul_vec(&prev.coeffs);
        let load = self.coupling.mul_vec(&v.flat());
        for (ri, li) in r.iter_mut().zip(&load) {
            *ri = -*ri - li;
        }
        Ok(r)
    }
}

#[derive(Debug, Clone)]
pub struct EddyOutcome {
    pub x: XhVector,
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `(a_red/k + b_red) x = a_red x_prev / k − load(v)`.
///
/// GMRES acts on the increment `x − x_prev`, whose right-hand side `−b_red x_prev − load(v)`
/// avoids the cancellation in `a_red x_prev / k` against the much larger curl term.
pub fn eddy_step(sys: &EddySystem, prev: &XhVector, v: &NodalVectorField) -> Result<EddyOutcome> {
    let rhs = sys.increment_rhs(prev, v)?;
    let out = gmres_solve(&sys.system, &rhs, &sys.precond, &sys.params.solver, None)?;
    let coeffs = prev.coeffs.iter().zip(&out.x).map(|(a, d)| a + d).collect();
    Ok(EddyOutcome { x: XhVector { coeffs }, iterations: out.iterations, residual: out.residual })
}

/// `(‖ξ‖² − ⟨Sζ, ζ⟩)^{1/2}`.
pub fn h_norm(x: &XhVector, sys: &EddySystem) -> f64 {
    sys.a_red.quadratic_form(&x.coeffs).max(0.0).sqrt()
}

/// Elementwise `σ⁻¹ ∇×H`.
pub fn recover_e_field(h: &EdgeField, sigma: f64, mesh: &Mesh) -> Result<Vec<Vec3>> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument("sigma must be positive".into()));
    }
    Ok(elementwise_curl(h, mesh).into_iter().map(|c| scale(1.0 / sigma, c)).collect())
}

/// Dense copy of the system for direct comparison.
pub fn dense_system(sys: &EddySystem) -> DenseMatrix {
    sys.system.to_dense()
}

/// `a_h(x, y)` evaluated through the reduced Gram matrix.
pub fn a_h(sys: &EddySystem, x: &XhVector, y: &XhVector) -> f64 {
    dot(&x.coeffs, &sys.a_red.mul_vec(&y.coeffs))
}
