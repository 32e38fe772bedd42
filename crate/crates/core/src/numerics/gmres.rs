//! Restarted GMRES with right preconditioning.

use super::{DenseMatrix, SparseMatrix};
use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, norm2, Real};

/// Square linear operator `y = A x`.
pub trait LinearOperator<T>: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[T], y: &mut [T]);
}

impl<T: Real> LinearOperator<T> for SparseMatrix<T> {
    fn dim(&self) -> usize {
        self.n_rows()
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        self.mul_vec_into(x, y)
    }
}

impl<T: Real> LinearOperator<T> for DenseMatrix<T> {
    fn dim(&self) -> usize {
        self.n_rows()
    }
    fn apply(&self, x: &[T], y: &mut [T]) {
        y.copy_from_slice(&self.mul_vec(x));
    }
}

/// Approximate inverse `y ≈ A⁻¹ x`.
pub trait Preconditioner<T>: Sync {
    fn apply_inverse(&self, x: &[T], y: &mut [T]);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl<T: Real> Preconditioner<T> for IdentityPreconditioner {
    fn apply_inverse(&self, x: &[T], y: &mut [T]) {
        y.copy_from_slice(x);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative residual target `‖Ax − b‖ / ‖b‖`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restart: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 2000, restart: 100 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidArgument(format!("solver tolerance {} not in (0,1)", self.tolerance)));
        }
        if self.max_iterations == 0 || self.restart == 0 {
            return Err(Error::InvalidArgument("max iterations and restart length must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    /// Achieved relative residual, recomputed from the true residual.
    pub residual: f64,
    /// True relative residual at the end of every restart cycle.
    pub cycle_residuals: Vec<f64>,
}

/// Solves `A x = b` starting from `x0` (zero if `None`).
pub fn gmres_solve<T: Real>(
    a: &dyn LinearOperator<T>,
    b: &[T],
    precond: &dyn Preconditioner<T>,
    cfg: &SolverConfig,
    x0: Option<&[T]>,
) -> Result<GmresOutcome<T>> {
    cfg.validate()?;
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    let mut x = match x0 {
        Some(x0) if x0.len() != n => return Err(Error::DimensionMismatch { expected: n, found: x0.len() }),
        Some(x0) => x0.to_vec(),
        None => vec![T::zero(); n],
    };
    let bnorm = norm2(b);
    if bnorm == T::zero() {
        return Ok(GmresOutcome { x: vec![T::zero(); n], iterations: 0, residual: 0.0, cycle_residuals: vec![] });
    }
    let tol = T::of(cfg.tolerance);
    let m = cfg.restart.min(n).max(1);

    let mut r = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut z = vec![T::zero(); n];
    let residual = |x: &[T], r: &mut [T]| {
        a.apply(x, r);
        for (ri, &bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        norm2(r)
    };

    let mut iterations = 0usize;
    let mut cycle_residuals = Vec::new();
    let mut rnorm = residual(&x, &mut r);
    let to_f64 = |v: T| v.to_f64().unwrap_or(f64::NAN);

    while rnorm / bnorm > tol && iterations < cfg.max_iterations {
        let mut basis: Vec<Vec<T>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|&v| v / rnorm).collect());
        let mut h = vec![vec![T::zero(); m]; m + 1];
        let (mut cs, mut sn) = (vec![T::zero(); m], vec![T::zero(); m]);
        let mut g = vec![T::zero(); m + 1];
        g[0] = rnorm;
        let mut k_used = 0;

        for j in 0..m {
            precond.apply_inverse(&basis[j], &mut z);
            a.apply(&z, &mut w);
            // modified Gram-Schmidt
            for (i, vi) in basis.iter().enumerate() {
                let hij = dot(&w, vi);
                h[i][j] = hij;
                axpy(-hij, vi, &mut w);
            }
            let hnext = norm2(&w);
            h[j + 1][j] = hnext;
            for i in 0..j {
                let tmp = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = tmp;
            }
            let denom = (h[j][j] * h[j][j] + h[j + 1][j] * h[j + 1][j]).sqrt();
            if denom == T::zero() {
                cs[j] = T::one();
                sn[j] = T::zero();
            } else {
                cs[j] = h[j][j] / denom;
                sn[j] = h[j + 1][j] / denom;
            }
            h[j][j] = cs[j] * h[j][j] + sn[j] * h[j + 1][j];
            h[j + 1][j] = T::zero();
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            iterations += 1;
            k_used = j + 1;
            let breakdown = hnext <= T::epsilon() * rnorm;
            if g[j + 1].abs() / bnorm <= tol || iterations >= cfg.max_iterations || breakdown {
                break;
            }
            basis.push(w.iter().map(|&v| v / hnext).collect());
        }

        // back substitution for the least-squares coefficients
        let mut y = vec![T::zero(); k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for l in i + 1..k_used {
                s -= h[i][l] * y[l];
            }
            y[i] = s / h[i][i];
        }
        let mut update = vec![T::zero(); n];
        for (i, &yi) in y.iter().enumerate() {
            axpy(yi, &basis[i], &mut update);
        }
        precond.apply_inverse(&update, &mut z);
        axpy(T::one(), &z, &mut x);
        let new_rnorm = residual(&x, &mut r);
        cycle_residuals.push(to_f64(new_rnorm / bnorm));
        if !(new_rnorm < rnorm) && !(new_rnorm / bnorm <= tol) {
            // no progress in a full cycle: stagnation
            rnorm = new_rnorm;
            break;
        }
        rnorm = new_rnorm;
    }

    let rel = to_f64(rnorm / bnorm);
    if !(rnorm / bnorm <= tol) {
        return Err(Error::SolverFailure { iterations, residual: rel });
    }
    Ok(GmresOutcome { x, iterations, residual: rel, cycle_residuals })
}
