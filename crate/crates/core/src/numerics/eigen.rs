//! Smallest eigenvalue of a dense symmetric matrix.
//!
//! A Sylvester-inertia bisection brackets `λ_min`; shifted inverse iteration with a
//! Rayleigh quotient then refines it.

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{dot, norm2, Real};

/// Number of eigenvalues of `a` strictly below `shift` (LDLᵀ inertia of `a − shift·I`).
fn count_below<T: Real>(a: &DenseMatrix<T>, shift: T) -> usize {
    let n = a.n_rows();
    let tiny = T::epsilon() * a.max_abs().max(T::one());
    // column-oriented LDLᵀ without pivoting; a zero pivot is nudged to `tiny`
    let mut l = DenseMatrix::<T>::zeros(n, n);
    let mut d = vec![T::zero(); n];
    let mut negatives = 0;
    for j in 0..n {
        let mut dj = a[(j, j)] - shift;
        for k in 0..j {
            dj -= l[(j, k)] * l[(j, k)] * d[k];
        }
        if dj.abs() < tiny {
            dj = tiny;
        }
        d[j] = dj;
        if dj < T::zero() {
            negatives += 1;
        }
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)] * d[k];
            }
            l[(i, j)] = s / dj;
        }
    }
    negatives
}

pub fn smallest_eigenvalue_symmetric<T: Real>(a: &DenseMatrix<T>) -> Result<T> {
    let n = a.n_rows();
    if n == 0 || a.n_cols() != n {
        return Err(Error::InvalidArgument("matrix must be square and non-empty".into()));
    }
    if !a.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    if !a.is_symmetric(T::of(1e-10)) {
        return Err(Error::InvalidArgument("matrix is not symmetric".into()));
    }
    if n == 1 {
        return Ok(a[(0, 0)]);
    }

    // Gershgorin interval
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for i in 0..n {
        let r: T = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        lo = lo.min(a[(i, i)] - r);
        hi = hi.max(a[(i, i)] + r);
    }
    let scale = a.max_abs().max(T::min_positive_value());
    lo -= T::of(1e-3) * scale;
    hi += T::of(1e-3) * scale;
    for _ in 0..200 {
        if hi - lo <= T::of(1e-6) * scale {
            break;
        }
        let mid = T::of(0.5) * (lo + hi);
        if count_below(a, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // inverse iteration with the shift just below the bracket
    let shift = lo - T::of(1e-6) * scale;
    let shifted = DenseMatrix::from_fn(n, n, |i, j| if i == j { a[(i, j)] - shift } else { a[(i, j)] });
    let chol = shifted.cholesky()?;
    let mut x: Vec<T> = (0..n).map(|i| T::one() + T::of(0.01 * ((i * 7919) % 13) as f64)).collect();
    let xn = norm2(&x);
    x.iter_mut().for_each(|v| *v /= xn);
    let mut rq = a.quadratic_form(&x);
    for _ in 0..500 {
        let mut y = chol.solve(&x);
        let yn = norm2(&y);
        y.iter_mut().for_each(|v| *v /= yn);
        let new_rq = dot(&y, &a.mul_vec(&y));
        x = y;
        let converged = (new_rq - rq).abs() <= T::of(1e-15) * scale;
        rq = new_rq;
        if converged {
            break;
        }
    }
    Ok(rq)
}
