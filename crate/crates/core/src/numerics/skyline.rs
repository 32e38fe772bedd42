//! Envelope (profile) Cholesky factorization for sparse symmetric positive definite matrices.

use super::SparseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lower factor `L` stored row-wise from the first structurally nonzero column to the diagonal.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky<T> {
    first: Vec<usize>,
    offset: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> EnvelopeCholesky<T> {
    pub fn new(a: &SparseMatrix<T>) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.n_cols() });
        }
        let mut first = vec![0usize; n];
        for (i, f) in first.iter_mut().enumerate() {
            let (cols, _) = a.row(i);
            *f = cols.first().copied().unwrap_or(i).min(i);
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i] + 1);
        }
        let mut values = vec![T::zero(); offset[n]];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j <= i {
                    values[offset[i] + j - first[i]] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let ri = offset[i] - fi;
                let rj = offset[j] - fj;
                let mut s = values[ri + j];
                for k in k0..j {
                    s -= values[ri + k] * values[rj + k];
                }
                if j == i {
                    if !(s > T::zero()) {
                        return Err(Error::NotPositiveDefinite);
                    }
                    values[ri + i] = s.sqrt();
                } else {
                    values[ri + j] = s / values[rj + j];
                }
            }
        }
        Ok(Self { first, offset, values })
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    #[inline]
    fn l(&self, i: usize, j: usize) -> T {
        self.values[self.offset[i] + j - self.first[i]]
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1] - 1];
            let s = crate::scalar::dot(row, &b[fi..i]);
            b[i] = (b[i] - s) / self.l(i, i);
        }
        for i in (0..n).rev() {
            b[i] /= self.l(i, i);
            let fi = self.first[i];
            let bi = b[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1] - 1];
            for (k, &lik) in row.iter().enumerate() {
                b[fi + k] -= lik * bi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::TripletBuilder;

    #[test]
    fn matches_dense_cholesky_on_banded_matrix() {
        let n = 30;
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.push(i, i, 4.0);
            if i + 1 < n {
                b.push(i, i + 1, -1.0);
                b.push(i + 1, i, -1.0);
            }
            if i + 5 < n {
                b.push(i, i + 5, 0.5);
                b.push(i + 5, i, 0.5);
            }
        }
        let a = b.build();
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut rhs = a.mul_vec(&x);
        EnvelopeCholesky::new(&a).unwrap().solve_in_place(&mut rhs);
        for (s, e) in rhs.iter().zip(&x) {
            assert!((s - e).abs() < 1e-13);
        }
    }
}
