//! Block-diagonal preconditioning: each diagonal block is factorized once.

use std::ops::Range;

use super::gmres::Preconditioner;
use super::skyline::EnvelopeCholesky;
use super::{Lu, SparseMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Blocks up to this size are factorized densely with pivoting.
const DENSE_BLOCK_LIMIT: usize = 64;

#[derive(Debug, Clone)]
enum BlockFactor<T> {
    Envelope(EnvelopeCholesky<T>),
    Dense(Lu<T>),
}

#[derive(Debug, Clone)]
pub struct BlockDiagonal<T> {
    dim: usize,
    blocks: Vec<(Range<usize>, BlockFactor<T>)>,
}

impl<T: Real> BlockDiagonal<T> {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

/// Builds the block-Jacobi preconditioner of `a` for the given index ranges.
///
/// The ranges must partition `0..a.n_rows()` in order. Large symmetric blocks use an
/// envelope Cholesky factorization; small or nonsymmetric blocks use dense LU.
pub fn block_diagonal_preconditioner<T: Real>(
    a: &SparseMatrix<T>,
    block_ranges: &[Range<usize>],
) -> Result<BlockDiagonal<T>> {
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.n_cols() });
    }
    let mut next = 0;
    for r in block_ranges {
        if r.start != next || r.end <= r.start {
            return Err(Error::InvalidArgument(format!("block ranges do not partition 0..{n}")));
        }
        next = r.end;
    }
    if next != n {
        return Err(Error::InvalidArgument(format!("block ranges do not partition 0..{n}")));
    }

    let blocks = block_ranges
        .iter()
        .enumerate()
        .map(|(bi, r)| {
            let block = a.principal_block(r.clone());
            let factor = if block.n_rows() > DENSE_BLOCK_LIMIT && block.is_symmetric(T::of(1e-12)) {
                match EnvelopeCholesky::new(&block) {
                    Ok(f) => BlockFactor::Envelope(f),
                    Err(_) => return Err(Error::SingularBlock { block: bi }),
                }
            } else {
                let lu = block.to_dense().lu().map_err(|_| Error::SingularBlock { block: bi })?;
                BlockFactor::Dense(lu)
            };
            Ok((r.clone(), factor))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockDiagonal { dim: n, blocks })
}

impl<T: Real> Preconditioner<T> for BlockDiagonal<T> {
    fn apply_inverse(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(x.len(), self.dim);
        for (r, f) in &self.blocks {
            match f {
                BlockFactor::Envelope(c) => {
                    y[r.clone()].copy_from_slice(&x[r.clone()]);
                    c.solve_in_place(&mut y[r.clone()]);
                }
                BlockFactor::Dense(lu) => {
                    let sol = lu.solve(&x[r.clone()]);
                    y[r.clone()].copy_from_slice(&sol);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{gmres_solve, IdentityPreconditioner, SolverConfig, TripletBuilder};

    fn tridiag(n: usize) -> SparseMatrix<f64> {
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.push(i, i, 2.0 + i as f64);
            if i + 1 < n {
                b.push(i, i + 1, -1.0);
                b.push(i + 1, i, -1.0);
            }
        }
        b.build()
    }

    #[test]
    fn single_block_is_exact() {
        let a = tridiag(100);
        let p = block_diagonal_preconditioner(&a, &[0..100]).unwrap();
        let b: Vec<f64> = (0..100).map(|i| (i as f64 * 0.3).cos()).collect();
        let out = gmres_solve(&a, &b, &p, &SolverConfig::default(), None).unwrap();
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn unit_blocks_are_jacobi_scaling() {
        let a = tridiag(4);
        let ranges: Vec<_> = (0..4).map(|i| i..i + 1).collect();
        let p = block_diagonal_preconditioner(&a, &ranges).unwrap();
        let mut y = vec![0.0; 4];
        p.apply_inverse(&[1.0; 4], &mut y);
        for (i, yi) in y.iter().enumerate() {
            assert!((yi - 1.0 / (2.0 + i as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn singular_block_is_named() {
        let mut b = TripletBuilder::new(3, 3);
        b.push(0, 0, 1.0);
        b.push(2, 2, 1.0);
        let a = b.build();
        let err = block_diagonal_preconditioner(&a, &[0..1, 1..2, 2..3]).unwrap_err();
        assert!(matches!(err, Error::SingularBlock { block: 1 }));
    }

    #[test]
    fn bad_partition_rejected() {
        let a = tridiag(4);
        assert!(block_diagonal_preconditioner(&a, &[0..2, 3..4]).is_err());
    }

    #[test]
    fn preconditioned_and_plain_solutions_agree() {
        let a = tridiag(80);
        let b: Vec<f64> = (0..80).map(|i| 1.0 + i as f64).collect();
        let cfg = SolverConfig::default();
        let p = block_diagonal_preconditioner(&a, &[0..40, 40..80]).unwrap();
        let x1 = gmres_solve(&a, &b, &p, &cfg, None).unwrap().x;
        let x2 = gmres_solve(&a, &b, &IdentityPreconditioner, &cfg, None).unwrap().x;
        let scale = x2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (u, v) in x1.iter().zip(&x2) {
            assert!((u - v).abs() <= 10.0 * cfg.tolerance * scale * 80.0);
        }
    }
}
