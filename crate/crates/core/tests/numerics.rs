use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ellg::numerics::{
    block_diagonal_preconditioner, gmres_solve, smallest_eigenvalue_symmetric, DenseMatrix, EnvelopeCholesky,
    IdentityPreconditioner, SolverConfig, SparseMatrix, TripletBuilder,
};

fn random_sparse(n: usize, seed: u64, shift: f64) -> SparseMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = TripletBuilder::new(n, n);
    for i in 0..n {
        b.push(i, i, shift);
        for _ in 0..3 {
            let j = rng.gen_range(0..n);
            b.push(i, j, rng.gen_range(-1.0..1.0));
        }
    }
    b.build()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transpose_is_adjoint(seed in any::<u64>(), n in 2usize..30) {
        let a = random_sparse(n, seed, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lhs: f64 = a.mul_vec(&x).iter().zip(&y).map(|(p, q)| p * q).sum();
        let rhs: f64 = a.transpose().mul_vec(&y).iter().zip(&x).map(|(p, q)| p * q).sum();
        prop_assert!((lhs - rhs).abs() < 1e-12);
        let t2: Vec<f64> = a.transpose_mul_vec(&y);
        let t1 = a.transpose().mul_vec(&y);
        for (p, q) in t1.iter().zip(&t2) {
            prop_assert!((p - q).abs() < 1e-13);
        }
    }

    #[test]
    fn gmres_matches_lu(seed in any::<u64>(), n in 2usize..40) {
        let a = random_sparse(n, seed, 6.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cfg = SolverConfig { tolerance: 1e-13, ..Default::default() };
        let x = gmres_solve(&a, &b, &IdentityPreconditioner, &cfg, None).unwrap().x;
        let direct = a.to_dense().lu().unwrap().solve(&b);
        for (p, q) in x.iter().zip(&direct) {
            prop_assert!((p - q).abs() < 1e-10);
        }
        let ranges = [0..n / 2, n / 2..n];
        let pre = block_diagonal_preconditioner(&a, &ranges).unwrap();
        let y = gmres_solve(&a, &b, &pre, &cfg, None).unwrap().x;
        for (p, q) in y.iter().zip(&direct) {
            prop_assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_and_envelope_agree(seed in any::<u64>(), n in 2usize..25) {
        let r = random_sparse(n, seed, 0.0).to_dense();
        let spd = r.transpose().matmul(&r).unwrap().linear_combination(1.0, &DenseMatrix::identity(n), 1.0).unwrap();
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 1.0).collect();
        let x1 = spd.cholesky().unwrap().solve(&b);
        let env = EnvelopeCholesky::new(&SparseMatrix::from_dense(&spd)).unwrap();
        let mut x2 = b.clone();
        env.solve_in_place(&mut x2);
        for (p, q) in x1.iter().zip(&x2) {
            prop_assert!((p - q).abs() < 1e-10);
        }
        let lmin = smallest_eigenvalue_symmetric(&spd).unwrap();
        prop_assert!(lmin >= 1.0 - 1e-9);
    }
}
