use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vcdt_sparse::mtx::{parse_matrix_market, read_matrix_market, write_matrix_market};
use vcdt_sparse::*;

fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let vals: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let m = DenseMatrix::from_row_major(n, n, vals).unwrap();
    let mut a = m.tr_matmul(&m);
    for i in 0..n {
        a[(i, i)] += 1.0;
    }
    a
}

/// Inertia of `A - σB` via symmetric elimination without pivoting: the
/// number of negative pivots equals the number of eigenvalues below `σ`.
fn count_below(a: &DenseMatrix, b: &DenseMatrix, sigma: f64) -> usize {
    let n = a.n_rows();
    let mut m = DenseMatrix::from_fn(n, n, |i, j| a[(i, j)] - sigma * b[(i, j)]);
    let mut neg = 0;
    for k in 0..n {
        let mut p = m[(k, k)];
        if p == 0.0 {
            p = -1e-300;
        }
        if p < 0.0 {
            neg += 1;
        }
        for i in k + 1..n {
            let f = m[(i, k)] / p;
            for j in k + 1..n {
                m[(i, j)] -= f * m[(k, j)];
            }
        }
    }
    neg
}

fn bisection_eigs(a: &DenseMatrix, b: &DenseMatrix, lo: f64, hi: f64) -> Vec<f64> {
    (0..a.n_rows())
        .map(|k| {
            let (mut l, mut h) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (l + h);
                if count_below(a, b, mid) > k {
                    h = mid;
                } else {
                    l = mid;
                }
            }
            0.5 * (l + h)
        })
        .collect()
}

#[test]
fn generalized_eig_matches_bisection_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let a = random_spd(5, &mut rng);
        let b = random_spd(5, &mut rng);
        let e = generalized_sym_eig(&a, &b).unwrap();
        let oracle = bisection_eigs(&a, &b, 0.0, 1e3);
        for (x, y) in e.values.iter().zip(&oracle) {
            assert!((x - y).abs() <= 1e-10 * y.abs().max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn generalized_eig_scaling_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_spd(6, &mut rng);
    let mut b = DenseMatrix::identity(6);
    b.scale(2.0);
    let g = generalized_sym_eig(&a, &b).unwrap();
    let s = sym_eig(&a).unwrap();
    for (x, y) in g.values.iter().zip(&s.values) {
        assert!((x - y / 2.0).abs() < 1e-12 * y);
    }
}

#[test]
fn generalized_eig_rejects_indefinite_b() {
    let a = DenseMatrix::identity(2);
    let b = DenseMatrix::from_row_major(2, 2, vec![1.0, 0.0, 0.0, -1.0]).unwrap();
    assert!(matches!(generalized_sym_eig(&a, &b), Err(Error::NotSpd { pivot: 1, .. })));
}

#[test]
fn cholesky_residual_random_spd() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = random_spd(50, &mut rng);
    let b: Vec<f64> = (0..50).map(|_| rng.random_range(-1.0..1.0)).collect();
    for f in [
        Factorization::of_dense(&a).unwrap(),
        Factorization::of_sparse(&SparseMatrix::from_dense(&a)).unwrap(),
    ] {
        let x = f.solve(&b);
        let r: Vec<f64> = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm2(&r) <= 1e-10 * norm2(&b));
    }
}

#[test]
fn skyline_handles_grid_laplacian() {
    let m = 30;
    let id = |i: usize, j: usize| i * m + j;
    let mut t = Vec::new();
    for i in 0..m {
        for j in 0..m {
            t.push((id(i, j), id(i, j), 4.0));
            if i + 1 < m {
                t.push((id(i, j), id(i + 1, j), -1.0));
                t.push((id(i + 1, j), id(i, j), -1.0));
            }
            if j + 1 < m {
                t.push((id(i, j), id(i, j + 1), -1.0));
                t.push((id(i, j + 1), id(i, j), -1.0));
            }
        }
    }
    let a = SparseMatrix::from_triplets(m * m, m * m, &t).unwrap();
    let f = SkylineCholesky::factor(&a).unwrap();
    // Reordering keeps the envelope near n·bandwidth rather than n².
    assert!(f.envelope_size() < m * m * 2 * m);
    let x: Vec<f64> = (0..m * m).map(|k| (k as f64 * 0.37).sin()).collect();
    let mut y = a.mul_vec(&x);
    f.solve_in_place(&mut y);
    let err = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    assert!(err < 1e-12);
}

#[test]
fn matrix_market_symmetric_round_trip() {
    let a = SparseMatrix::from_triplets(
        3,
        3,
        &[(0, 0, 4.0), (1, 0, -1.0 / 3.0), (0, 1, -1.0 / 3.0), (1, 1, 4.0), (2, 2, 1e-300)],
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.mtx");
    write_matrix_market(&p, &a, true).unwrap();
    let b = read_matrix_market(&p).unwrap();
    assert_eq!(a, b);
}

#[test]
fn matrix_market_general_and_errors() {
    let ok = "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 2 3.5\n2 1 -1\n";
    let a = parse_matrix_market(ok.as_bytes()).unwrap();
    assert_eq!(a.get(0, 1), 3.5);
    assert_eq!(a.get(1, 0), -1.0);

    let bad = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 3.5\n2 x -1\n";
    match parse_matrix_market(bad.as_bytes()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("expected parse error, got {other:?}"),
    }
    let oob = "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n";
    assert!(matches!(parse_matrix_market(oob.as_bytes()), Err(Error::Parse { line: 3, .. })));
    assert!(parse_matrix_market("hello\n".as_bytes()).is_err());
}

#[test]
fn vector_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("b.mtx");
    let v = vec![1.0 / 3.0, -2.5e-7, 6.25e-4];
    mtx::write_vector(&p, &v).unwrap();
    assert_eq!(mtx::read_vector(&p).unwrap(), v);
}

#[test]
fn pod_of_orthonormal_columns_keeps_span() {
    let c = DenseMatrix::from_columns(
        4,
        &[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]],
    );
    let p = truncated_pod(&c, 1e-5).unwrap();
    assert_eq!(p.n_cols(), 3);
    // Projection of each input onto span(p) is the input itself.
    for j in 0..3 {
        let x = c.column(j);
        let coef = p.transpose().mul_vec(&x);
        let back = p.mul_vec(&coef);
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
