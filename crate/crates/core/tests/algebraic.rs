//! The whole pipeline runs from files holding a matrix and a partition,
//! with no mesh or coefficient information.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vcdt_core::*;
use vcdt_sparse::mtx::{write_matrix_market, write_vector};
use vcdt_sparse::SparseMatrix;

/// Five-point finite-volume matrix with random edge conductances on an
/// `m × m` grid of unknowns. Not a Q1 stencil.
fn five_point(m: usize, seed: u64) -> SparseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = |i: usize, j: usize| i + j * m;
    let mut t = Vec::new();
    let mut diag = vec![0.0; m * m];
    for j in 0..m {
        for i in 0..m {
            for (di, dj) in [(1usize, 0usize), (0, 1)] {
                let c = if rng.random::<f64>() < 0.2 { 1e4 } else { 1.0 };
                let (i2, j2) = (i + di, j + dj);
                if i2 < m && j2 < m {
                    t.push((id(i, j), id(i2, j2), -c));
                    t.push((id(i2, j2), id(i, j), -c));
                    diag[id(i2, j2)] += c;
                }
                diag[id(i, j)] += c;
            }
            if i == 0 {
                diag[id(i, j)] += 1.0;
            }
            if j == 0 {
                diag[id(i, j)] += 1.0;
            }
        }
    }
    for (k, d) in diag.into_iter().enumerate() {
        t.push((k, k, d));
    }
    SparseMatrix::from_triplets(m * m, m * m, &t).unwrap()
}

#[test]
fn pipeline_runs_from_matrix_and_partition_files() {
    let m = 24;
    let a = five_point(m, 17);
    let owner: Vec<usize> = (0..m * m).map(|k| (k % m) / 8 + 3 * ((k / m) / 8)).collect();
    let dir = tempfile::tempdir().unwrap();
    let (pa, pp, pb) = (dir.path().join("a.mtx"), dir.path().join("p.txt"), dir.path().join("b.mtx"));
    write_matrix_market(&pa, &a, true).unwrap();
    write_partition(&pp, &Partition::new(owner).unwrap()).unwrap();
    let b: Vec<f64> = (0..m * m).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect();
    write_vector(&pb, &b).unwrap();

    let problem = ingest(&pa, &pp, Some(&pb)).unwrap();
    let cfg = SolverConfig {
        evp: EvpConfig {
            omega_e: OmegaSpec::Layers(3),
            tol_tr: 1e3,
            ..EvpConfig::default()
        },
        ..SolverConfig::default()
    };
    let mut dims = Vec::new();
    for v in [
        AlgebraicVariant::Gdsw,
        AlgebraicVariant::Vcd,
        AlgebraicVariant::VctL2,
        AlgebraicVariant::VcdtL2,
    ] {
        let out = solve_algebraic(&problem, v, &cfg).unwrap();
        assert!(out.report.converged, "{v:?}");
        let r = problem.a.mul_vec(&out.x);
        let err = r.iter().zip(&b).map(|(u, w)| (u - w).powi(2)).sum::<f64>().sqrt();
        let nb = b.iter().map(|w| w * w).sum::<f64>().sqrt();
        assert!(err <= 1e-6 * nb, "{v:?}: residual {err}");
        dims.push(out.report.coarse_dim_post_pod);
    }
    assert!(dims.iter().all(|&d| d >= dims[0]));
}

#[test]
fn ingest_rejects_inconsistent_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = five_point(6, 1);
    let pa = dir.path().join("a.mtx");
    write_matrix_market(&pa, &a, true).unwrap();
    let pp = dir.path().join("p.txt");
    write_partition(&pp, &Partition::new(vec![0; 30]).unwrap()).unwrap();
    assert!(matches!(ingest(&pa, &pp, None), Err(Error::InvalidParameter(_))));

    let nonsym = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 0.5), (1, 1, 1.0)]).unwrap();
    write_matrix_market(&pa, &nonsym, false).unwrap();
    write_partition(&pp, &Partition::new(vec![0, 0]).unwrap()).unwrap();
    assert!(matches!(ingest(&pa, &pp, None), Err(Error::InvalidParameter(_))));
}

#[test]
fn core_does_not_depend_on_the_discretization() {
    let manifest = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/Cargo.toml")).unwrap();
    assert!(!manifest.contains("vcdt-fe"));
}

#[test]
fn coarse_basis_export() {
    let a = five_point(12, 2);
    let owner: Vec<usize> = (0..144).map(|k| (k % 12) / 6 + 2 * ((k / 12) / 6)).collect();
    let iface = classify_interface(&a, &Partition::new(owner).unwrap()).unwrap();
    let cfg = EvpConfig {
        omega_e: OmegaSpec::Layers(2),
        ..EvpConfig::default()
    };
    let cs = build_algebraic(&a, &iface, AlgebraicVariant::Vcd, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (pm, ps) = (dir.path().join("e0.mtx"), dir.path().join("e0.txt"));
    write_coarse_basis(&cs, &pm, &ps).unwrap();
    let e0 = vcdt_sparse::mtx::read_matrix_market(&pm).unwrap();
    assert_eq!((e0.n_rows(), e0.n_cols()), (144, cs.dim()));
    let side = std::fs::read_to_string(&ps).unwrap();
    assert_eq!(side.lines().filter(|l| !l.starts_with('#')).count(), cs.dim());
}
