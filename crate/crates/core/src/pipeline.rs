//! End-to-end solves from an assembled matrix and a partition.

use std::path::Path;
use std::time::Instant;

use vcdt_sparse::mtx::{read_matrix_market, read_vector};
use vcdt_sparse::SparseMatrix;

use crate::coarse::{self, AlgebraicVariant, CoarseSpace, EvpConfig, NeumannSource, Variant};
use crate::decomposition::{classify_interface, grow_overlap, read_partition, Interface, Partition};
use crate::error::{Error, Result};
use crate::schwarz::{pcg, PcgOptions, SchwarzPreconditioner, SolveReport, Timings};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub overlap: usize,
    pub evp: EvpConfig,
    pub pcg: PcgOptions,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            overlap: 1,
            evp: EvpConfig::default(),
            pcg: PcgOptions::default(),
        }
    }
}

/// A validated algebraic problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub a: SparseMatrix,
    pub rhs: Vec<f64>,
    pub partition: Partition,
}

impl Problem {
    pub fn new(a: SparseMatrix, rhs: Vec<f64>, partition: Partition) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(Error::InvalidParameter(format!("matrix is {}x{}", n, a.n_cols())));
        }
        if !a.is_symmetric(1e-12) {
            return Err(Error::InvalidParameter("matrix is not symmetric".into()));
        }
        if partition.n_dofs() != n {
            return Err(Error::InvalidParameter(format!(
                "partition covers {} dofs, matrix has {n}",
                partition.n_dofs()
            )));
        }
        if rhs.len() != n {
            return Err(Error::InvalidParameter(format!(
                "right-hand side has length {}, matrix has {n} rows",
                rhs.len()
            )));
        }
        Ok(Self { a, rhs, partition })
    }
}

/// Reads a Matrix Market matrix and a partition file. Without a
/// right-hand side file the load is the vector of ones.
pub fn ingest(matrix: impl AsRef<Path>, partition: impl AsRef<Path>, rhs: Option<&Path>) -> Result<Problem> {
    let a = read_matrix_market(matrix)?;
    let part = read_partition(partition)?;
    let b = match rhs {
        Some(p) => read_vector(p)?,
        None => vec![1.0; a.n_rows()],
    };
    Problem::new(a, b, part)
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub report: SolveReport,
    pub x: Vec<f64>,
    pub coarse: Option<CoarseSpace>,
}

/// Solves with a coarse space computed from the matrix alone.
pub fn solve_algebraic(problem: &Problem, variant: AlgebraicVariant, cfg: &SolverConfig) -> Result<SolveOutcome> {
    solve(problem, variant.into(), cfg, None)
}

/// Solves with any variant; `neumann` supplies local Neumann matrices for
/// the variants that need them.
pub fn solve(
    problem: &Problem,
    variant: Variant,
    cfg: &SolverConfig,
    neumann: Option<&dyn NeumannSource>,
) -> Result<SolveOutcome> {
    let a = &problem.a;
    let interface = classify_interface(a, &problem.partition)?;
    let t0 = Instant::now();
    let coarse = build_coarse(a, &interface, variant, cfg, neumann)?;
    let setup_coarse = t0.elapsed();

    let t1 = Instant::now();
    let overlap = grow_overlap(a, &interface, cfg.overlap);
    let m = SchwarzPreconditioner::new(a, &overlap, coarse.as_ref())?;
    let setup_local = t1.elapsed();

    let t2 = Instant::now();
    let res = pcg(a, &problem.rhs, &m, cfg.pcg);
    let solve = t2.elapsed();
    if !res.converged {
        log::warn!("{variant}: no convergence after {} iterations", res.iterations);
    }
    let report = SolveReport {
        iterations: res.iterations,
        kappa_estimate: res.kappa_estimate(),
        residual_history: res.residual_history.clone(),
        converged: res.converged,
        coarse_dim_pre_pod: coarse.as_ref().map_or(0, |c| c.dim_pre_pod),
        coarse_dim_post_pod: coarse.as_ref().map_or(0, |c| c.dim_post_pod),
        timings: Timings {
            setup_coarse,
            setup_local,
            solve,
        },
    };
    Ok(SolveOutcome {
        report,
        x: res.x,
        coarse,
    })
}

fn build_coarse(
    a: &SparseMatrix,
    interface: &Interface,
    variant: Variant,
    cfg: &SolverConfig,
    neumann: Option<&dyn NeumannSource>,
) -> Result<Option<CoarseSpace>> {
    if interface.n_subdomains() == 1 {
        log::info!("single subdomain, one-level solve");
        return Ok(None);
    }
    coarse::build(a, interface, variant, &cfg.evp, neumann).map(Some)
}
