//! Experiment driver: declarative configs, variant sweeps over seeds, and
//! CSV or markdown tables of coarse dimensions, condition estimates and
//! iteration counts.

pub mod config;
pub mod emit;
pub mod problem;
pub mod run;
pub mod spectra;

pub use config::{parse_seeds, ExperimentConfig, Overrides, ProblemKind, RhsKind, Row, RowSpec};
pub use emit::{emit, format_kappa, Format};
pub use problem::{build_instance, FeNeumann, Instance};
pub use run::{run, run_one, solver_config, RowResult, Stat};
pub use spectra::spectra_csv;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] vcdt_core::Error),
    #[error(transparent)]
    Fe(#[from] vcdt_fe::Error),
    #[error(transparent)]
    Linalg(#[from] vcdt_sparse::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;

/// Writes the assembled matrix, partition and right-hand side of the first
/// seed.
pub fn export_matrix(
    cfg: &ExperimentConfig,
    matrix: &std::path::Path,
    partition: &std::path::Path,
    rhs: Option<&std::path::Path>,
) -> Result<()> {
    cfg.validate()?;
    let inst = build_instance(cfg, cfg.seeds[0])?;
    vcdt_sparse::mtx::write_matrix_market(matrix, &inst.problem.a, true)?;
    vcdt_core::write_partition(partition, &inst.problem.partition)?;
    if let Some(p) = rhs {
        vcdt_sparse::mtx::write_vector(p, &inst.problem.rhs)?;
    }
    Ok(())
}
