use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] vcdt_sparse::Error),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown edge id {0}")]
    UnknownEdge(usize),
    #[error("local solver of subdomain {subdomain} failed: {source}")]
    LocalSolver {
        subdomain: usize,
        source: vcdt_sparse::Error,
    },
    #[error("coarse matrix is not SPD ({0}); tol_o may be too small")]
    CoarseNotSpd(vcdt_sparse::Error),
    #[error("Neumann patch: {0}")]
    Patch(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{n} dofs exceed the dense oracle limit of {max}")]
    SizeGuard { n: usize, max: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
