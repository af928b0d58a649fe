//! Structured Q1 discretizations of `-div(α ∇u) = f` on the unit square
//! with heterogeneous element-wise coefficients and homogeneous Dirichlet
//! data.

pub mod assembly;
pub mod coefficient;
pub mod mesh;

pub use assembly::{
    assemble, assemble_floating_local, assemble_neumann_local, assemble_with_rhs, load_vector,
    AssembledSystem, LocalPatch, Rhs, K_REF,
};
pub use coefficient::{
    make_coefficient, read_raster, ChannelLayout, CoefficientField, CoefficientKind, CombLayout,
    Contrast, ShortChannel,
};
pub use mesh::StructuredMesh;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("raster is {rows}x{cols}, mesh has {n}x{n} elements")]
    RasterSize { rows: usize, cols: usize, n: usize },
    #[error("empty element patch")]
    EmptyPatch,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
