//! Linear algebra kernels for algebraic domain decomposition.
//!
//! CSR storage with index-set extraction, dense and envelope Cholesky,
//! generalized symmetric eigenproblems, POD and Matrix Market I/O.

pub mod cholesky;
pub mod csr;
pub mod dense;
pub mod eig;
mod error;
pub mod mtx;
pub mod pod;

pub use cholesky::{cholesky_factor, DenseCholesky, Factorization, SkylineCholesky};
pub use csr::{IndexSet, SparseMatrix};
pub use dense::{dot, norm2, DenseMatrix};
pub use eig::{generalized_sym_eig, sym_eig, tridiagonal_extremes, EigenPairs};
pub use error::{Error, Result};
pub use pod::{orthonormalize, truncated_pod, weighted_pod, WeightedPod};
