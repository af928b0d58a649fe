//! Dense symmetric and generalized symmetric-definite eigensolvers.

use nalgebra::SymmetricEigen;

use crate::cholesky::DenseCholesky;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }
}

/// Full spectrum of a symmetric matrix, ascending.
pub fn sym_eig(a: &DenseMatrix) -> Result<EigenPairs> {
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::Dimension("eigenproblem on a non-square matrix".into()));
    }
    if n == 0 {
        return Ok(EigenPairs {
            values: vec![],
            vectors: DenseMatrix::zeros(0, 0),
        });
    }
    let mut s = a.clone();
    s.symmetrize();
    let eig = SymmetricEigen::new(s.to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenPairs { values, vectors })
}

/// Solves `A v = λ B v` for symmetric `A` and SPD `B` by Cholesky reduction.
///
/// Eigenvectors are `B`-orthonormal.
pub fn generalized_sym_eig(a: &DenseMatrix, b: &DenseMatrix) -> Result<EigenPairs> {
    let n = a.n_rows();
    if a.n_cols() != n || b.n_rows() != n || b.n_cols() != n {
        return Err(Error::Dimension(format!(
            "generalized eigenproblem with A {}x{} and B {}x{}",
            a.n_rows(),
            a.n_cols(),
            b.n_rows(),
            b.n_cols()
        )));
    }
    let l = DenseCholesky::factor(b)?;
    // C = L⁻¹ A L⁻ᵀ, built as L⁻¹ (L⁻¹ A)ᵀ.
    let mut x = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut c = a.column(j);
        l.solve_lower(&mut c);
        x.set_column(j, &c);
    }
    let xt = x.transpose();
    let mut c = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut col = xt.column(j);
        l.solve_lower(&mut col);
        c.set_column(j, &col);
    }
    let std = sym_eig(&c)?;
    let mut vectors = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut v = std.vectors.column(j);
        l.solve_upper(&mut v);
        vectors.set_column(j, &v);
    }
    Ok(EigenPairs {
        values: std.values,
        vectors,
    })
}

/// Smallest and largest eigenvalue of a symmetric tridiagonal matrix by
/// Sturm-sequence bisection.
pub fn tridiagonal_extremes(diag: &[f64], off: &[f64]) -> Option<(f64, f64)> {
    let n = diag.len();
    if n == 0 {
        return None;
    }
    assert_eq!(off.len() + 1, n);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let kth = |k: usize| bisect(diag, off, k, lo, hi);
    Some((kth(0), kth(n - 1)))
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let b2 = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
        q = diag[i] - x - if i > 0 { b2 / q } else { 0.0 };
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect(diag: &[f64], off: &[f64], k: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(lo.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}
