//! Proper orthogonal decomposition of candidate column sets.

use nalgebra::SVD;

use crate::dense::{dot, DenseMatrix};
use crate::eig::sym_eig;
use crate::error::{Error, Result};

/// Left singular vectors with `σᵢ > tol_o · σ₁`, by descending `σ`.
///
/// The result is Euclidean-orthonormal; an all-zero input gives no columns.
pub fn truncated_pod(columns: &DenseMatrix, tol_o: f64) -> Result<DenseMatrix> {
    if !(tol_o > 0.0) {
        return Err(Error::Dimension(format!("POD tolerance must be positive, got {tol_o}")));
    }
    let (m, k) = (columns.n_rows(), columns.n_cols());
    if m == 0 || k == 0 || columns.max_abs() == 0.0 {
        return Ok(DenseMatrix::zeros(m, 0));
    }
    let svd = SVD::new(columns.to_nalgebra(), true, false);
    let u = svd.u.expect("left singular vectors requested");
    let s = &svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let s1 = s[order[0]];
    let keep: Vec<usize> = order.into_iter().filter(|&i| s[i] > tol_o * s1).collect();
    Ok(DenseMatrix::from_fn(m, keep.len(), |i, j| u[(i, keep[j])]))
}

/// Result of a POD in a weighted inner product.
#[derive(Debug, Clone)]
pub struct WeightedPod {
    /// `W`-orthonormal retained basis, by descending energy.
    pub basis: DenseMatrix,
    /// Retained eigenvalues of the normalized snapshot Gram matrix.
    pub energies: Vec<f64>,
}

/// POD in the inner product `⟨x, y⟩ = xᵀ W y`.
///
/// Each column is first scaled to unit `W`-norm so that candidates enter on
/// an equal footing. Directions whose Gram eigenvalue is not above
/// `tol_o · λ_max` are discarded.
pub fn weighted_pod(columns: &DenseMatrix, w: &DenseMatrix, tol_o: f64) -> Result<WeightedPod> {
    if !(tol_o > 0.0) {
        return Err(Error::Dimension(format!("POD tolerance must be positive, got {tol_o}")));
    }
    let m = columns.n_rows();
    if w.n_rows() != m || w.n_cols() != m {
        return Err(Error::Dimension("POD weight does not match column length".into()));
    }
    let mut kept = Vec::new();
    for j in 0..columns.n_cols() {
        let c = columns.column(j);
        let nrm2 = dot(&c, &w.mul_vec(&c));
        if nrm2 > 0.0 && nrm2.is_finite() {
            let s = nrm2.sqrt();
            kept.push(c.iter().map(|v| v / s).collect::<Vec<_>>());
        }
    }
    if kept.is_empty() {
        return Ok(WeightedPod {
            basis: DenseMatrix::zeros(m, 0),
            energies: vec![],
        });
    }
    let c = DenseMatrix::from_columns(m, &kept);
    let wc = w.matmul(&c);
    let gram = c.tr_matmul(&wc);
    let eig = sym_eig(&gram)?;
    let lmax = *eig.values.last().unwrap();
    let mut basis_cols = Vec::new();
    let mut energies = Vec::new();
    for i in (0..eig.len()).rev() {
        let l = eig.values[i];
        if l > tol_o * lmax {
            let v = eig.vector(i);
            let mut col = c.mul_vec(&v);
            let s = l.sqrt();
            col.iter_mut().for_each(|x| *x /= s);
            basis_cols.push(col);
            energies.push(l);
        }
    }
    Ok(WeightedPod {
        basis: DenseMatrix::from_columns(m, &basis_cols),
        energies,
    })
}

/// Euclidean-orthonormal basis of the column span (thin QR).
pub fn orthonormalize(columns: &DenseMatrix) -> DenseMatrix {
    let (m, k) = (columns.n_rows(), columns.n_cols());
    if k == 0 {
        return DenseMatrix::zeros(m, 0);
    }
    let qr = columns.to_nalgebra().qr();
    let q = qr.q();
    DenseMatrix::from_fn(m, k.min(m), |i, j| q[(i, j)])
}
