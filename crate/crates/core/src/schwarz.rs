//! Two-level additive overlapping Schwarz preconditioner and PCG with
//! Lanczos condition number estimates.

use std::time::Duration;

use rayon::prelude::*;
use vcdt_sparse::{dot, generalized_sym_eig, tridiagonal_extremes, DenseMatrix, Factorization, IndexSet, SparseMatrix};

use crate::coarse::CoarseSpace;
use crate::decomposition::OverlappingSets;
use crate::error::{Error, Result};

pub trait Preconditioner: Sync {
    fn dim(&self) -> usize;
    /// `z = M⁻¹ r`.
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

pub struct Identity(pub usize);

impl Preconditioner for Identity {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

struct LocalSolver {
    dofs: IndexSet,
    factor: Factorization,
}

struct CoarseSolver {
    e0t: SparseMatrix,
    factor: Factorization,
}

/// `M⁻¹ = Σ Rᵢᵀ A_{Ω'ᵢ}⁻¹ Rᵢ + E₀ A₀⁻¹ E₀ᵀ` with exact local and coarse solves.
pub struct SchwarzPreconditioner {
    n: usize,
    locals: Vec<LocalSolver>,
    coarse: Option<CoarseSolver>,
}

impl SchwarzPreconditioner {
    pub fn new(a: &SparseMatrix, overlap: &OverlappingSets, coarse: Option<&CoarseSpace>) -> Result<Self> {
        let locals = overlap
            .sets
            .par_iter()
            .enumerate()
            .map(|(s, dofs)| {
                let factor = a
                    .extract(dofs, dofs)
                    .and_then(|m| Factorization::of_sparse(&m))
                    .map_err(|source| Error::LocalSolver { subdomain: s, source })?;
                Ok(LocalSolver {
                    dofs: dofs.clone(),
                    factor,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let coarse = match coarse {
            Some(c) if c.dim() > 0 => Some(CoarseSolver {
                e0t: c.e0t.clone(),
                factor: Factorization::of_dense(&c.a0).map_err(Error::CoarseNotSpd)?,
            }),
            _ => None,
        };
        Ok(Self {
            n: a.n_rows(),
            locals,
            coarse,
        })
    }

    pub fn coarse_dim(&self) -> usize {
        self.coarse.as_ref().map_or(0, |c| c.e0t.n_rows())
    }
}

impl Preconditioner for SchwarzPreconditioner {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let parts: Vec<Vec<f64>> = self
            .locals
            .par_iter()
            .map(|l| {
                let mut x: Vec<f64> = l.dofs.iter().map(|i| r[i]).collect();
                l.factor.solve_in_place(&mut x);
                x
            })
            .collect();
        z.iter_mut().for_each(|v| *v = 0.0);
        // Fixed summation order keeps the result independent of thread count.
        for (l, x) in self.locals.iter().zip(&parts) {
            for (k, i) in l.dofs.iter().enumerate() {
                z[i] += x[k];
            }
        }
        if let Some(c) = &self.coarse {
            let mut y = c.e0t.mul_vec(r);
            c.factor.solve_in_place(&mut y);
            for j in 0..y.len() {
                let (idx, vals) = c.e0t.row(j);
                for (&i, &v) in idx.iter().zip(vals) {
                    z[i] += v * y[j];
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcgOptions {
    /// Stop when `‖M⁻¹r_k‖ / ‖M⁻¹r_0‖` drops below this.
    pub rel_tol: f64,
    pub max_it: usize,
}

impl Default for PcgOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_it: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PcgResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Relative preconditioned residual norms, starting with 1.
    pub residual_history: Vec<f64>,
    /// Extreme Ritz values of the Lanczos matrix.
    pub ritz_extremes: Option<(f64, f64)>,
}

impl PcgResult {
    pub fn kappa_estimate(&self) -> Option<f64> {
        self.ritz_extremes.map(|(lo, hi)| hi / lo)
    }
}

/// Preconditioned conjugate gradients from `x₀ = 0`.
pub fn pcg(a: &SparseMatrix, b: &[f64], m: &dyn Preconditioner, opts: PcgOptions) -> PcgResult {
    let n = a.n_rows();
    assert_eq!(b.len(), n);
    assert_eq!(m.dim(), n);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    m.apply(&r, &mut z);
    let z0 = dot(&z, &z).sqrt();
    let mut history = vec![1.0];
    if z0 == 0.0 {
        return PcgResult {
            x,
            iterations: 0,
            converged: true,
            residual_history: history,
            ritz_extremes: None,
        };
    }
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut converged = false;
    let mut it = 0;
    while it < opts.max_it {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            log::warn!("pcg: non-positive curvature {pap} at iteration {it}");
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        m.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        alphas.push(alpha);
        betas.push(beta);
        it += 1;
        let rel = dot(&z, &z).sqrt() / z0;
        history.push(rel);
        if rel < opts.rel_tol {
            converged = true;
            break;
        }
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    PcgResult {
        x,
        iterations: it,
        converged,
        residual_history: history,
        ritz_extremes: lanczos_extremes(&alphas, &betas),
    }
}

/// Extreme eigenvalues of the Lanczos matrix built from the CG coefficients.
pub fn lanczos_extremes(alphas: &[f64], betas: &[f64]) -> Option<(f64, f64)> {
    let k = alphas.len();
    if k == 0 {
        return None;
    }
    let diag: Vec<f64> = (0..k)
        .map(|i| {
            let mut d = 1.0 / alphas[i];
            if i > 0 {
                d += betas[i - 1] / alphas[i - 1];
            }
            d
        })
        .collect();
    let off: Vec<f64> = (0..k - 1).map(|i| betas[i].sqrt() / alphas[i]).collect();
    tridiagonal_extremes(&diag, &off)
}

/// Largest system for which [`dense_condition_oracle`] runs.
pub const DENSE_ORACLE_LIMIT: usize = 2500;

/// Condition number of `M⁻¹A` from the dense pencil `(A, M)`, for testing.
pub fn dense_condition_oracle(a: &SparseMatrix, m: &dyn Preconditioner) -> Result<f64> {
    let n = a.n_rows();
    if n > DENSE_ORACLE_LIMIT {
        return Err(Error::SizeGuard {
            n,
            max: DENSE_ORACLE_LIMIT,
        });
    }
    let minv = preconditioner_matrix(m);
    // A M⁻¹ A v = μ A v has the spectrum of M⁻¹A and is symmetric-definite.
    let ad = a.to_dense();
    let mut lhs = ad.matmul(&minv.matmul(&ad));
    lhs.symmetrize();
    let eig = generalized_sym_eig(&lhs, &ad)?;
    let lo = eig.values[0];
    let hi = *eig.values.last().unwrap();
    Ok(hi / lo)
}

/// Dense matrix of a preconditioner, column by column.
pub fn preconditioner_matrix(m: &dyn Preconditioner) -> DenseMatrix {
    let n = m.dim();
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let mut z = vec![0.0; n];
            m.apply(&e, &mut z);
            z
        })
        .collect();
    DenseMatrix::from_columns(n, &cols)
}

/// Outcome of one preconditioned solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    pub kappa_estimate: Option<f64>,
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub coarse_dim_pre_pod: usize,
    pub coarse_dim_post_pod: usize,
    pub timings: Timings,
}

#[derive(Debug, Clone, Default)]
pub struct Timings {
    pub setup_coarse: Duration,
    pub setup_local: Duration,
    pub solve: Duration,
}

impl SolveReport {
    /// `key=value` pairs, one per line.
    pub fn to_key_values(&self) -> String {
        let kappa = self
            .kappa_estimate
            .map_or_else(|| "nan".to_string(), |k| format!("{k:e}"));
        let final_res = self.residual_history.last().copied().unwrap_or(f64::NAN);
        format!(
            "iterations={}\nkappa_estimate={}\nconverged={}\ncoarse_dim_pre_pod={}\ncoarse_dim_post_pod={}\nfinal_relative_residual={:e}\nsetup_coarse_s={:.6}\nsetup_local_s={:.6}\nsolve_s={:.6}\n",
            self.iterations,
            kappa,
            self.converged,
            self.coarse_dim_pre_pod,
            self.coarse_dim_post_pod,
            final_res,
            self.timings.setup_coarse.as_secs_f64(),
            self.timings.setup_local.as_secs_f64(),
            self.timings.solve.as_secs_f64(),
        )
    }
}
