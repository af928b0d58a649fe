//! Cholesky factorizations: dense for small blocks, envelope (skyline) with
//! reverse Cuthill-McKee ordering for sparse ones.

use std::collections::VecDeque;

use crate::csr::SparseMatrix;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Dense lower-triangular Cholesky factor `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct DenseCholesky {
    n: usize,
    l: Vec<f64>,
}

impl DenseCholesky {
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(Error::Dimension("Cholesky of a non-square matrix".into()));
        }
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotSpd { pivot: i, value: s });
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry `L[i, j]`.
    pub fn l(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    /// Solves `L y = b` in place.
    pub fn solve_lower(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn solve_upper(&self, b: &mut [f64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        self.solve_lower(b);
        self.solve_upper(b);
    }
}

/// Envelope Cholesky factor of a sparse SPD matrix.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    n: usize,
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    vals: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(Error::Dimension("Cholesky of a non-square matrix".into()));
        }
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        let mut first = vec![0usize; n];
        for i in 0..n {
            let (cols, _) = a.row(perm[i]);
            first[i] = cols.iter().map(|&c| inv[c]).filter(|&c| c <= i).min().unwrap_or(i).min(i);
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut vals = vec![0.0; start[n]];

        for i in 0..n {
            let fi = first[i];
            let (done, rest) = vals.split_at_mut(start[i]);
            let row = &mut rest[..i - fi + 1];
            let (cols, v) = a.row(perm[i]);
            for (&c, &x) in cols.iter().zip(v) {
                let c = inv[c];
                if c <= i {
                    row[c - fi] += x;
                }
            }
            for j in fi..i {
                let fj = first[j];
                let lj = &done[start[j]..start[j + 1]];
                let k0 = fi.max(fj);
                let mut s = row[j - fi];
                for k in k0..j {
                    s -= row[k - fi] * lj[k - fj];
                }
                row[j - fi] = s / lj[j - fj];
            }
            let mut d = row[i - fi];
            for k in fi..i {
                d -= row[k - fi] * row[k - fi];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotSpd {
                    pivot: perm[i],
                    value: d,
                });
            }
            row[i - fi] = d.sqrt();
        }
        Ok(Self {
            n,
            perm,
            first,
            start,
            vals,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored factor entries.
    pub fn envelope_size(&self) -> usize {
        self.vals.len()
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.vals[self.start[i]..self.start[i + 1]];
            let mut s = y[i];
            for k in fi..i {
                s -= row[k - fi] * y[k];
            }
            y[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.vals[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for k in fi..i {
                y[k] -= row[k - fi] * yi;
            }
        }
        for (i, &p) in self.perm.iter().enumerate() {
            b[p] = y[i];
        }
    }
}

/// Reverse Cuthill-McKee ordering; returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseMatrix) -> Vec<usize> {
    let n = a.n_rows();
    let adj = |i: usize| a.row(i).0.iter().copied().filter(move |&c| c != i);
    let degree: Vec<usize> = (0..n).map(|i| adj(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut level = vec![usize::MAX; n];

    // Breadth-first levels restricted to the unvisited component of `s`.
    let bfs = |s: usize, visited: &[bool], level: &mut Vec<usize>| -> (usize, Vec<usize>) {
        let mut touched = vec![s];
        level[s] = 0;
        let mut q = VecDeque::from([s]);
        let mut depth = 0;
        while let Some(u) = q.pop_front() {
            depth = depth.max(level[u]);
            for w in adj(u) {
                if !visited[w] && level[w] == usize::MAX {
                    level[w] = level[u] + 1;
                    touched.push(w);
                    q.push_back(w);
                }
            }
        }
        let last: Vec<usize> = touched.iter().copied().filter(|&u| level[u] == depth).collect();
        for &u in &touched {
            level[u] = usize::MAX;
        }
        (depth, last)
    };

    while order.len() < n {
        let mut start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| degree[i])
            .expect("unvisited node");
        let (mut ecc, mut last) = bfs(start, &visited, &mut level);
        for _ in 0..8 {
            let cand = *last.iter().min_by_key(|&&u| degree[u]).unwrap();
            let (e, l) = bfs(cand, &visited, &mut level);
            if e > ecc {
                start = cand;
                ecc = e;
                last = l;
            } else {
                break;
            }
        }

        visited[start] = true;
        let mut q = VecDeque::from([start]);
        let mut nb = Vec::new();
        while let Some(u) = q.pop_front() {
            order.push(u);
            nb.clear();
            nb.extend(adj(u).filter(|&w| !visited[w]));
            nb.sort_by_key(|&w| (degree[w], w));
            for &w in &nb {
                if !visited[w] {
                    visited[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    order.reverse();
    order
}

/// Factorization of an SPD matrix, reusable across solves.
#[derive(Debug, Clone)]
pub enum Factorization {
    Dense(DenseCholesky),
    Skyline(SkylineCholesky),
}

impl Factorization {
    pub fn of_sparse(a: &SparseMatrix) -> Result<Self> {
        SkylineCholesky::factor(a).map(Factorization::Skyline)
    }

    pub fn of_dense(a: &DenseMatrix) -> Result<Self> {
        DenseCholesky::factor(a).map(Factorization::Dense)
    }

    pub fn dim(&self) -> usize {
        match self {
            Factorization::Dense(f) => f.dim(),
            Factorization::Skyline(f) => f.dim(),
        }
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.dim(), "solve: right-hand side has wrong length");
        match self {
            Factorization::Dense(f) => f.solve_in_place(b),
            Factorization::Skyline(f) => f.solve_in_place(b),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solves for every column of `b`.
    pub fn solve_dense(&self, b: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(b.n_rows(), b.n_cols());
        for j in 0..b.n_cols() {
            let x = self.solve(&b.column(j));
            out.set_column(j, &x);
        }
        out
    }
}

/// Cholesky factor of a sparse SPD matrix.
pub fn cholesky_factor(a: &SparseMatrix) -> Result<Factorization> {
    Factorization::of_sparse(a)
}
