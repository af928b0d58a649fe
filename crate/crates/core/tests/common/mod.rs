#![allow(dead_code)]

use vcdt_sparse::SparseMatrix;

const K: [[f64; 4]; 4] = [
    [4.0, -1.0, -2.0, -1.0],
    [-1.0, 4.0, -1.0, -2.0],
    [-2.0, -1.0, 4.0, -1.0],
    [-1.0, -2.0, -1.0, 4.0],
];

/// Q1 stiffness on an `n × n` grid of the unit square, Dirichlet nodes
/// removed, dof `(i-1) + (j-1)(n-1)`.
pub fn q1(n: usize, alpha: impl Fn(usize, usize) -> f64) -> SparseMatrix {
    let m = n - 1;
    let dof = |i: usize, j: usize| -> Option<usize> {
        (i >= 1 && j >= 1 && i < n && j < n).then(|| (i - 1) + (j - 1) * m)
    };
    let mut t = Vec::new();
    for ey in 0..n {
        for ex in 0..n {
            let a = alpha(ex, ey) / 6.0;
            let nodes = [(ex, ey), (ex + 1, ey), (ex + 1, ey + 1), (ex, ey + 1)];
            for r in 0..4 {
                for c in 0..4 {
                    if let (Some(p), Some(q)) = (dof(nodes[r].0, nodes[r].1), dof(nodes[c].0, nodes[c].1)) {
                        t.push((p, q, a * K[r][c]));
                    }
                }
            }
        }
    }
    SparseMatrix::from_triplets(m * m, m * m, &t).unwrap()
}

pub fn laplacian(n: usize) -> SparseMatrix {
    q1(n, |_, _| 1.0)
}

/// High-contrast horizontal stripes crossing every vertical subdomain cut.
pub fn stripes(n: usize, contrast: f64) -> SparseMatrix {
    q1(n, move |ex, ey| {
        if ex > 0 && ex + 1 < n && ey % 4 == 2 {
            contrast
        } else {
            1.0
        }
    })
}

/// Dof of free grid node `(i, j)`.
pub fn dof(n: usize, i: usize, j: usize) -> usize {
    (i - 1) + (j - 1) * (n - 1)
}
