use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vcdt_sparse::{IndexSet, SparseMatrix};

use crate::coefficient::CoefficientField;
use crate::mesh::StructuredMesh;
use crate::{Error, Result};

/// Q1 stiffness of the reference square, node order (0,0),(1,0),(1,1),(0,1).
/// Independent of the element size in two dimensions.
pub const K_REF: [[f64; 4]; 4] = [
    [4.0 / 6.0, -1.0 / 6.0, -2.0 / 6.0, -1.0 / 6.0],
    [-1.0 / 6.0, 4.0 / 6.0, -1.0 / 6.0, -2.0 / 6.0],
    [-2.0 / 6.0, -1.0 / 6.0, 4.0 / 6.0, -1.0 / 6.0],
    [-1.0 / 6.0, -2.0 / 6.0, -1.0 / 6.0, 4.0 / 6.0],
];

/// Stiffness matrix over free dofs with its right-hand side.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub a: SparseMatrix,
    pub rhs: Vec<f64>,
    /// Mesh node of each free dof.
    pub free_node_map: IndexSet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rhs {
    /// Consistent load of a constant source `f`.
    ConstantLoad(f64),
    /// Entries uniform in `[-1, 1)`.
    Random { seed: u64 },
}

/// Assembles `A` with homogeneous Dirichlet data and the `f ≡ 1` load.
pub fn assemble(mesh: &StructuredMesh, alpha: &CoefficientField) -> AssembledSystem {
    assemble_with_rhs(mesh, alpha, Rhs::ConstantLoad(1.0))
}

pub fn assemble_with_rhs(mesh: &StructuredMesh, alpha: &CoefficientField, rhs: Rhs) -> AssembledSystem {
    assert_eq!(alpha.n_elems_per_side(), mesh.n_elems_per_side());
    let a = stiffness(mesh, alpha);
    let rhs = match rhs {
        Rhs::ConstantLoad(f) => load_vector(mesh, |_, _| f),
        Rhs::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..mesh.n_free()).map(|_| rng.random_range(-1.0..1.0)).collect()
        }
    };
    AssembledSystem {
        a,
        rhs,
        free_node_map: mesh.free_node_map(),
    }
}

fn stiffness(mesh: &StructuredMesh, alpha: &CoefficientField) -> SparseMatrix {
    let nf = mesh.n_free();
    let mut trip = Vec::with_capacity(16 * mesh.n_elements());
    for e in 0..mesh.n_elements() {
        let (ex, ey) = mesh.element_coords(e);
        let a = alpha.at(ex, ey);
        let dofs = mesh.element_nodes(e).map(|v| mesh.free_index(v));
        for p in 0..4 {
            let Some(r) = dofs[p] else { continue };
            for q in 0..4 {
                if let Some(c) = dofs[q] {
                    trip.push((r, c, a * K_REF[p][q]));
                }
            }
        }
    }
    SparseMatrix::from_triplets(nf, nf, &trip).expect("free indices in range")
}

/// Consistent Q1 load `∫ f φ_k` by 3×3 Gauss quadrature per element.
pub fn load_vector(mesh: &StructuredMesh, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let h = mesh.h();
    let g = [
        (0.5 - 0.5 * (0.6f64).sqrt(), 5.0 / 18.0),
        (0.5, 8.0 / 18.0),
        (0.5 + 0.5 * (0.6f64).sqrt(), 5.0 / 18.0),
    ];
    let mut b = vec![0.0; mesh.n_free()];
    for e in 0..mesh.n_elements() {
        let (ex, ey) = mesh.element_coords(e);
        let dofs = mesh.element_nodes(e).map(|v| mesh.free_index(v));
        if dofs.iter().all(Option::is_none) {
            continue;
        }
        for &(s, ws) in &g {
            for &(t, wt) in &g {
                let fx = f((ex as f64 + s) * h, (ey as f64 + t) * h) * ws * wt * h * h;
                let phi = [(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t];
                for p in 0..4 {
                    if let Some(d) = dofs[p] {
                        b[d] += fx * phi[p];
                    }
                }
            }
        }
    }
    b
}

/// Stiffness of an element patch.
#[derive(Debug, Clone)]
pub struct LocalPatch {
    pub matrix: SparseMatrix,
    /// Mesh node of each local row.
    pub nodes: Vec<usize>,
    /// Free-dof index of each local row, `None` on the Dirichlet boundary.
    pub dofs: Vec<Option<usize>>,
}

/// Patch stiffness with natural boundary conditions on the patch boundary
/// and Dirichlet nodes eliminated.
pub fn assemble_neumann_local(
    mesh: &StructuredMesh,
    alpha: &CoefficientField,
    elems: &IndexSet,
) -> Result<LocalPatch> {
    patch(mesh, alpha, elems, true)
}

/// Patch stiffness with natural boundary conditions everywhere, including
/// on the global boundary.
pub fn assemble_floating_local(
    mesh: &StructuredMesh,
    alpha: &CoefficientField,
    elems: &IndexSet,
) -> Result<LocalPatch> {
    patch(mesh, alpha, elems, false)
}

fn patch(
    mesh: &StructuredMesh,
    alpha: &CoefficientField,
    elems: &IndexSet,
    eliminate: bool,
) -> Result<LocalPatch> {
    if elems.is_empty() {
        return Err(Error::EmptyPatch);
    }
    elems
        .check_bound(mesh.n_elements())
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let keep = |v: usize| !eliminate || !mesh.is_boundary_node(v);
    let nodes: IndexSet = elems
        .iter()
        .flat_map(|e| mesh.element_nodes(e))
        .filter(|&v| keep(v))
        .collect();
    let mut trip = Vec::with_capacity(16 * elems.len());
    for e in elems.iter() {
        let (ex, ey) = mesh.element_coords(e);
        let a = alpha.at(ex, ey);
        let loc = mesh.element_nodes(e).map(|v| nodes.position(v));
        for p in 0..4 {
            let Some(r) = loc[p] else { continue };
            for q in 0..4 {
                if let Some(c) = loc[q] {
                    trip.push((r, c, a * K_REF[p][q]));
                }
            }
        }
    }
    let m = nodes.len();
    let matrix = SparseMatrix::from_triplets(m, m, &trip).expect("local indices in range");
    let dofs = nodes.iter().map(|v| mesh.free_index(v)).collect();
    Ok(LocalPatch {
        matrix,
        nodes: nodes.into_vec(),
        dofs,
    })
}
