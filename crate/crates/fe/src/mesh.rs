use vcdt_sparse::IndexSet;

/// Uniform `n × n` grid of unit-square elements on `[0,1]²`.
///
/// Node `(i, j)` sits at `(i/n, j/n)` and has id `j(n+1) + i`. Element
/// `(ex, ey)` has id `ey·n + ex`. Free (interior) nodes are numbered
/// lexicographically, `x` fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuredMesh {
    n: usize,
}

impl StructuredMesh {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "mesh needs at least one element per side");
        Self { n }
    }

    pub fn n_elems_per_side(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn n_nodes(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    pub fn n_elements(&self) -> usize {
        self.n * self.n
    }

    pub fn n_free(&self) -> usize {
        (self.n - 1) * (self.n - 1)
    }

    pub fn node_id(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }

    pub fn node_coords(&self, node: usize) -> (usize, usize) {
        (node % (self.n + 1), node / (self.n + 1))
    }

    pub fn is_boundary_node(&self, node: usize) -> bool {
        let (i, j) = self.node_coords(node);
        i == 0 || j == 0 || i == self.n || j == self.n
    }

    /// Free-dof index of a mesh node, `None` on the Dirichlet boundary.
    pub fn free_index(&self, node: usize) -> Option<usize> {
        let (i, j) = self.node_coords(node);
        if i == 0 || j == 0 || i == self.n || j == self.n {
            None
        } else {
            Some((j - 1) * (self.n - 1) + (i - 1))
        }
    }

    /// Mesh node of a free dof.
    pub fn free_node(&self, dof: usize) -> usize {
        let m = self.n - 1;
        self.node_id(dof % m + 1, dof / m + 1)
    }

    pub fn free_node_map(&self) -> IndexSet {
        IndexSet::new((0..self.n_free()).map(|d| self.free_node(d)).collect())
    }

    pub fn element_id(&self, ex: usize, ey: usize) -> usize {
        ey * self.n + ex
    }

    pub fn element_coords(&self, e: usize) -> (usize, usize) {
        (e % self.n, e / self.n)
    }

    /// Element nodes in the order (0,0), (1,0), (1,1), (0,1).
    pub fn element_nodes(&self, e: usize) -> [usize; 4] {
        let (ex, ey) = self.element_coords(e);
        [
            self.node_id(ex, ey),
            self.node_id(ex + 1, ey),
            self.node_id(ex + 1, ey + 1),
            self.node_id(ex, ey + 1),
        ]
    }

    pub fn is_boundary_element(&self, e: usize) -> bool {
        let (ex, ey) = self.element_coords(e);
        ex == 0 || ey == 0 || ex + 1 == self.n || ey + 1 == self.n
    }

    /// Elements of the square blocks `bx + per_side·by` listed in `blocks`.
    pub fn elements_in_blocks(&self, per_side: usize, blocks: &[usize]) -> IndexSet {
        let hb = self.n / per_side;
        (0..self.n_elements())
            .filter(|&e| {
                let (ex, ey) = self.element_coords(e);
                blocks.contains(&(ex / hb + per_side * (ey / hb)))
            })
            .collect()
    }

    /// Elements whose free nodes all lie in `dofs`.
    pub fn elements_within(&self, dofs: &IndexSet) -> IndexSet {
        (0..self.n_elements())
            .filter(|&e| {
                let free: Vec<usize> = self
                    .element_nodes(e)
                    .iter()
                    .filter_map(|&v| self.free_index(v))
                    .collect();
                !free.is_empty() && free.iter().all(|&d| dofs.contains(d))
            })
            .collect()
    }
}
