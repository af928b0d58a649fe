//! Nonoverlapping partitions, interface classification, overlap growth and
//! oversampling domains, all derived from the matrix graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use vcdt_sparse::{IndexSet, SparseMatrix};

use crate::error::{Error, Result};

/// Owner subdomain of every dof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    owner: Vec<usize>,
    n_subdomains: usize,
}

impl Partition {
    pub fn new(owner: Vec<usize>) -> Result<Self> {
        let n_subdomains = owner.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; n_subdomains];
        owner.iter().for_each(|&s| seen[s] = true);
        if let Some(s) = seen.iter().position(|&x| !x) {
            return Err(Error::InvalidParameter(format!("subdomain {s} owns no dofs")));
        }
        Ok(Self { owner, n_subdomains })
    }

    pub fn n_dofs(&self) -> usize {
        self.owner.len()
    }

    pub fn n_subdomains(&self) -> usize {
        self.n_subdomains
    }

    pub fn owner(&self, dof: usize) -> usize {
        self.owner[dof]
    }

    pub fn owners(&self) -> &[usize] {
        &self.owner
    }

    pub fn owned(&self, s: usize) -> IndexSet {
        IndexSet::new((0..self.owner.len()).filter(|&v| self.owner[v] == s).collect())
    }
}

/// Square-block partition of the `(n-1)²` interior grid nodes, numbered
/// lexicographically. Block `bx + per_side·by`; nodes on block boundaries
/// go to the lowest adjacent block.
pub fn structured_partition(n: usize, per_side: usize) -> Result<Partition> {
    if per_side == 0 || n % per_side != 0 {
        return Err(Error::InvalidParameter(format!(
            "{per_side} subdomains per side do not divide {n}"
        )));
    }
    let hb = n / per_side;
    let m = n - 1;
    let owner = (0..m * m)
        .map(|d| {
            let (i, j) = (d % m + 1, d / m + 1);
            (i - 1) / hb + per_side * ((j - 1) / hb)
        })
        .collect();
    Partition::new(owner)
}

/// Reads `node_id subdomain_id` lines; every node must appear exactly once.
pub fn read_partition(path: impl AsRef<Path>) -> Result<Partition> {
    let reader = BufReader::new(File::open(path)?);
    let mut pairs = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: k + 1,
                msg: format!("'{s}' is not a non-negative integer"),
            })
        };
        if f.len() != 2 {
            return Err(Error::Parse {
                line: k + 1,
                msg: "expected 'node_id subdomain_id'".into(),
            });
        }
        pairs.push((parse(f[0])?, parse(f[1])?, k + 1));
    }
    let n = pairs.len();
    let mut owner = vec![usize::MAX; n];
    for (node, sub, line) in pairs {
        if node >= n || owner[node] != usize::MAX {
            return Err(Error::Parse {
                line,
                msg: format!("node {node} is duplicated or out of range"),
            });
        }
        owner[node] = sub;
    }
    Partition::new(owner)
}

pub fn write_partition(path: impl AsRef<Path>, part: &Partition) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (v, s) in part.owner.iter().enumerate() {
        writeln!(w, "{v} {s}")?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Interior edge dofs `ė`.
    pub nodes: IndexSet,
    /// Ids of the endpoint vertices.
    pub vertices: Vec<usize>,
    pub subdomains: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub node: usize,
    pub subdomains: Vec<usize>,
}

/// Splitting of the dofs into subdomain interiors, edges and vertices.
#[derive(Debug, Clone)]
pub struct Interface {
    pub interior: IndexSet,
    pub edges: Vec<Edge>,
    pub vertices: Vec<Vertex>,
    membership: Vec<Vec<usize>>,
    n_subdomains: usize,
}

impl Interface {
    /// Subdomain closures containing `dof`.
    pub fn membership(&self, dof: usize) -> &[usize] {
        &self.membership[dof]
    }

    pub fn n_dofs(&self) -> usize {
        self.membership.len()
    }

    pub fn n_subdomains(&self) -> usize {
        self.n_subdomains
    }

    /// Dofs of the closure of subdomain `s`.
    pub fn closure(&self, s: usize) -> IndexSet {
        IndexSet::new(
            (0..self.membership.len())
                .filter(|&v| self.membership[v].contains(&s))
                .collect(),
        )
    }

    /// Interface dofs Γ (edges and vertices).
    pub fn gamma(&self) -> IndexSet {
        IndexSet::new(
            (0..self.membership.len())
                .filter(|&v| self.membership[v].len() > 1)
                .collect(),
        )
    }

    /// Interior dofs of subdomain `s`.
    pub fn interior_of(&self, s: usize) -> IndexSet {
        IndexSet::new(
            self.interior
                .iter()
                .filter(|&v| self.membership[v][0] == s)
                .collect(),
        )
    }

    /// Closed edge `ē`: interior edge dofs plus endpoint vertices.
    pub fn closed_edge(&self, edge: usize) -> Result<IndexSet> {
        let e = self.edges.get(edge).ok_or(Error::UnknownEdge(edge))?;
        let ends = IndexSet::new(e.vertices.iter().map(|&v| self.vertices[v].node).collect());
        Ok(e.nodes.union(&ends))
    }
}

/// Classifies dofs from the matrix graph and the ownership map.
///
/// A dof is on the interface side of a block boundary when it has a graph
/// neighbour owned by a subdomain with a larger id. Such a dof belongs to the
/// closure of its own subdomain and of the owners of its non-interface
/// neighbours; all other dofs belong to their owner only. Multiplicity 1 is
/// interior, 2 is edge, 3 or more is vertex. Edge dofs are grouped into
/// connected components per subdomain pair.
pub fn classify_interface(a: &SparseMatrix, part: &Partition) -> Result<Interface> {
    let n = a.n_rows();
    if part.n_dofs() != n {
        return Err(Error::InvalidParameter(format!(
            "partition has {} dofs, matrix has {n}",
            part.n_dofs()
        )));
    }
    let own = part.owners();
    let on_gamma: Vec<bool> = (0..n)
        .map(|v| a.neighbors(v).any(|u| own[u] > own[v]))
        .collect();
    let membership: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut m = BTreeSet::from([own[v]]);
            if on_gamma[v] {
                m.extend(a.neighbors(v).filter(|&u| !on_gamma[u]).map(|u| own[u]));
            }
            m.into_iter().collect()
        })
        .collect();

    let interior = IndexSet::new((0..n).filter(|&v| membership[v].len() == 1).collect());
    let vertex_nodes: Vec<usize> = (0..n).filter(|&v| membership[v].len() >= 3).collect();
    let vertex_id: HashMap<usize, usize> =
        vertex_nodes.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let vertices: Vec<Vertex> = vertex_nodes
        .iter()
        .map(|&v| Vertex {
            node: v,
            subdomains: membership[v].clone(),
        })
        .collect();

    let mut comp = vec![usize::MAX; n];
    let mut groups: BTreeMap<((usize, usize), usize), Vec<usize>> = BTreeMap::new();
    for s in 0..n {
        if membership[s].len() != 2 || comp[s] != usize::MAX {
            continue;
        }
        let key = (membership[s][0], membership[s][1]);
        let mut nodes = vec![s];
        comp[s] = s;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for w in a.neighbors(u) {
                if comp[w] == usize::MAX && membership[w] == membership[s] {
                    comp[w] = s;
                    nodes.push(w);
                    stack.push(w);
                }
            }
        }
        groups.insert((key, s), nodes);
    }
    let edges = groups
        .into_iter()
        .map(|((key, _), nodes)| {
            let nodes = IndexSet::new(nodes);
            let mut ends: Vec<usize> = nodes
                .iter()
                .flat_map(|u| a.neighbors(u).collect::<Vec<_>>())
                .filter_map(|w| vertex_id.get(&w).copied())
                .collect();
            ends.sort_unstable();
            ends.dedup();
            Edge {
                nodes,
                vertices: ends,
                subdomains: key,
            }
        })
        .collect();

    Ok(Interface {
        interior,
        edges,
        vertices,
        membership,
        n_subdomains: part.n_subdomains(),
    })
}

/// Adds `k` layers of graph neighbours to `set`.
pub fn grow(a: &SparseMatrix, set: &IndexSet, k: usize) -> IndexSet {
    let mut inside = vec![false; a.n_rows()];
    let mut front: Vec<usize> = set.iter().collect();
    front.iter().for_each(|&v| inside[v] = true);
    for _ in 0..k {
        let mut next = Vec::new();
        for &u in &front {
            for w in a.neighbors(u) {
                if !inside[w] {
                    inside[w] = true;
                    next.push(w);
                }
            }
        }
        front = next;
    }
    IndexSet::new((0..a.n_rows()).filter(|&v| inside[v]).collect())
}

/// Overlapping subdomains `Ω'_i`.
#[derive(Debug, Clone)]
pub struct OverlappingSets {
    pub sets: Vec<IndexSet>,
    pub layers: usize,
    /// Largest number of sets sharing a dof.
    pub multiplicity: usize,
}

/// Grows each subdomain closure by `k` graph layers.
pub fn grow_overlap(a: &SparseMatrix, interface: &Interface, k: usize) -> OverlappingSets {
    let sets: Vec<IndexSet> = (0..interface.n_subdomains())
        .map(|s| grow(a, &interface.closure(s), k))
        .collect();
    let mut count = vec![0usize; a.n_rows()];
    for s in &sets {
        s.iter().for_each(|v| count[v] += 1);
    }
    OverlappingSets {
        multiplicity: count.iter().copied().max().unwrap_or(0),
        sets,
        layers: k,
    }
}

/// How the oversampling domain of an edge is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OmegaSpec {
    /// `k` graph layers around `ė`.
    Layers(usize),
    /// Union of the closures of all subdomains whose closure meets `ē`.
    SubdomainHull,
}

impl std::fmt::Display for OmegaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OmegaSpec::Layers(k) => write!(f, "{k}h"),
            OmegaSpec::SubdomainHull => write!(f, "H"),
        }
    }
}

impl std::str::FromStr for OmegaSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "H" || t.eq_ignore_ascii_case("hull") {
            return Ok(OmegaSpec::SubdomainHull);
        }
        t.strip_suffix('h')
            .and_then(|k| k.parse().ok())
            .map(OmegaSpec::Layers)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown oversampling domain '{s}'")))
    }
}

#[derive(Debug, Clone)]
pub struct OversamplingDomain {
    pub edge: usize,
    pub all: IndexSet,
    pub interior: IndexSet,
    pub boundary: IndexSet,
    /// `R̃ = ∘Ω_e \ ė`.
    pub complement: IndexSet,
}

pub fn build_oversampling(
    a: &SparseMatrix,
    interface: &Interface,
    edge: usize,
    spec: OmegaSpec,
) -> Result<OversamplingDomain> {
    let e = interface.edges.get(edge).ok_or(Error::UnknownEdge(edge))?;
    let (all, interior) = match spec {
        OmegaSpec::Layers(k) => {
            if k < 2 {
                return Err(Error::InvalidParameter(format!(
                    "oversampling needs at least 2 layers, got {k}"
                )));
            }
            let inner = grow(a, &e.nodes, k - 1);
            (grow(a, &inner, 1), inner)
        }
        OmegaSpec::SubdomainHull => {
            let closed = interface.closed_edge(edge)?;
            let subs: BTreeSet<usize> = closed
                .iter()
                .flat_map(|v| interface.membership(v).iter().copied())
                .collect();
            let all = subs
                .iter()
                .fold(IndexSet::empty(), |acc, &s| acc.union(&interface.closure(s)));
            let interior = IndexSet::new(
                all.iter()
                    .filter(|&v| a.neighbors(v).all(|u| all.contains(u)))
                    .collect(),
            );
            (all, interior)
        }
    };
    let boundary = all.difference(&interior);
    if !e.nodes.is_subset(&interior) {
        return Err(Error::InvalidParameter(format!(
            "edge {edge} is not interior to its oversampling domain"
        )));
    }
    Ok(OversamplingDomain {
        edge,
        complement: interior.difference(&e.nodes),
        all,
        interior,
        boundary,
    })
}
