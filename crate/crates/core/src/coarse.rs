//! Coarse spaces: GDSW, the Dirichlet and transfer edge eigenproblems, the
//! Neumann-based AGDSW reference, per-edge POD and energy-minimizing
//! extension into subdomain interiors.

use rayon::prelude::*;
use vcdt_sparse::{
    generalized_sym_eig, orthonormalize, sym_eig, weighted_pod, DenseCholesky, DenseMatrix,
    EigenPairs, Factorization, IndexSet, SparseMatrix,
};

use crate::decomposition::{build_oversampling, Interface, OmegaSpec, OversamplingDomain};
use crate::error::{Error, Result};

/// Inner product on the right-hand side of the transfer eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransferInner {
    /// Scaled Euclidean product on `∂Ω_e`; algebraic.
    L2,
    /// Energy of the harmonic extension with the local Neumann matrix.
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Gdsw,
    Agdsw,
    Vcd,
    Vct(TransferInner),
    Vcdt(TransferInner),
}

/// Variants computable from the assembled matrix alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgebraicVariant {
    Gdsw,
    Vcd,
    VctL2,
    VcdtL2,
}

impl From<AlgebraicVariant> for Variant {
    fn from(v: AlgebraicVariant) -> Self {
        match v {
            AlgebraicVariant::Gdsw => Variant::Gdsw,
            AlgebraicVariant::Vcd => Variant::Vcd,
            AlgebraicVariant::VctL2 => Variant::Vct(TransferInner::L2),
            AlgebraicVariant::VcdtL2 => Variant::Vcdt(TransferInner::L2),
        }
    }
}

impl Variant {
    pub fn is_algebraic(&self) -> bool {
        !matches!(
            self,
            Variant::Agdsw | Variant::Vct(TransferInner::Energy) | Variant::Vcdt(TransferInner::Energy)
        )
    }

    pub fn algebraic(&self) -> Option<AlgebraicVariant> {
        match self {
            Variant::Gdsw => Some(AlgebraicVariant::Gdsw),
            Variant::Vcd => Some(AlgebraicVariant::Vcd),
            Variant::Vct(TransferInner::L2) => Some(AlgebraicVariant::VctL2),
            Variant::Vcdt(TransferInner::L2) => Some(AlgebraicVariant::VcdtL2),
            _ => None,
        }
    }

    pub fn uses_dirichlet(&self) -> bool {
        matches!(self, Variant::Vcd | Variant::Vcdt(_))
    }

    pub fn uses_transfer(&self) -> bool {
        matches!(self, Variant::Vct(_) | Variant::Vcdt(_))
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Variant::Gdsw => "GDSW",
            Variant::Agdsw => "AGDSW",
            Variant::Vcd => "VCD",
            Variant::Vct(TransferInner::L2) => "VCT-l2",
            Variant::Vct(TransferInner::Energy) => "VCT-a",
            Variant::Vcdt(TransferInner::L2) => "VCDT-l2",
            Variant::Vcdt(TransferInner::Energy) => "VCDT-a",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "GDSW" => Variant::Gdsw,
            "AGDSW" => Variant::Agdsw,
            "VCD" => Variant::Vcd,
            "VCT" | "VCT-L2" => Variant::Vct(TransferInner::L2),
            "VCT-A" => Variant::Vct(TransferInner::Energy),
            "VCDT" | "VCDT-L2" => Variant::Vcdt(TransferInner::L2),
            "VCDT-A" => Variant::Vcdt(TransferInner::Energy),
            _ => return Err(Error::InvalidParameter(format!("unknown variant '{s}'"))),
        })
    }
}

/// Extension domain of the AGDSW edge eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgdswDomain {
    /// The two subdomains sharing the edge.
    Pair,
    /// The oversampling domain given by `EvpConfig::omega_e`.
    Oversampling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvpConfig {
    pub tol_dir: f64,
    pub tol_tr: f64,
    pub tol_o: f64,
    /// Scaling of the transfer right-hand side.
    pub alpha_min: f64,
    /// Multiply the transfer right-hand side by the mesh size.
    pub include_h_factor: bool,
    pub mesh_size: Option<f64>,
    pub omega_e: OmegaSpec,
    /// AGDSW selection threshold; `tol_dir` when unset.
    pub tol_agdsw: Option<f64>,
    pub agdsw_domain: AgdswDomain,
}

impl Default for EvpConfig {
    fn default() -> Self {
        Self {
            tol_dir: 1e-3,
            tol_tr: 1e5,
            tol_o: 1e-5,
            alpha_min: 1.0,
            include_h_factor: false,
            mesh_size: None,
            omega_e: OmegaSpec::Layers(5),
            tol_agdsw: None,
            agdsw_domain: AgdswDomain::Pair,
        }
    }
}

impl EvpConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tol_dir", self.tol_dir),
            ("tol_tr", self.tol_tr),
            ("tol_o", self.tol_o),
            ("alpha_min", self.alpha_min),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.include_h_factor && self.mesh_size.is_none() {
            return Err(Error::InvalidParameter(
                "include_h_factor requires a mesh size".into(),
            ));
        }
        Ok(())
    }

    fn transfer_scale(&self, n_boundary: usize) -> f64 {
        let h = if self.include_h_factor {
            self.mesh_size.unwrap_or(1.0)
        } else {
            1.0
        };
        self.alpha_min * h / n_boundary as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Constant,
    Dirichlet(f64),
    Transfer(f64),
    Agdsw(f64),
    /// Mixed by the per-edge POD; carries the retained Gram eigenvalue.
    Pod(f64),
    Vertex,
}

impl Provenance {
    pub fn label(&self) -> &'static str {
        match self {
            Provenance::Constant => "constant",
            Provenance::Dirichlet(_) => "dirichlet",
            Provenance::Transfer(_) => "transfer",
            Provenance::Agdsw(_) => "agdsw",
            Provenance::Pod(_) => "pod",
            Provenance::Vertex => "vertex",
        }
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            Provenance::Dirichlet(v) | Provenance::Transfer(v) | Provenance::Agdsw(v) | Provenance::Pod(v) => {
                Some(v)
            }
            _ => None,
        }
    }
}

/// Candidate functions on one interior edge.
#[derive(Debug, Clone)]
pub struct EdgeFunctions {
    pub edge: usize,
    /// One column per function, rows ordered as `ė`.
    pub columns: DenseMatrix,
    pub provenance: Vec<Provenance>,
}

impl EdgeFunctions {
    fn empty(edge: usize, m: usize) -> Self {
        Self {
            edge,
            columns: DenseMatrix::zeros(m, 0),
            provenance: vec![],
        }
    }

    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    fn append(&mut self, other: EdgeFunctions) {
        self.columns = self.columns.hcat(&other.columns);
        self.provenance.extend(other.provenance);
    }
}

/// Local Neumann matrix of an element patch.
#[derive(Debug, Clone)]
pub struct NeumannPatch {
    pub matrix: SparseMatrix,
    /// Global dof of each local row; `None` for nodes on the Dirichlet boundary.
    pub dofs: Vec<Option<usize>>,
}

pub enum PatchRegion<'a> {
    Subdomains(&'a [usize]),
    /// Elements whose free nodes all lie in the set.
    Dofs(&'a IndexSet),
}

/// Source of local Neumann matrices for the non-algebraic variants.
pub trait NeumannSource: Sync {
    /// Natural boundary conditions on the whole patch boundary, including
    /// the part on the global boundary.
    fn floating_patch(&self, region: PatchRegion<'_>) -> std::result::Result<NeumannPatch, String>;
    /// Natural boundary conditions inside the domain, Dirichlet nodes removed.
    fn neumann_patch(&self, region: PatchRegion<'_>) -> std::result::Result<NeumannPatch, String>;
}

/// One indicator column per vertex and per edge, as full-length vectors.
pub fn gdsw_columns(interface: &Interface) -> Vec<Vec<f64>> {
    let n = interface.n_dofs();
    let mut cols = Vec::with_capacity(interface.edges.len() + interface.vertices.len());
    for e in &interface.edges {
        let mut c = vec![0.0; n];
        e.nodes.iter().for_each(|v| c[v] = 1.0);
        cols.push(c);
    }
    for v in &interface.vertices {
        let mut c = vec![0.0; n];
        c[v.node] = 1.0;
        cols.push(c);
    }
    cols
}

/// Energy-minimizing extension of interface values into subdomain interiors.
pub struct HarmonicExtension {
    blocks: Vec<(IndexSet, Factorization)>,
}

impl HarmonicExtension {
    pub fn new(a: &SparseMatrix, interface: &Interface) -> Result<Self> {
        let blocks = (0..interface.n_subdomains())
            .into_par_iter()
            .map(|s| {
                let idx = interface.interior_of(s);
                let f = if idx.is_empty() {
                    Factorization::of_dense(&DenseMatrix::zeros(0, 0))
                } else {
                    Factorization::of_sparse(&a.extract(&idx, &idx)?)
                };
                f.map(|f| (idx, f))
                    .map_err(|source| Error::LocalSolver { subdomain: s, source })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { blocks })
    }

    /// Replaces interior values of `v` by `-A_II⁻¹ A_IΓ v_Γ`.
    pub fn extend(&self, a: &SparseMatrix, v: &mut [f64]) {
        let mut g = v.to_vec();
        for (idx, _) in &self.blocks {
            idx.iter().for_each(|i| g[i] = 0.0);
        }
        let ag = a.mul_vec(&g);
        for (idx, f) in &self.blocks {
            if idx.iter().all(|i| ag[i] == 0.0) {
                idx.iter().for_each(|i| v[i] = 0.0);
                continue;
            }
            let mut rhs: Vec<f64> = idx.iter().map(|i| -ag[i]).collect();
            f.solve_in_place(&mut rhs);
            for (k, i) in idx.iter().enumerate() {
                v[i] = rhs[k];
            }
        }
    }
}

/// Extends each full-length column harmonically from Γ into the interiors.
pub fn harmonic_extend(a: &SparseMatrix, interface: &Interface, cols: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let h = HarmonicExtension::new(a, interface)?;
    Ok(cols
        .par_iter()
        .map(|c| {
            let mut v = c.clone();
            h.extend(a, &mut v);
            v
        })
        .collect())
}

/// Full Dirichlet spectrum `S_e v = μ A_ėė v` on an oversampling domain.
pub fn dirichlet_spectrum(a: &SparseMatrix, edge_nodes: &IndexSet, od: &OversamplingDomain) -> Result<EigenPairs> {
    let aee = a.extract_dense(edge_nodes, edge_nodes)?;
    let mut s = aee.clone();
    if !od.complement.is_empty() {
        let arr = a.extract(&od.complement, &od.complement)?;
        let are = a.extract_dense(&od.complement, edge_nodes)?;
        let x = Factorization::of_sparse(&arr)?.solve_dense(&are);
        s.add_scaled(-1.0, &are.tr_matmul(&x));
    }
    s.symmetrize();
    Ok(generalized_sym_eig(&s, &aee)?)
}

/// Dirichlet eigenfunctions with `μ ≤ tol_dir`, unit in the `A_ėė` norm.
pub fn dirichlet_evp(
    a: &SparseMatrix,
    interface: &Interface,
    edge: usize,
    od: &OversamplingDomain,
    tol_dir: f64,
) -> Result<EdgeFunctions> {
    let e = interface.edges.get(edge).ok_or(Error::UnknownEdge(edge))?;
    let eig = dirichlet_spectrum(a, &e.nodes, od)?;
    let pick: Vec<usize> = (0..eig.len()).filter(|&i| eig.values[i] <= tol_dir).collect();
    Ok(EdgeFunctions {
        edge,
        columns: eig.vectors.select_columns(&pick),
        provenance: pick.iter().map(|&i| Provenance::Dirichlet(eig.values[i])).collect(),
    })
}

/// `T̂` rows on `∘Ω_e`, i.e. `-A_∘∘⁻¹ A_∘∂`.
fn transfer_interior(a: &SparseMatrix, od: &OversamplingDomain) -> Result<DenseMatrix> {
    let aoo = a.extract(&od.interior, &od.interior)?;
    let aob = a.extract_dense(&od.interior, &od.boundary)?;
    let mut x = Factorization::of_sparse(&aoo)?.solve_dense(&aob);
    x.scale(-1.0);
    Ok(x)
}

struct TransferProblem {
    /// `T`: traces on `ė` of harmonic extensions of unit boundary data.
    t: DenseMatrix,
    eig: EigenPairs,
}

fn transfer_problem(
    a: &SparseMatrix,
    edge_nodes: &IndexSet,
    od: &OversamplingDomain,
    cfg: &EvpConfig,
    inner: TransferInner,
    neumann: Option<&dyn NeumannSource>,
) -> Result<Option<TransferProblem>> {
    if od.boundary.is_empty() {
        log::debug!("edge {}: empty oversampling boundary, no transfer functions", od.edge);
        return Ok(None);
    }
    let that = transfer_interior(a, od)?;
    let rows: Vec<usize> = edge_nodes
        .iter()
        .map(|v| od.interior.position(v).expect("edge inside oversampling interior"))
        .collect();
    let nb = od.boundary.len();
    let t = DenseMatrix::from_fn(rows.len(), nb, |i, j| that[(rows[i], j)]);
    let aee = a.extract_dense(edge_nodes, edge_nodes)?;
    let mut lhs = t.tr_matmul(&aee.matmul(&t));
    lhs.symmetrize();

    let eig = match inner {
        TransferInner::L2 => {
            let c = cfg.transfer_scale(nb);
            let mut e = sym_eig(&lhs)?;
            e.values.iter_mut().for_each(|v| *v /= c);
            e.vectors.scale(1.0 / c.sqrt());
            e
        }
        TransferInner::Energy => {
            let src = neumann.ok_or_else(|| Error::Patch("energy transfer product needs Neumann matrices".into()))?;
            let patch = src.neumann_patch(PatchRegion::Dofs(&od.all)).map_err(Error::Patch)?;
            let mut ext = DenseMatrix::zeros(patch.dofs.len(), nb);
            for (r, d) in patch.dofs.iter().enumerate() {
                let d = d.ok_or_else(|| Error::Patch("unexpected Dirichlet node".into()))?;
                if let Some(k) = od.interior.position(d) {
                    for j in 0..nb {
                        ext[(r, j)] = that[(k, j)];
                    }
                } else if let Some(k) = od.boundary.position(d) {
                    ext[(r, k)] = 1.0;
                } else {
                    return Err(Error::Patch(format!("patch dof {d} outside the oversampling domain")));
                }
            }
            let mut rhs = ext.tr_matmul(&patch.matrix.mul_dense(&ext));
            rhs.symmetrize();
            let shift = 1e-10 * (0..nb).map(|i| rhs[(i, i)]).fold(0.0, f64::max);
            for i in 0..nb {
                rhs[(i, i)] += shift;
            }
            generalized_sym_eig(&lhs, &rhs)?
        }
    };
    Ok(Some(TransferProblem { t, eig }))
}

/// Full transfer spectrum, ascending; empty when `∂Ω_e` is empty.
pub fn transfer_spectrum(
    a: &SparseMatrix,
    edge_nodes: &IndexSet,
    od: &OversamplingDomain,
    cfg: &EvpConfig,
) -> Result<Vec<f64>> {
    Ok(transfer_problem(a, edge_nodes, od, cfg, TransferInner::L2, None)?
        .map(|p| p.eig.values)
        .unwrap_or_default())
}

/// Transfer eigenfunctions `T v` with `λ > tol_tr`, by descending `λ`.
pub fn transfer_evp(
    a: &SparseMatrix,
    interface: &Interface,
    edge: usize,
    od: &OversamplingDomain,
    cfg: &EvpConfig,
    inner: TransferInner,
    neumann: Option<&dyn NeumannSource>,
) -> Result<EdgeFunctions> {
    let e = interface.edges.get(edge).ok_or(Error::UnknownEdge(edge))?;
    let Some(p) = transfer_problem(a, &e.nodes, od, cfg, inner, neumann)? else {
        return Ok(EdgeFunctions::empty(edge, e.nodes.len()));
    };
    let pick: Vec<usize> = (0..p.eig.len()).rev().filter(|&i| p.eig.values[i] > cfg.tol_tr).collect();
    let v = p.eig.vectors.select_columns(&pick);
    Ok(EdgeFunctions {
        edge,
        columns: p.t.matmul(&v),
        provenance: pick.iter().map(|&i| Provenance::Transfer(p.eig.values[i])).collect(),
    })
}

/// AGDSW edge eigenfunctions from a floating Neumann patch: the Schur
/// complement onto `ė` against `A_ėė`, selecting `μ ≤ tol`.
pub fn agdsw_evp(a: &SparseMatrix, interface: &Interface, edge: usize, patch: &NeumannPatch, tol: f64) -> Result<EdgeFunctions> {
    let e = interface.edges.get(edge).ok_or(Error::UnknownEdge(edge))?;
    let eig = agdsw_spectrum(a, &e.nodes, patch)?;
    let pick: Vec<usize> = (0..eig.len()).filter(|&i| eig.values[i] <= tol).collect();
    Ok(EdgeFunctions {
        edge,
        columns: eig.vectors.select_columns(&pick),
        provenance: pick.iter().map(|&i| Provenance::Agdsw(eig.values[i])).collect(),
    })
}

pub fn agdsw_spectrum(a: &SparseMatrix, edge_nodes: &IndexSet, patch: &NeumannPatch) -> Result<EigenPairs> {
    let m = patch.matrix.n_rows();
    let mut e_loc = Vec::with_capacity(edge_nodes.len());
    for v in edge_nodes.iter() {
        let p = patch
            .dofs
            .iter()
            .position(|&d| d == Some(v))
            .ok_or_else(|| Error::Patch(format!("edge dof {v} missing from patch")))?;
        e_loc.push(p);
    }
    let e_set = IndexSet::new(e_loc.clone());
    if e_set.len() != e_loc.len() {
        return Err(Error::Patch("duplicate edge dofs in patch".into()));
    }
    let r_set = IndexSet::range(m).difference(&e_set);
    // Keep edge ordering aligned with `edge_nodes`.
    let order: Vec<usize> = e_loc.iter().map(|p| e_set.position(*p).unwrap()).collect();
    let kee = patch.matrix.extract_dense(&e_set, &e_set)?;
    let mut s = kee;
    if !r_set.is_empty() {
        let krr = patch.matrix.extract(&r_set, &r_set)?;
        let kre = patch.matrix.extract_dense(&r_set, &e_set)?;
        let x = Factorization::of_sparse(&krr)?.solve_dense(&kre);
        s.add_scaled(-1.0, &kre.tr_matmul(&x));
    }
    let s = DenseMatrix::from_fn(order.len(), order.len(), |i, j| s[(order[i], order[j])]);
    let mut s = s;
    s.symmetrize();
    let aee = a.extract_dense(edge_nodes, edge_nodes)?;
    Ok(generalized_sym_eig(&s, &aee)?)
}

/// Provenance of a coarse column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Entity {
    Edge(usize),
    Vertex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnLabel {
    pub entity: Entity,
    pub provenance: Provenance,
}

/// Columns of `E₀` with their interface values and bookkeeping.
#[derive(Debug, Clone)]
pub struct CoarseSpace {
    pub variant: Variant,
    /// `E₀ᵀ`, one row per coarse function.
    pub e0t: SparseMatrix,
    /// `A₀ = E₀ᵀ A E₀`.
    pub a0: DenseMatrix,
    pub labels: Vec<ColumnLabel>,
    /// Candidates per edge before and after POD.
    pub edge_dims: Vec<(usize, usize)>,
    pub dim_pre_pod: usize,
    pub dim_post_pod: usize,
}

impl CoarseSpace {
    pub fn dim(&self) -> usize {
        self.dim_post_pod
    }

    /// Column `j` of `E₀` as a full vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.e0t.n_cols()];
        let (idx, vals) = self.e0t.row(j);
        for (&i, &v) in idx.iter().zip(vals) {
            c[i] = v;
        }
        c
    }
}

/// Candidate edge functions of one edge, before POD.
pub fn edge_candidates(
    a: &SparseMatrix,
    interface: &Interface,
    edge: usize,
    variant: Variant,
    cfg: &EvpConfig,
    neumann: Option<&dyn NeumannSource>,
) -> Result<EdgeFunctions> {
    let e = interface.edges.get(edge).ok_or(Error::UnknownEdge(edge))?;
    let m = e.nodes.len();
    let constant = EdgeFunctions {
        edge,
        columns: DenseMatrix::from_columns(m, &[vec![1.0; m]]),
        provenance: vec![Provenance::Constant],
    };
    match variant {
        Variant::Gdsw => Ok(constant),
        Variant::Agdsw => {
            let src = neumann.ok_or_else(|| Error::Patch("AGDSW needs Neumann matrices".into()))?;
            let patch = match cfg.agdsw_domain {
                AgdswDomain::Pair => {
                    let pair = [e.subdomains.0, e.subdomains.1];
                    src.floating_patch(PatchRegion::Subdomains(&pair))
                }
                AgdswDomain::Oversampling => {
                    let od = build_oversampling(a, interface, edge, cfg.omega_e)?;
                    src.floating_patch(PatchRegion::Dofs(&od.all))
                }
            }
            .map_err(Error::Patch)?;
            agdsw_evp(a, interface, edge, &patch, cfg.tol_agdsw.unwrap_or(cfg.tol_dir))
        }
        Variant::Vcd | Variant::Vct(_) | Variant::Vcdt(_) => {
            let od = build_oversampling(a, interface, edge, cfg.omega_e)?;
            let mut f = constant;
            if variant.uses_dirichlet() {
                f.append(dirichlet_evp(a, interface, edge, &od, cfg.tol_dir)?);
            }
            if let Variant::Vct(inner) | Variant::Vcdt(inner) = variant {
                f.append(transfer_evp(a, interface, edge, &od, cfg, inner, neumann)?);
            }
            Ok(f)
        }
    }
}

/// Per-edge POD in the `A_ėė` inner product; the retained span is returned
/// Euclidean-orthonormal.
pub fn merge_edge_functions(a: &SparseMatrix, edge_nodes: &IndexSet, f: &EdgeFunctions, tol_o: f64) -> Result<EdgeFunctions> {
    if f.len() <= 1 {
        return Ok(f.clone());
    }
    let aee = a.extract_dense(edge_nodes, edge_nodes)?;
    let pod = weighted_pod(&f.columns, &aee, tol_o)?;
    let basis = orthonormalize(&pod.basis);
    Ok(EdgeFunctions {
        edge: f.edge,
        provenance: pod.energies.iter().map(|&l| Provenance::Pod(l)).collect(),
        columns: basis,
    })
}

/// Builds a coarse space; only algebraic variants, so no mesh data is needed.
pub fn build_algebraic(
    a: &SparseMatrix,
    interface: &Interface,
    variant: AlgebraicVariant,
    cfg: &EvpConfig,
) -> Result<CoarseSpace> {
    build(a, interface, variant.into(), cfg, None)
}

/// Builds a coarse space of any variant; non-algebraic ones need `neumann`.
pub fn build(
    a: &SparseMatrix,
    interface: &Interface,
    variant: Variant,
    cfg: &EvpConfig,
    neumann: Option<&dyn NeumannSource>,
) -> Result<CoarseSpace> {
    cfg.validate()?;
    let n = a.n_rows();
    let per_edge = (0..interface.edges.len())
        .into_par_iter()
        .map(|k| {
            let cand = edge_candidates(a, interface, k, variant, cfg, neumann)?;
            let pre = cand.len();
            let merged = if variant == Variant::Gdsw {
                cand
            } else {
                merge_edge_functions(a, &interface.edges[k].nodes, &cand, cfg.tol_o)?
            };
            Ok((pre, merged))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cols = Vec::new();
    let mut labels = Vec::new();
    let mut edge_dims = Vec::with_capacity(per_edge.len());
    for (k, (pre, f)) in per_edge.iter().enumerate() {
        edge_dims.push((*pre, f.len()));
        let nodes = &interface.edges[k].nodes;
        for j in 0..f.len() {
            let mut c = vec![0.0; n];
            for (r, v) in nodes.iter().enumerate() {
                c[v] = f.columns[(r, j)];
            }
            cols.push(c);
            labels.push(ColumnLabel {
                entity: Entity::Edge(k),
                provenance: f.provenance[j],
            });
        }
    }
    for (k, v) in interface.vertices.iter().enumerate() {
        let mut c = vec![0.0; n];
        c[v.node] = 1.0;
        cols.push(c);
        labels.push(ColumnLabel {
            entity: Entity::Vertex(k),
            provenance: Provenance::Vertex,
        });
    }
    let nv = interface.vertices.len();
    let dim_pre_pod = edge_dims.iter().map(|d| d.0).sum::<usize>() + nv;
    let dim_post_pod = cols.len();

    let full = harmonic_extend(a, interface, &cols)?;
    let mut trip = Vec::new();
    for (j, c) in full.iter().enumerate() {
        for (i, &v) in c.iter().enumerate() {
            if v != 0.0 {
                trip.push((j, i, v));
            }
        }
    }
    let e0t = SparseMatrix::from_triplets(full.len(), n, &trip)?;
    let ae: Vec<Vec<f64>> = full.par_iter().map(|c| a.mul_vec(c)).collect();
    let mut a0 = DenseMatrix::zeros(full.len(), full.len());
    for i in 0..full.len() {
        let (idx, vals) = e0t.row(i);
        for j in 0..full.len() {
            a0[(i, j)] = idx.iter().zip(vals).map(|(&r, &v)| v * ae[j][r]).sum();
        }
    }
    a0.symmetrize();
    if !full.is_empty() {
        DenseCholesky::factor(&a0).map_err(Error::CoarseNotSpd)?;
    }
    Ok(CoarseSpace {
        variant,
        e0t,
        a0,
        labels,
        edge_dims,
        dim_pre_pod,
        dim_post_pod,
    })
}

/// Writes `E₀` (N × n₀) as Matrix Market and a sidecar with one line per
/// column: `column entity id provenance value`.
pub fn write_coarse_basis(space: &CoarseSpace, matrix: &std::path::Path, sidecar: &std::path::Path) -> Result<()> {
    use std::io::Write;
    vcdt_sparse::mtx::write_matrix_market(matrix, &space.e0t.transpose(), false)?;
    let mut w = std::io::BufWriter::new(std::fs::File::create(sidecar)?);
    writeln!(w, "# variant {}", space.variant)?;
    for (j, l) in space.labels.iter().enumerate() {
        let (kind, id) = match l.entity {
            Entity::Edge(e) => ("edge", e),
            Entity::Vertex(v) => ("vertex", v),
        };
        let value = l.provenance.value().map_or_else(|| "-".to_string(), |v| format!("{v:e}"));
        writeln!(w, "{j} {kind} {id} {} {value}", l.provenance.label())?;
    }
    w.flush()?;
    Ok(())
}
