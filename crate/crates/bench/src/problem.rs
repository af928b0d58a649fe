//! Problem instances: generated on the structured mesh or read from files.

use vcdt_core::{ingest, structured_partition, NeumannPatch, NeumannSource, PatchRegion, Problem};
use vcdt_fe::{
    assemble_floating_local, assemble_neumann_local, assemble_with_rhs, make_coefficient, read_raster,
    ChannelLayout, CoefficientField, CoefficientKind, CombLayout, Contrast, LocalPatch, Rhs, StructuredMesh,
};
use vcdt_sparse::IndexSet;

use crate::config::{ExperimentConfig, ProblemKind, RhsKind};
use crate::Result;

/// A problem together with the mesh data behind it, when there is any.
pub struct Instance {
    pub problem: Problem,
    pub mesh: Option<FeNeumann>,
}

impl Instance {
    pub fn neumann(&self) -> Option<&dyn NeumannSource> {
        self.mesh.as_ref().map(|m| m as &dyn NeumannSource)
    }

    pub fn mesh_size(&self) -> Option<f64> {
        self.mesh.as_ref().map(|m| m.mesh.h())
    }
}

/// Local Neumann matrices from the element-wise coefficient.
pub struct FeNeumann {
    pub mesh: StructuredMesh,
    pub field: CoefficientField,
    pub subdomains_per_side: usize,
}

impl FeNeumann {
    fn elements(&self, region: PatchRegion<'_>) -> IndexSet {
        match region {
            PatchRegion::Subdomains(s) => self.mesh.elements_in_blocks(self.subdomains_per_side, s),
            PatchRegion::Dofs(d) => self.mesh.elements_within(d),
        }
    }
}

fn to_patch(p: vcdt_fe::Result<LocalPatch>) -> std::result::Result<NeumannPatch, String> {
    p.map(|p| NeumannPatch {
        matrix: p.matrix,
        dofs: p.dofs,
    })
    .map_err(|e| e.to_string())
}

impl NeumannSource for FeNeumann {
    fn floating_patch(&self, region: PatchRegion<'_>) -> std::result::Result<NeumannPatch, String> {
        to_patch(assemble_floating_local(&self.mesh, &self.field, &self.elements(region)))
    }

    fn neumann_patch(&self, region: PatchRegion<'_>) -> std::result::Result<NeumannPatch, String> {
        to_patch(assemble_neumann_local(&self.mesh, &self.field, &self.elements(region)))
    }
}

pub fn coefficient_kind(cfg: &ExperimentConfig, seed: u64) -> Result<CoefficientKind> {
    let s = cfg.subdomains_per_side;
    Ok(match cfg.problem {
        ProblemKind::Channels => CoefficientKind::Channels(ChannelLayout::new(s)),
        ProblemKind::Comb => CoefficientKind::Comb(CombLayout::new(s)),
        ProblemKind::RandomBinary => CoefficientKind::RandomBinary { p: cfg.p, seed },
        ProblemKind::Constant => CoefficientKind::Constant(cfg.alpha_min),
        ProblemKind::Raster => CoefficientKind::Raster {
            grid: read_raster(cfg.raster.as_ref().expect("validated"))?,
            threshold: cfg.threshold,
        },
        ProblemKind::Matrix => unreachable!("matrix problems are not generated"),
    })
}

/// Builds the instance for one seed.
pub fn build_instance(cfg: &ExperimentConfig, seed: u64) -> Result<Instance> {
    if cfg.problem == ProblemKind::Matrix {
        let problem = ingest(
            cfg.matrix.as_ref().expect("validated"),
            cfg.partition.as_ref().expect("validated"),
            cfg.rhs_file.as_deref(),
        )?;
        return Ok(Instance { problem, mesh: None });
    }
    let mesh = StructuredMesh::new(cfg.n);
    let contrast = Contrast {
        alpha_min: cfg.alpha_min,
        alpha_max: cfg.alpha_max,
    };
    let field = make_coefficient(&mesh, &coefficient_kind(cfg, seed)?, contrast)?;
    let rhs = match cfg.rhs {
        RhsKind::Ones => Rhs::ConstantLoad(1.0),
        RhsKind::Random => Rhs::Random { seed },
    };
    let sys = assemble_with_rhs(&mesh, &field, rhs);
    let b = match &cfg.rhs_file {
        Some(p) => vcdt_sparse::mtx::read_vector(p)?,
        None => sys.rhs,
    };
    let part = structured_partition(cfg.n, cfg.subdomains_per_side)?;
    let problem = Problem::new(sys.a, b, part)?;
    Ok(Instance {
        problem,
        mesh: Some(FeNeumann {
            mesh,
            field,
            subdomains_per_side: cfg.subdomains_per_side,
        }),
    })
}
