//! Running table rows over seeds.

use rayon::prelude::*;
use vcdt_core::{solve, AgdswDomain, EvpConfig, OmegaSpec, PcgOptions, SolveReport, SolverConfig, Variant};

use crate::config::{ExperimentConfig, Row};
use crate::problem::{build_instance, Instance};
use crate::Result;

/// Mean and maximum over seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub max: f64,
}

impl Stat {
    fn of(v: &[f64]) -> Self {
        Self {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RowResult {
    pub row: Row,
    pub seeds: usize,
    pub dim: Stat,
    pub dim_pre: Stat,
    pub kappa: Stat,
    pub its: Stat,
    /// Failure cause, including non-convergence.
    pub error: Option<String>,
}

impl RowResult {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }

    fn failed(row: Row, seeds: usize, msg: String) -> Self {
        let nan = Stat {
            mean: f64::NAN,
            max: f64::NAN,
        };
        Self {
            row,
            seeds,
            dim: nan,
            dim_pre: nan,
            kappa: nan,
            its: nan,
            error: Some(msg),
        }
    }
}

/// Solver settings of one row.
pub fn solver_config(cfg: &ExperimentConfig, row: &Row, mesh_size: Option<f64>) -> SolverConfig {
    let defaults = EvpConfig::default();
    let agdsw_domain = match (row.variant, row.omega_e) {
        (Variant::Agdsw, Some(_)) => AgdswDomain::Oversampling,
        _ => AgdswDomain::Pair,
    };
    SolverConfig {
        overlap: cfg.overlap,
        evp: EvpConfig {
            tol_dir: cfg.tol_dir,
            tol_tr: row.tol_tr.unwrap_or(defaults.tol_tr),
            tol_o: cfg.tol_o,
            alpha_min: cfg.transfer_alpha_min.unwrap_or(cfg.alpha_min),
            include_h_factor: cfg.include_h_factor,
            mesh_size,
            omega_e: row.omega_e.unwrap_or(OmegaSpec::Layers(5)),
            tol_agdsw: cfg.tol_agdsw,
            agdsw_domain,
        },
        pcg: PcgOptions {
            rel_tol: cfg.rel_tol,
            max_it: cfg.max_it,
        },
    }
}

/// Runs one row on one instance.
pub fn run_one(cfg: &ExperimentConfig, row: &Row, inst: &Instance) -> Result<SolveReport> {
    let sc = solver_config(cfg, row, inst.mesh_size());
    Ok(solve(&inst.problem, row.variant, &sc, inst.neumann())?.report)
}

/// Runs every row over every seed; rows come back in declared order.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<RowResult>> {
    cfg.validate()?;
    let rows = cfg.rows()?;
    let instances: Vec<std::result::Result<Instance, String>> = cfg
        .seeds
        .par_iter()
        .map(|&s| build_instance(cfg, s).map_err(|e| e.to_string()))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..rows.len())
        .flat_map(|r| (0..instances.len()).map(move |s| (r, s)))
        .collect();
    let reports: Vec<std::result::Result<SolveReport, String>> = jobs
        .par_iter()
        .map(|&(r, s)| {
            let inst = instances[s].as_ref().map_err(|e| e.clone())?;
            run_one(cfg, &rows[r], inst).map_err(|e| e.to_string())
        })
        .collect();

    let n_seeds = instances.len();
    Ok(rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mine = &reports[r * n_seeds..(r + 1) * n_seeds];
            if let Some((k, Err(e))) = mine.iter().enumerate().find(|(_, x)| x.is_err()) {
                return RowResult::failed(*row, n_seeds, format!("seed {}: {e}", cfg.seeds[k]));
            }
            let reps: Vec<&SolveReport> = mine.iter().map(|x| x.as_ref().unwrap()).collect();
            let col = |f: &dyn Fn(&SolveReport) -> f64| Stat::of(&reps.iter().map(|r| f(r)).collect::<Vec<_>>());
            let unconverged = reps.iter().filter(|r| !r.converged).count();
            RowResult {
                row: *row,
                seeds: n_seeds,
                dim: col(&|r| r.coarse_dim_post_pod as f64),
                dim_pre: col(&|r| r.coarse_dim_pre_pod as f64),
                kappa: col(&|r| r.kappa_estimate.unwrap_or(f64::NAN)),
                its: col(&|r| r.iterations as f64),
                error: (unconverged > 0).then(|| format!("{unconverged} of {n_seeds} runs did not converge")),
            }
        })
        .collect())
}
