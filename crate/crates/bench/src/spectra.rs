//! Per-edge eigenvalue dumps.

use vcdt_core::coarse::{agdsw_spectrum, dirichlet_spectrum, transfer_spectrum};
use vcdt_core::{build_oversampling, classify_interface, Error, PatchRegion};

use crate::config::{parse_omega, ExperimentConfig, Row};
use crate::problem::build_instance;
use crate::run::solver_config;
use crate::{BenchError, Result};

/// CSV of the Dirichlet and transfer spectra of `edge` for each configured
/// oversampling domain, plus the AGDSW spectrum when mesh data is available.
/// Uses the first seed.
pub fn spectra_csv(cfg: &ExperimentConfig, edge: usize) -> Result<String> {
    cfg.validate()?;
    let inst = build_instance(cfg, cfg.seeds[0])?;
    let a = &inst.problem.a;
    let iface = classify_interface(a, &inst.problem.partition)?;
    let e = iface.edges.get(edge).ok_or(Error::UnknownEdge(edge))?;
    let mut out = String::from("omega_e,problem,index,value\n");
    let mut push = |omega: &str, kind: &str, vals: &[f64]| {
        for (i, v) in vals.iter().enumerate() {
            out.push_str(&format!("{omega},{kind},{i},{v:e}\n"));
        }
    };
    for s in &cfg.omega_e {
        let Some(omega) = parse_omega(s)? else { continue };
        let row = Row {
            variant: vcdt_core::Variant::Vcdt(vcdt_core::TransferInner::L2),
            omega_e: Some(omega),
            tol_tr: cfg.tol_tr.first().copied(),
        };
        let sc = solver_config(cfg, &row, inst.mesh_size());
        let od = build_oversampling(a, &iface, edge, omega)?;
        let label = omega.to_string();
        push(&label, "dirichlet", &dirichlet_spectrum(a, &e.nodes, &od)?.values);
        let mut tr = transfer_spectrum(a, &e.nodes, &od, &sc.evp)?;
        tr.reverse();
        push(&label, "transfer", &tr);
    }
    if let Some(src) = inst.neumann() {
        let pair = [e.subdomains.0, e.subdomains.1];
        let patch = src
            .floating_patch(PatchRegion::Subdomains(&pair))
            .map_err(|m| BenchError::Core(Error::Patch(m)))?;
        push("pair", "agdsw", &agdsw_spectrum(a, &e.nodes, &patch)?.values);
    }
    Ok(out)
}
