//! Algebraic two-level overlapping Schwarz preconditioners with adaptive
//! coarse spaces for heterogeneous diffusion problems.
//!
//! Everything here works from an assembled SPD matrix and a non-overlapping
//! partition of its rows. The interface is classified from the matrix graph,
//! edge eigenproblems are posed on oversampling domains grown from the edges,
//! and the resulting functions are extended into subdomain interiors with
//! minimal energy. Variants that need unassembled Neumann matrices receive
//! them through [`NeumannSource`].

pub mod coarse;
pub mod decomposition;
mod error;
pub mod pipeline;
pub mod schwarz;

pub use coarse::{
    build as build_coarse_space, build_algebraic, write_coarse_basis, AgdswDomain, AlgebraicVariant, CoarseSpace, ColumnLabel,
    EdgeFunctions, Entity, EvpConfig, NeumannPatch, NeumannSource, PatchRegion, Provenance, TransferInner,
    Variant,
};
pub use decomposition::{
    build_oversampling, classify_interface, grow, grow_overlap, read_partition, structured_partition,
    write_partition, Edge, Interface, OmegaSpec, OverlappingSets, OversamplingDomain, Partition, Vertex,
};
pub use error::{Error, Result};
pub use pipeline::{ingest, solve, solve_algebraic, Problem, SolveOutcome, SolverConfig};
pub use schwarz::{
    dense_condition_oracle, lanczos_extremes, pcg, preconditioner_matrix, Identity, PcgOptions, PcgResult,
    Preconditioner, SchwarzPreconditioner, SolveReport, Timings,
};

#[cfg(test)]
mod tests {
    use super::*;
    use vcdt_sparse::SparseMatrix;

    fn laplacian_1d(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        SparseMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn variant_names_round_trip() {
        for s in ["GDSW", "AGDSW", "VCD", "VCT-l2", "VCT-a", "VCDT-l2", "VCDT-a"] {
            let v: Variant = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert!("XYZ".parse::<Variant>().is_err());
        assert!(!Variant::Agdsw.is_algebraic());
        assert_eq!(Variant::Vcdt(TransferInner::L2).algebraic(), Some(AlgebraicVariant::VcdtL2));
    }

    #[test]
    fn omega_spec_parsing() {
        assert_eq!("2h".parse::<OmegaSpec>().unwrap(), OmegaSpec::Layers(2));
        assert_eq!("H".parse::<OmegaSpec>().unwrap(), OmegaSpec::SubdomainHull);
        assert!("x".parse::<OmegaSpec>().is_err());
    }

    #[test]
    fn config_validation() {
        let cfg = EvpConfig {
            tol_o: 0.0,
            ..EvpConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = EvpConfig {
            include_h_factor: true,
            ..EvpConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn pcg_with_identity_solves_tridiagonal() {
        let a = laplacian_1d(20);
        let b = vec![1.0; 20];
        let r = pcg(&a, &b, &Identity(20), PcgOptions::default());
        assert!(r.converged);
        assert!(r.iterations <= 20);
        let ax = a.mul_vec(&r.x);
        assert!(ax.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-8));
        // Exact extremes 2 - 2cos(kπ/21); the full Krylov space recovers them.
        let (lo, hi) = r.ritz_extremes.unwrap();
        let pi = std::f64::consts::PI;
        let exact_lo = 2.0 - 2.0 * (pi / 21.0).cos();
        let exact_hi = 2.0 - 2.0 * (20.0 * pi / 21.0).cos();
        assert!(hi <= exact_hi * (1.0 + 1e-8));
        assert!(lo >= exact_lo * (1.0 - 1e-8));
    }

    #[test]
    fn zero_rhs_returns_immediately() {
        let a = laplacian_1d(5);
        let r = pcg(&a, &[0.0; 5], &Identity(5), PcgOptions::default());
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert!(r.kappa_estimate().is_none());
    }

    #[test]
    fn dense_oracle_refuses_large_systems() {
        let a = laplacian_1d(2600);
        assert!(matches!(
            dense_condition_oracle(&a, &Identity(2600)),
            Err(Error::SizeGuard { .. })
        ));
    }
}
