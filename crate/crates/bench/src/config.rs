//! Experiment configuration: a flat TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use vcdt_core::{OmegaSpec, Variant};

use crate::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Channels,
    Comb,
    RandomBinary,
    Constant,
    Raster,
    /// Assembled matrix and partition read from files.
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsKind {
    /// Consistent load of `f ≡ 1`.
    Ones,
    Random,
}

/// One table row before it is run.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    pub variant: String,
    #[serde(default)]
    pub omega_e: Option<String>,
    #[serde(default)]
    pub tol_tr: Option<f64>,
}

/// Parsed row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub variant: Variant,
    /// `None` for GDSW and for AGDSW on the pair of adjacent subdomains.
    pub omega_e: Option<OmegaSpec>,
    pub tol_tr: Option<f64>,
}

impl Row {
    pub fn omega_label(&self) -> String {
        self.omega_e.map_or_else(|| "-".to_string(), |o| o.to_string())
    }
}

fn d_n() -> usize {
    40
}
fn d_per_side() -> usize {
    4
}
fn d_alpha_max() -> f64 {
    1e6
}
fn d_one() -> f64 {
    1.0
}
fn d_p() -> f64 {
    0.2
}
fn d_seeds() -> Vec<u64> {
    vec![0]
}
fn d_rhs() -> RhsKind {
    RhsKind::Ones
}
fn d_overlap() -> usize {
    1
}
fn d_variants() -> Vec<String> {
    vec!["GDSW".into(), "VCDT-l2".into()]
}
fn d_omega() -> Vec<String> {
    vec!["5h".into()]
}
fn d_tol_tr() -> Vec<f64> {
    vec![1e5]
}
fn d_tol_dir() -> f64 {
    1e-3
}
fn d_tol_o() -> f64 {
    1e-5
}
fn d_rel_tol() -> f64 {
    1e-10
}
fn d_max_it() -> usize {
    2000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    #[serde(default = "d_n")]
    pub n: usize,
    #[serde(default = "d_per_side")]
    pub subdomains_per_side: usize,
    #[serde(default = "d_alpha_max")]
    pub alpha_max: f64,
    #[serde(default = "d_one")]
    pub alpha_min: f64,
    /// Fraction of high-coefficient elements for `random_binary`.
    #[serde(default = "d_p")]
    pub p: f64,
    #[serde(default = "d_seeds")]
    pub seeds: Vec<u64>,
    /// Overrides `seeds` with `0..seed_count`.
    #[serde(default)]
    pub seed_count: Option<u64>,
    #[serde(default = "d_rhs")]
    pub rhs: RhsKind,
    #[serde(default)]
    pub raster: Option<PathBuf>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub matrix: Option<PathBuf>,
    #[serde(default)]
    pub partition: Option<PathBuf>,
    #[serde(default)]
    pub rhs_file: Option<PathBuf>,

    #[serde(default = "d_overlap")]
    pub overlap: usize,
    #[serde(default = "d_variants")]
    pub variants: Vec<String>,
    #[serde(default = "d_omega")]
    pub omega_e: Vec<String>,
    #[serde(default = "d_tol_tr")]
    pub tol_tr: Vec<f64>,
    #[serde(default = "d_tol_dir")]
    pub tol_dir: f64,
    #[serde(default = "d_tol_o")]
    pub tol_o: f64,
    /// Scaling of the transfer right-hand side; `alpha_min` when unset.
    #[serde(default)]
    pub transfer_alpha_min: Option<f64>,
    #[serde(default)]
    pub include_h_factor: bool,
    #[serde(default)]
    pub tol_agdsw: Option<f64>,
    #[serde(default = "d_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "d_max_it")]
    pub max_it: usize,

    /// Explicit rows; replace the variant sweep when present.
    #[serde(default, rename = "row")]
    pub rows: Vec<RowSpec>,
}

/// Command-line overrides of the sweep.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub variants: Option<Vec<String>>,
    pub tol_tr: Option<Vec<f64>>,
    pub omega_e: Option<Vec<String>>,
    pub seeds: Option<Vec<u64>>,
}

impl ExperimentConfig {
    pub fn from_str(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        if let Some(base) = base {
            for p in [&mut cfg.raster, &mut cfg.matrix, &mut cfg.partition, &mut cfg.rhs_file]
                .into_iter()
                .flatten()
            {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        if let Some(c) = cfg.seed_count {
            cfg.seeds = (0..c).collect();
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text, path.parent())
    }

    pub fn apply(&mut self, o: &Overrides) {
        let mut sweep = false;
        if let Some(v) = &o.variants {
            self.variants = v.clone();
            sweep = true;
        }
        if let Some(v) = &o.tol_tr {
            self.tol_tr = v.clone();
            sweep = true;
        }
        if let Some(v) = &o.omega_e {
            self.omega_e = v.clone();
            sweep = true;
        }
        if sweep {
            self.rows.clear();
        }
        if let Some(s) = &o.seeds {
            self.seeds = s.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::Config(m));
        for (name, v) in [
            ("tol_dir", self.tol_dir),
            ("tol_o", self.tol_o),
            ("rel_tol", self.rel_tol),
            ("alpha_min", self.alpha_min),
        ] {
            if !(v > 0.0) {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.alpha_max < self.alpha_min {
            return bad("alpha_max is below alpha_min".into());
        }
        if self.tol_tr.iter().any(|&t| !(t > 0.0)) {
            return bad("tol_tr values must be positive".into());
        }
        if self.seeds.is_empty() {
            return bad("no seeds".into());
        }
        if self.problem == ProblemKind::Matrix {
            for (name, p) in [("matrix", &self.matrix), ("partition", &self.partition)] {
                match p {
                    None => return bad(format!("problem 'matrix' needs '{name}'")),
                    Some(p) if !p.exists() => return bad(format!("{name} file {} not found", p.display())),
                    _ => {}
                }
            }
        } else {
            if self.subdomains_per_side == 0 || self.n % self.subdomains_per_side != 0 {
                return bad(format!(
                    "n = {} is not a multiple of subdomains_per_side = {}",
                    self.n, self.subdomains_per_side
                ));
            }
            if self.n < 2 {
                return bad("n must be at least 2".into());
            }
        }
        if self.problem == ProblemKind::Raster {
            match &self.raster {
                None => return bad("problem 'raster' needs 'raster'".into()),
                Some(p) if !p.exists() => return bad(format!("raster file {} not found", p.display())),
                _ => {}
            }
        }
        if let Some(p) = &self.rhs_file {
            if !p.exists() {
                return bad(format!("rhs file {} not found", p.display()));
            }
        }
        self.rows()?;
        Ok(())
    }

    /// Rows in declared order. Without explicit rows every variant is
    /// swept over the oversampling domains and transfer tolerances it uses.
    pub fn rows(&self) -> Result<Vec<Row>> {
        if !self.rows.is_empty() {
            return self.rows.iter().map(parse_row).collect();
        }
        let omegas = self
            .omega_e
            .iter()
            .map(|s| parse_omega(s))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::new();
        for v in &self.variants {
            let variant: Variant = v.parse().map_err(|e: vcdt_core::Error| BenchError::Config(e.to_string()))?;
            match variant {
                Variant::Gdsw | Variant::Agdsw => out.push(Row {
                    variant,
                    omega_e: None,
                    tol_tr: None,
                }),
                Variant::Vcd => {
                    for &o in omegas.iter().flatten() {
                        out.push(Row {
                            variant,
                            omega_e: Some(o),
                            tol_tr: None,
                        });
                    }
                }
                Variant::Vct(_) | Variant::Vcdt(_) => {
                    for &o in omegas.iter().flatten() {
                        for &t in &self.tol_tr {
                            out.push(Row {
                                variant,
                                omega_e: Some(o),
                                tol_tr: Some(t),
                            });
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(BenchError::Config("no rows to run".into()));
        }
        Ok(out)
    }
}

/// `"-"` and `"pair"` mean no oversampling domain.
pub fn parse_omega(s: &str) -> Result<Option<OmegaSpec>> {
    match s.trim() {
        "-" | "pair" | "" => Ok(None),
        t => match t.parse().map_err(|e: vcdt_core::Error| BenchError::Config(e.to_string()))? {
            OmegaSpec::Layers(k) if k < 2 => Err(BenchError::Config(format!(
                "oversampling domain '{t}' needs at least 2 layers"
            ))),
            o => Ok(Some(o)),
        },
    }
}

fn parse_row(r: &RowSpec) -> Result<Row> {
    let variant: Variant = r
        .variant
        .parse()
        .map_err(|e: vcdt_core::Error| BenchError::Config(e.to_string()))?;
    let omega_e = match &r.omega_e {
        Some(s) => parse_omega(s)?,
        None => None,
    };
    let needs_omega = matches!(variant, Variant::Vcd | Variant::Vct(_) | Variant::Vcdt(_));
    if needs_omega && omega_e.is_none() {
        return Err(BenchError::Config(format!("{variant} row needs omega_e")));
    }
    let tol_tr = if variant.uses_transfer() {
        Some(r.tol_tr.unwrap_or(1e5))
    } else {
        None
    };
    if tol_tr.is_some_and(|t| !(t > 0.0)) {
        return Err(BenchError::Config("tol_tr must be positive".into()));
    }
    Ok(Row {
        variant,
        omega_e: if variant == Variant::Gdsw { None } else { omega_e },
        tol_tr,
    })
}

/// Parses `"a..b"` or a comma-separated list.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || BenchError::Config(format!("invalid seed list '{s}'"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b <= a {
            return Err(bad());
        }
        return Ok((a..b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}
