//! CSV and markdown tables of row results.

use crate::run::{RowResult, Stat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(format!("unknown format '{s}'")),
        }
    }
}

/// Condition numbers at or above 1e3 in scientific notation.
pub fn format_kappa(k: f64) -> String {
    if !k.is_finite() {
        "nan".into()
    } else if k.abs() >= 1e3 {
        format!("{k:.1e}")
    } else {
        format!("{k:.1}")
    }
}

fn format_count(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.1}")
    }
}

fn tol_label(r: &RowResult) -> String {
    r.row.tol_tr.map_or_else(|| "-".into(), |t| format!("{t:e}"))
}

fn with_max(s: Stat, multi: bool, f: fn(f64) -> String) -> String {
    if multi {
        format!("{} ({})", f(s.mean), f(s.max))
    } else {
        f(s.mean)
    }
}

pub fn emit(rows: &[RowResult], format: Format) -> String {
    match format {
        Format::Csv => csv(rows),
        Format::Markdown => markdown(rows),
    }
}

fn csv(rows: &[RowResult]) -> String {
    let mut out = String::from(
        "variant,omega_e,tol_tr,dim,dim_pre,kappa,its,seeds,dim_max,dim_pre_max,kappa_max,its_max,status\n",
    );
    for r in rows {
        let status = r.error.as_deref().map_or_else(|| "ok".to_string(), |e| e.replace([',', '\n'], ";"));
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.row.variant,
            r.row.omega_label(),
            tol_label(r),
            format_count(r.dim.mean),
            format_count(r.dim_pre.mean),
            format_kappa(r.kappa.mean),
            format_count(r.its.mean),
            r.seeds,
            format_count(r.dim.max),
            format_count(r.dim_pre.max),
            format_kappa(r.kappa.max),
            format_count(r.its.max),
            status,
        ));
    }
    out
}

fn markdown(rows: &[RowResult]) -> String {
    let mut out = String::from("| variant | Ω_e | tol_tr | dim | κ | its |\n|---|---|---|---|---|---|\n");
    for r in rows {
        let multi = r.seeds > 1;
        let dim = format!(
            "{} / {}",
            with_max(r.dim, multi, format_count),
            with_max(r.dim_pre, multi, format_count)
        );
        let (kappa, its) = match &r.error {
            Some(e) if r.dim.mean.is_nan() => (format!("failed: {e}"), "-".to_string()),
            _ => (
                with_max(r.kappa, multi, format_kappa),
                with_max(r.its, multi, format_count),
            ),
        };
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            r.row.variant,
            r.row.omega_label(),
            tol_label(r),
            dim,
            kappa,
            its
        ));
    }
    out
}
