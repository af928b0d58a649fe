use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vcdt_bench::{emit, export_matrix, parse_seeds, run, spectra_csv, ExperimentConfig, Format, Overrides};

#[derive(Parser)]
#[command(version, about = "Adaptive two-level Schwarz coarse space experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Sweep {
    /// Variants to run, replacing the config list.
    #[arg(long = "variant", value_delimiter = ',')]
    variants: Option<Vec<String>>,
    #[arg(long = "tol-tr", value_delimiter = ',')]
    tol_tr: Option<Vec<f64>>,
    /// Oversampling domains such as 2h, 5h or H.
    #[arg(long = "omega-e", value_delimiter = ',')]
    omega_e: Option<Vec<String>>,
    /// Seeds as `a..b` or a comma-separated list.
    #[arg(long)]
    seeds: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every row of a config and print a table.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "markdown")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// Dump the edge eigenvalue spectra of one edge as CSV.
    Spectra {
        config: PathBuf,
        #[arg(long)]
        edge: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the assembled matrix and its partition.
    ExportMatrix {
        config: PathBuf,
        #[arg(long = "out")]
        matrix: PathBuf,
        partition: PathBuf,
        #[arg(long)]
        rhs: Option<PathBuf>,
    },
}

fn load(path: &PathBuf, sweep: Option<&Sweep>) -> Result<ExperimentConfig, String> {
    let mut cfg = ExperimentConfig::load(path).map_err(|e| e.to_string())?;
    if let Some(s) = sweep {
        let seeds = s.seeds.as_deref().map(parse_seeds).transpose().map_err(|e| e.to_string())?;
        cfg.apply(&Overrides {
            variants: s.variants.clone(),
            tol_tr: s.tol_tr.clone(),
            omega_e: s.omega_e.clone(),
            seeds,
        });
    }
    Ok(cfg)
}

fn write_out(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            config,
            format,
            out,
            sweep,
        } => load(config, Some(sweep)).and_then(|cfg| {
            let rows = run(&cfg).map_err(|e| e.to_string())?;
            write_out(&emit(&rows, *format), out.as_ref())?;
            let failed = rows.iter().filter(|r| !r.ok()).count();
            for r in rows.iter().filter(|r| !r.ok()) {
                eprintln!(
                    "row {} {} failed: {}",
                    r.row.variant,
                    r.row.omega_label(),
                    r.error.as_deref().unwrap_or("")
                );
            }
            if failed > 0 {
                Err(format!("{failed} of {} rows failed", rows.len()))
            } else {
                Ok(())
            }
        }),
        Command::Spectra { config, edge, out } => load(config, None).and_then(|cfg| {
            let csv = spectra_csv(&cfg, *edge).map_err(|e| e.to_string())?;
            write_out(&csv, out.as_ref())
        }),
        Command::ExportMatrix {
            config,
            matrix,
            partition,
            rhs,
        } => load(config, None)
            .and_then(|cfg| export_matrix(&cfg, matrix, partition, rhs.as_deref()).map_err(|e| e.to_string())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
