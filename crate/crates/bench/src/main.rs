use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use plad_bench::config::{load, MriConfig, SweepConfig, TheoryConfig};
use plad_bench::{mri, rerun, run_theory_report, sweep, BenchError};

#[derive(Parser)]
#[command(name = "plad-bench", version, about = "Sparse and image recovery experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Success rate versus sparsity for each alpha; writes sweep.csv and report.json.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Phantom reconstruction; writes PGM/PBM images and report.json.
    Mri {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recovery-condition report as JSON on stdout.
    Theory {
        #[arg(long)]
        config: PathBuf,
        /// Also write the JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a recorded result and compare it byte for byte.
    Rerun {
        #[arg(long)]
        result: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cmd: Cmd) -> Result<(), BenchError> {
    match cmd {
        Cmd::Sweep { config, out } => {
            let cfg: SweepConfig = load(&config)?;
            let art = sweep::sweep_artifacts(&cfg)?;
            art.write_to(&out)?;
            eprintln!("wrote {} to {}", art.names().join(", "), out.display());
        }
        Cmd::Mri { config, out } => {
            let cfg: MriConfig = load(&config)?;
            let art = mri::mri_artifacts(&cfg)?;
            art.write_to(&out)?;
            eprintln!("wrote {} files to {}", art.files.len(), out.display());
        }
        Cmd::Theory { config, out } => {
            let cfg: TheoryConfig = load(&config)?;
            let base = config.parent().unwrap_or(Path::new("."));
            let json = run_theory_report(&cfg, base)?.to_json();
            println!("{json}");
            if let Some(path) = out {
                std::fs::write(&path, format!("{json}\n"))
                    .map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
            }
        }
        Cmd::Rerun { result, out } => {
            let art = rerun(&result, out.as_deref())?;
            eprintln!("reproduced {} identically", art.names().join(", "));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
