use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ionberry::commands::{run, Command};
use ionberry::config::RunConfig;

/// Berry phases of a spin-3/2 ion in a rotating quadrupole field, and the
/// electrostatics of the trap that produces it.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// JSON run configuration; the defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
    /// Reserved; every method is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Closed-form and numerical Berry phases over the θ grid.
    Phases,
    /// Phase-shifted energies, doublet splittings and Floquet residuals.
    Spectrum,
    /// One-period time evolution, or the ε-sweep crossover table.
    Evolve,
    /// Wilczek–Zee holonomies of the degenerate doublets.
    Holonomy,
    /// Floquet quasi-energies against the rotating-frame and shifted spectra.
    Floquet,
    /// Trap solve: field traces, diagonal fit and effective tilt.
    Trap,
    /// Diagonal potential fits at several drive amplitudes.
    FitPotential,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Phases => Command::Phases,
            Sub::Spectrum => Command::Spectrum,
            Sub::Evolve => Command::Evolve,
            Sub::Holonomy => Command::Holonomy,
            Sub::Floquet => Command::Floquet,
            Sub::Trap => Command::Trap,
            Sub::FitPotential => Command::FitPotential,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let loaded = match &cli.config {
        Some(p) => RunConfig::from_file(p),
        None => Ok(RunConfig::default()),
    };
    let mut cfg = match loaded {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(dir) = cli.out {
        cfg.output.dir = dir;
    }
    if cli.seed.is_some() {
        log::debug!("--seed is accepted but unused");
    }
    if cli.print_config {
        println!("{}", cfg.to_json_pretty());
        return ExitCode::SUCCESS;
    }
    let Some(sub) = cli.command else {
        eprintln!("error: no subcommand given (see --help)");
        return ExitCode::from(2);
    };
    let base = cli
        .config
        .as_deref()
        .and_then(Path::parent)
        .map(Path::to_path_buf)
        .unwrap_or_default();
    match run(sub.into(), &cfg, &base) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
