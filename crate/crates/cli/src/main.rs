//! Batch front end for induced-rate computations, sweeps, oracle checks and property suites.

mod commands;
mod config;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Failure, Outcome};
use config::{Format, RunConfig};

#[derive(Parser)]
#[command(name = "envqdd", version, about = "Decoherence induced by a driven, fast-dissipating environment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration document.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override a configuration entry by dotted path, e.g. `model.n_th=0.05`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed of the randomized property suites.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for grid evaluation; 0 uses all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Closed-form, linear-solve, Floquet and asymptotic rates at one parameter point.
    Rates,
    /// Stationary elimination of a tunable two-level environment against its closed form.
    Eliminate,
    /// Rates over a one- or two-axis parameter grid.
    Sweep,
    /// Reduced-model eigenvalues against the monodromy of the full model.
    Oracle,
    /// Randomized property suites; exits 1 if any instance fails.
    Props,
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), &cli.set).map_err(Failure::Usage)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    let Outcome { doc, failed } = match cli.command {
        Command::Rates => commands::rates(&cfg)?,
        Command::Eliminate => commands::eliminate(&cfg)?,
        Command::Sweep => commands::sweep(&cfg)?,
        Command::Oracle => commands::oracle(&cfg)?,
        Command::Props => commands::props(&cfg)?,
    };
    let mut out: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Usage(anyhow::anyhow!("--out {}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };
    doc.write(cfg.format, &mut out).and_then(|_| Ok(out.flush()?)).map_err(Failure::Compute)?;
    for w in &doc.warnings {
        eprintln!("warning: {w}");
    }
    Ok(failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("error: one or more computations failed, see the error column");
            ExitCode::from(1)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
