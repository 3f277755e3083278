//! `unidioph`: displacement distributions and Dirichlet-type bound
//! verification on compact groups, from the command line.
//!
//! Exit codes: 0 success, 1 bound violation detected (or replay mismatch),
//! 2 usage error, 3 numerical failure.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use commands::{CliError, CommandOutput, Format};
use manifest::Manifest;

#[derive(Parser)]
#[command(name = "unidioph", version, about = "Displacement metrics and Dirichlet-type bounds on compact groups")]
struct Cli {
    /// Worker count for Monte Carlo splitting and search parallelism
    #[arg(long, global = true, env = "UNIDIOPH_WORKERS", default_value_t = 1,
          value_parser = clap::value_parser!(u32).range(1..=4096))]
    workers: u32,

    /// Write an experiment manifest (parameters, seed, version, result) here
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    /// Output format; curve commands default to csv, everything else to json
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Displacement of one unitary matrix
    Phi(commands::PhiArgs),
    /// Distribution function estimate at a single threshold
    PhiDist(commands::PhiDistArgs),
    /// Distribution function over a threshold grid (CSV)
    PhiCurve(commands::PhiCurveArgs),
    /// Minimal pairwise displacement of a finite set of unitaries
    DeltaSet(commands::DeltaSetArgs),
    /// Minimal displacement among powers of one unitary
    DeltaPowers(commands::DeltaPowersArgs),
    /// Minimal displacement over two-letter words A^j B^k
    DeltaJk(commands::DeltaJkArgs),
    /// Exploratory three-letter word search (conjectural bound)
    DeltaJkl(commands::DeltaJklArgs),
    /// Randomized verification of the proven bounds
    Verify(commands::VerifyArgs),
    /// Lattice search on the torus
    TorusDelta(commands::TorusDeltaArgs),
    /// Closed-form / empirical torus distribution curve (CSV)
    TorusPhiCurve(commands::TorusPhiCurveArgs),
    /// Exact checks on finite group actions
    #[command(subcommand)]
    Finite(FiniteCommand),
    /// Re-run a manifest and compare payloads byte-for-byte
    Replay(ReplayArgs),
}

#[derive(Subcommand)]
enum FiniteCommand {
    /// Sweep the separation inequality over subsets, in exact rationals
    Verify(commands::FiniteVerifyArgs),
}

#[derive(Debug, Clone, clap::Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
}

fn params_of<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("args serialize")
}

/// Default output format per command; only curves are tabular.
fn default_format(command: &str) -> Format {
    match command {
        "phi-curve" | "torus-phi-curve" => Format::Csv,
        _ => Format::Json,
    }
}

/// Single dispatch point used by fresh runs and replays alike.
fn dispatch(
    command: &str,
    params: serde_json::Value,
    workers: u32,
    format: Format,
) -> Result<CommandOutput, CliError> {
    fn parse<T: serde::de::DeserializeOwned>(params: serde_json::Value) -> Result<T, CliError> {
        serde_json::from_value(params)
            .map_err(|e| CliError::Usage(format!("bad parameters: {e}")))
    }
    if format == Format::Csv && !matches!(command, "phi-curve" | "torus-phi-curve") {
        return Err(CliError::Usage(format!(
            "--format csv is only available for tabular commands, not {command}"
        )));
    }
    match command {
        "phi" => commands::run_phi(&parse(params)?),
        "phi-dist" => commands::run_phi_dist(&parse(params)?, workers),
        "phi-curve" => commands::run_phi_curve(&parse(params)?, workers, format),
        "delta-set" => commands::run_delta_set(&parse(params)?),
        "delta-powers" => commands::run_delta_powers(&parse(params)?),
        "delta-jk" => commands::run_delta_jk(&parse(params)?),
        "delta-jkl" => commands::run_delta_jkl(&parse(params)?),
        "verify" => commands::run_verify(&parse(params)?),
        "torus-delta" => commands::run_torus_delta(&parse(params)?),
        "torus-phi-curve" => commands::run_torus_phi_curve(&parse(params)?, workers, format),
        "finite-verify" => commands::run_finite_verify(&parse(params)?),
        other => Err(CliError::Usage(format!("unknown command {other:?} in manifest"))),
    }
}

fn run(cli: Cli) -> Result<(CommandOutput, String), CliError> {
    let (name, params): (&str, serde_json::Value) = match &cli.command {
        Command::Phi(a) => ("phi", params_of(a)),
        Command::PhiDist(a) => ("phi-dist", params_of(a)),
        Command::PhiCurve(a) => ("phi-curve", params_of(a)),
        Command::DeltaSet(a) => ("delta-set", params_of(a)),
        Command::DeltaPowers(a) => ("delta-powers", params_of(a)),
        Command::DeltaJk(a) => ("delta-jk", params_of(a)),
        Command::DeltaJkl(a) => ("delta-jkl", params_of(a)),
        Command::Verify(a) => ("verify", params_of(a)),
        Command::TorusDelta(a) => ("torus-delta", params_of(a)),
        Command::TorusPhiCurve(a) => ("torus-phi-curve", params_of(a)),
        Command::Finite(FiniteCommand::Verify(a)) => ("finite-verify", params_of(a)),
        Command::Replay(args) => {
            return run_replay(args);
        }
    };
    let format = cli.format.unwrap_or_else(|| default_format(name));
    let format_str = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let output = dispatch(name, params.clone(), cli.workers, format)?;
    if let Some(path) = &cli.manifest {
        let m = Manifest::new(name, params, cli.workers, format_str, &output.payload);
        m.write(path)
            .map_err(|e| CliError::Usage(format!("--manifest {}: {e}", path.display())))?;
        eprintln!("manifest written to {}", path.display());
    }
    Ok((output, String::new()))
}

/// Re-execute a manifest with its stored parameters and worker count; the
/// regenerated payload must match the stored one byte-for-byte.
fn run_replay(args: &ReplayArgs) -> Result<(CommandOutput, String), CliError> {
    let m = Manifest::read(&args.manifest).map_err(CliError::Usage)?;
    if m.version != env!("CARGO_PKG_VERSION") {
        eprintln!(
            "warning: manifest written by version {}, this is {}",
            m.version,
            env!("CARGO_PKG_VERSION")
        );
    }
    let format = match m.format.as_str() {
        "csv" => Format::Csv,
        _ => Format::Json,
    };
    let output = dispatch(&m.command, m.params.clone(), m.workers, format)?;
    let matches = output.payload == m.result;
    let note = if matches {
        format!("replay of {:?} reproduced the stored payload", m.command)
    } else {
        format!("replay of {:?} DIVERGED from the stored payload", m.command)
    };
    Ok((
        CommandOutput {
            payload: output.payload,
            violation: !matches,
        },
        note,
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers as usize)
        .build_global()
        .ok();
    match run(cli) {
        Ok((output, note)) => {
            if output.payload.ends_with('\n') {
                print!("{}", output.payload);
            } else {
                println!("{}", output.payload);
            }
            if !note.is_empty() {
                eprintln!("{note}");
            }
            if output.violation {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
