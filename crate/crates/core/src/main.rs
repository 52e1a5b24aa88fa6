use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use torick::io::{load_cone, load_model};
use torick::report::{self, Outcome, DEFAULT_SEED};
use torick::TorickError;

const EXIT_SCHEMA: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

/// Exact normalized volumes, Donaldson-Futaki invariants and discrepancies of toric models.
#[derive(Parser)]
#[command(name = "torick", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Also write the report (for `path`: the CSV samples) to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Normalized volume of a model.
    Volume { model: PathBuf },
    /// Donaldson-Futaki invariant of a model.
    Df {
        model: PathBuf,
        /// Recompute DF as a derivative of the volume and fail on disagreement.
        #[arg(long)]
        derivative_check: bool,
    },
    /// DF along L + tE over the relative nef interval.
    Path {
        model: PathBuf,
        /// `zero`, `canonical`, `ray:<i>` or comma-separated coefficients.
        direction: String,
        #[arg(long, default_value_t = 11)]
        samples: usize,
    },
    /// Terminal / canonical classification of a cone.
    Classify { cone: PathBuf },
    /// Bounded search for birational models with negative DF.
    Search {
        cone: PathBuf,
        #[arg(long, default_value_t = 3)]
        bound: u32,
    },
    /// Central fiber multiplicities over the marked base ray.
    Multiplicities { model: PathBuf },
    /// Invariance of V and DF under random star subdivisions.
    PullbackCheck {
        model: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_corruption: bool,
    },
}

/// Existing paths are used as given; otherwise the name is looked up in the fixture directory.
fn resolve(p: &Path) -> PathBuf {
    if p.exists() {
        return p.to_path_buf();
    }
    let dir = std::env::var_os("TORICK_FIXTURES")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    let candidate = dir.join(p);
    if candidate.exists() {
        candidate
    } else {
        p.to_path_buf()
    }
}

fn run(cli: &Cli) -> Result<(Outcome, Option<String>), TorickError> {
    Ok(match &cli.command {
        Command::Volume { model } => (report::volume(&load_model(&resolve(model))?)?, None),
        Command::Df { model, derivative_check } => (report::df(&load_model(&resolve(model))?, *derivative_check)?, None),
        Command::Path { model, direction, samples } => {
            let (o, csv) = report::path(&load_model(&resolve(model))?, direction, *samples)?;
            (o, Some(csv))
        }
        Command::Classify { cone } => (report::classify_cone(&load_cone(&resolve(cone))?)?, None),
        Command::Search { cone, bound } => (report::search(&load_cone(&resolve(cone))?, *bound)?, None),
        Command::Multiplicities { model } => (report::multiplicities(&load_model(&resolve(model))?)?, None),
        Command::PullbackCheck { model, trials, seed, inject_corruption } => {
            eprintln!("pullback-check: seed {seed}, {trials} trials");
            (report::pullback_check(&load_model(&resolve(model))?, *trials, *seed, *inject_corruption)?, None)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, csv) = match run(&cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("torick: {e}");
            return ExitCode::from(if e.is_schema() { EXIT_SCHEMA } else { EXIT_PRECONDITION });
        }
    };
    let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    println!("{text}");
    if let Some(out) = &cli.out {
        let body = csv.unwrap_or_else(|| format!("{text}\n"));
        if let Err(e) = fs::write(out, body) {
            eprintln!("torick: cannot write {}: {e}", out.display());
            return ExitCode::from(EXIT_SCHEMA);
        }
    }
    if outcome.mismatch {
        eprintln!("torick: cross-check mismatch");
        return ExitCode::from(EXIT_MISMATCH);
    }
    ExitCode::SUCCESS
}
