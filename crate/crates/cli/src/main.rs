use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cpinterp_cli::error::CliError;
use cpinterp_cli::schema::ConfigDocument;
use cpinterp_cli::{cmd_analyze, cmd_decompose, cmd_numrange, cmd_synthesize, cmd_verify};
use cpinterp_core::pipeline::SynthesisClass;
use cpinterp_core::Config;

/// Decide existence of completely positive maps interpolating between
/// commuting Hermitian families and synthesize explicit realizations.
#[derive(Parser)]
#[command(name = "cpinterp", version, about)]
struct Cli {
    /// JSON file with tolerance/seed overrides.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for the randomized joint-diagonalization combinations.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Base feasibility tolerance (scaled by the data magnitude).
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report per-class feasibility verdicts with witness transfer matrices.
    Analyze { problem: PathBuf },
    /// Build a verified map of the requested class.
    Synthesize {
        problem: PathBuf,
        #[arg(long, value_enum)]
        class: ClassArg,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Re-verify a serialized map against a problem file.
    Verify { map: PathBuf, problem: PathBuf },
    /// Birkhoff-decompose a doubly stochastic matrix.
    Decompose { matrix: PathBuf },
    /// Numerical-range containment W(B) ⊆ W(A) by support-function sampling.
    Numrange {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        grid: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Cp,
    Unital,
    Tp,
    Utp,
    MixedUnitary,
    EqualWeight,
}

impl From<ClassArg> for SynthesisClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Cp => SynthesisClass::Cp,
            ClassArg::Unital => SynthesisClass::Unital,
            ClassArg::Tp => SynthesisClass::Tp,
            ClassArg::Utp => SynthesisClass::Utp,
            ClassArg::MixedUnitary => SynthesisClass::MixedUnitary,
            ClassArg::EqualWeight => SynthesisClass::EqualWeight,
        }
    }
}

fn build_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = Config::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
        let doc: ConfigDocument = serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("cannot parse config {}: {e}", path.display())))?;
        doc.apply(&mut cfg);
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = cli.tol {
        cfg.feas_tol = tol;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = build_config(cli)?;
    let (report, out) = match &cli.command {
        Command::Analyze { problem } => (cmd_analyze(problem, &cfg)?, None),
        Command::Synthesize { problem, class, out } => (
            cmd_synthesize(problem, SynthesisClass::from(*class), &cfg)?,
            out.clone(),
        ),
        Command::Verify { map, problem } => (cmd_verify(map, problem, &cfg)?, None),
        Command::Decompose { matrix } => (cmd_decompose(matrix, &cfg)?, None),
        Command::Numrange { a, b, grid } => (
            cmd_numrange(a, b, grid.unwrap_or(cfg.numrange_grid), &cfg)?,
            None,
        ),
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Internal(format!("report serialization failed: {e}")))?;
    match out {
        Some(path) => {
            fs::write(&path, json.as_bytes())
                .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("report written to {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
