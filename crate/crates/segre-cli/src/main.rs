use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use segre_cli::aggregate::{self, AlphaChoice};
use segre_cli::io::{DecompositionFile, PointsFile};
use segre_cli::{commands, demo, format_value, CliError};

/// Geometry of rank-1 tensors under warped metrics: geodesics, distances,
/// Fréchet means, and consensus aggregation of tensor decompositions.
#[derive(Parser)]
#[command(name = "segre", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Input JSON file; stdin when omitted.
    file: Option<PathBuf>,
    /// Warping factor; overrides the file's "alpha".
    #[arg(long)]
    alpha: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Follow a geodesic: point + tangent -> point.
    Exp(InputArgs),
    /// Connect two points: the initial velocity of the minimizing geodesic.
    Log {
        #[command(flatten)]
        input: InputArgs,
        /// Re-exponentiate the result and fail (exit 4) if the target is not
        /// reproduced within 1e-9.
        #[arg(long)]
        check: bool,
    },
    /// Geodesic distance between two points.
    Dist {
        /// Input JSON file; stdin when omitted.
        file: Option<PathBuf>,
        /// Warping factor; overrides the file's "alpha".
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Fréchet mean of all points in the input.
    Mean {
        #[command(flatten)]
        input: InputArgs,
        /// Seed for the interpolation order of the warm start.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Aggregate several rank-r decompositions into a consensus decomposition.
    Aggregate {
        /// Input JSON file; stdin when omitted.
        file: Option<PathBuf>,
        /// Warping factor: "auto" (connectedness-safe) or a number.
        #[arg(long, default_value = "auto")]
        alpha: String,
        /// Ground-truth decomposition; adds a relative-error report entry.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Seed for the mean warm starts.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample geodesics between (0,1) and (1,0) on the punctured plane,
    /// one CSV per warping factor.
    GeodesicDemo {
        /// Comma-separated warping factors in (0, 2).
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        /// Samples per trace.
        #[arg(long, default_value_t = 201)]
        samples: usize,
        /// Output directory for the CSV files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn read_input(path: &Option<PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Input(format!("cannot read stdin: {e}")))?;
            Ok(buf)
        }
    }
}

fn parse_points(raw: &str) -> Result<PointsFile, CliError> {
    serde_json::from_str(raw).map_err(|e| CliError::Input(format!("invalid JSON: {e}")))
}

fn parse_decompositions(raw: &str) -> Result<DecompositionFile, CliError> {
    serde_json::from_str(raw).map_err(|e| CliError::Input(format!("invalid JSON: {e}")))
}

fn emit<T: serde::Serialize>(value: &T, out: &Option<PathBuf>) -> Result<(), CliError> {
    let rendered = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Input(format!("cannot serialize output: {e}")))?;
    match out {
        Some(p) => std::fs::write(p, rendered + "\n")
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{rendered}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Exp(input) => {
            let file = parse_points(&read_input(&input.file)?)?;
            let out = commands::run_exp(&file, input.alpha)?;
            emit(&out, &input.out)
        }
        Command::Log { input, check } => {
            let file = parse_points(&read_input(&input.file)?)?;
            let (out, defect) = commands::run_log(&file, input.alpha, check)?;
            emit(&out, &input.out)?;
            if let Some(defect) = defect {
                if defect > 1e-9 {
                    return Err(CliError::NonConvergence(format!(
                        "exp(log) misses the target by {defect:e} > 1e-9"
                    )));
                }
            }
            Ok(())
        }
        Command::Dist { file, alpha } => {
            let parsed = parse_points(&read_input(&file)?)?;
            let (value, connected) = commands::run_dist(&parsed, alpha)?;
            println!(
                "{} {}",
                format_value(value),
                if connected {
                    "connected"
                } else {
                    "disconnected"
                }
            );
            Ok(())
        }
        Command::Mean { input, seed } => {
            let file = parse_points(&read_input(&input.file)?)?;
            let out = commands::run_mean(&file, input.alpha, seed)?;
            emit(&out, &input.out)
        }
        Command::Aggregate {
            file,
            alpha,
            truth,
            seed,
            out,
        } => {
            let parsed = parse_decompositions(&read_input(&file)?)?;
            let choice = AlphaChoice::parse(&alpha)?;
            let truth_parsed = match &truth {
                Some(p) => Some(parse_decompositions(&read_input(&Some(p.clone()))?)?),
                None => None,
            };
            let result = aggregate::run(&parsed, choice, truth_parsed.as_ref(), seed)?;
            for warning in &result.warnings {
                eprintln!("warning: {warning}");
            }
            emit(&result.output, &out)
        }
        Command::GeodesicDemo {
            alphas,
            samples,
            out,
        } => {
            let alphas = if alphas.is_empty() {
                demo::default_alphas()
            } else {
                alphas
            };
            let written = demo::run(&alphas, samples, &out)?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
