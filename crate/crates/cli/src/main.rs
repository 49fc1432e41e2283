use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use krusk_core::{Backend, Tolerance};

mod commands;
mod report;
mod selftest;

use commands::{GenRequest, Settings};
use report::Outcome;

/// Kruskal-rank uniqueness certificates for CP decompositions.
///
/// Exit status: 0 when the verdict is positive, 1 when it is negative,
/// 2 on usage or input errors.
#[derive(Parser)]
#[command(name = "krusk", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Arithmetic backend [default: that of the input documents; exact for gen]
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    /// Relative rank threshold of the float backend
    #[arg(long, global = true, env = "KRUSK_TOL", default_value_t = Tolerance::DEFAULT)]
    tol: f64,
    /// Seed for gen
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print a machine-readable report
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Kruskal rank of a point set
    Krank { pointset: PathBuf },
    /// Uniqueness certificate of a decomposition
    Certify { decomposition: PathBuf },
    /// Tensor represented by a decomposition
    Compose {
        decomposition: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Look for a permutation and scalings taking one decomposition to another
    Compare { first: PathBuf, second: PathBuf },
    /// Rank of a flattening; writes the matrix with -o
    Flatten {
        tensor: PathBuf,
        /// Row modes, 0-based and comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        modes: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check the permutation lemma on point sets S and S~
    LemmaCheck { s: PathBuf, s_tilde: PathBuf },
    /// Sylvester rank inequality for a matrix and subspaces spanned by point sets
    Sylvester {
        matrix: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
    },
    /// Generate a seeded instance
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Run the built-in regression examples
    Selftest,
}

#[derive(Args)]
struct Coeffs {
    /// Inclusive integer range for entries, e.g. -3..3
    #[arg(long, default_value = "-3..3", allow_hyphen_values = true, value_parser = commands::parse_range)]
    coeffs: std::ops::RangeInclusive<i64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    Decomposition {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        rank: usize,
        #[command(flatten)]
        common: Coeffs,
    },
    /// Composed tensor of a generated decomposition
    Tensor {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        rank: usize,
        #[command(flatten)]
        common: Coeffs,
    },
    Pointset {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        count: usize,
        #[command(flatten)]
        common: Coeffs,
    },
    Matrix {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[command(flatten)]
        common: Coeffs,
    },
    /// Reorder and rescale the terms of a decomposition
    Scramble {
        decomposition: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let settings = Settings {
        backend: cli.global.backend.map(|b| match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        }),
        tol: Tolerance::new(cli.global.tol)?,
        seed: cli.global.seed,
    };
    let s = &settings;
    match &cli.command {
        Command::Krank { pointset } => commands::krank(pointset, s),
        Command::Certify { decomposition } => commands::certify(decomposition, s),
        Command::Compose {
            decomposition,
            output,
        } => commands::compose_cmd(decomposition, output.as_deref(), s),
        Command::Compare { first, second } => commands::compare(first, second, s),
        Command::Flatten {
            tensor,
            modes,
            output,
        } => commands::flatten(tensor, modes, output.as_deref(), s),
        Command::LemmaCheck { s: p, s_tilde } => commands::lemma_check(p, s_tilde, s),
        Command::Sylvester { matrix, u, v } => commands::sylvester(matrix, u, v, s),
        Command::Gen { what } => {
            let (req, output) = match what {
                GenCommand::Decomposition { dims, rank, common } => (
                    GenRequest::Decomposition {
                        dims: dims.clone(),
                        rank: *rank,
                        coeffs: common.coeffs.clone(),
                    },
                    &common.output,
                ),
                GenCommand::Tensor { dims, rank, common } => (
                    GenRequest::Tensor {
                        dims: dims.clone(),
                        rank: *rank,
                        coeffs: common.coeffs.clone(),
                    },
                    &common.output,
                ),
                GenCommand::Pointset { dim, count, common } => (
                    GenRequest::PointSet {
                        dim: *dim,
                        count: *count,
                        coeffs: common.coeffs.clone(),
                    },
                    &common.output,
                ),
                GenCommand::Matrix { rows, cols, common } => (
                    GenRequest::Matrix {
                        rows: *rows,
                        cols: *cols,
                        coeffs: common.coeffs.clone(),
                    },
                    &common.output,
                ),
                GenCommand::Scramble {
                    decomposition,
                    output,
                } => (
                    GenRequest::Scramble {
                        decomposition: decomposition.clone(),
                    },
                    output,
                ),
            };
            commands::gen_cmd(&req, output.as_deref(), s)
        }
        Command::Selftest => Ok(selftest::run()),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Krank { .. } => "krank",
        Command::Certify { .. } => "certify",
        Command::Compose { .. } => "compose",
        Command::Compare { .. } => "compare",
        Command::Flatten { .. } => "flatten",
        Command::LemmaCheck { .. } => "lemma-check",
        Command::Sylvester { .. } => "sylvester",
        Command::Gen { .. } => "gen",
        Command::Selftest => "selftest",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if let Some(doc) = &outcome.document {
                print!("{doc}");
            } else if cli.global.json {
                print!("{}", outcome.to_json(command_name(&cli.command)));
            } else {
                println!("{}", outcome.text);
            }
            ExitCode::from(if outcome.positive { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("krusk: error: {e:#}");
            ExitCode::from(2)
        }
    }
}
