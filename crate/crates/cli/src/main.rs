//! `qmono`: accessible-information bounds, LOCC protocols and monogamy audits.

mod commands;
mod render;
mod reproduce;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "qmono", version, about)]
struct Cli {
    /// Worker threads for sampling and restarts (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the values claimed for a case group (I..V) or registry id.
    Reproduce {
        /// Group I, II, III, IV or V, or a single registry id.
        #[arg(long)]
        case: String,
        /// Party count for group III (default: 2, 5, 10 and 20).
        #[arg(long)]
        n: Option<usize>,
        /// Angle for group IV.
        #[arg(long)]
        theta: Option<f64>,
        #[command(flatten)]
        search: Search,
    },
    /// Holevo, subentropy, LOCC and cardinality bounds.
    Bounds {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        search: Search,
    },
    /// Run or export measurement protocols.
    #[command(subcommand)]
    Protocol(ProtocolCommand),
    /// Search measurement strategies for a certified lower bound.
    Optimize {
        #[command(flatten)]
        source: Source,
        /// Default: one-way for bipartite ensembles, global otherwise.
        #[arg(long, value_enum)]
        template: Option<TemplateArg>,
        /// Which party measures first in the one-way template.
        #[arg(long, value_enum, default_value_t = DirectionArg::Both)]
        direction: DirectionArg,
        #[command(flatten)]
        search: Search,
    },
    /// Audit the pairwise monogamy relation.
    Monogamy {
        #[command(flatten)]
        source: Source,
        /// Use only registered protocols and sampled bounds.
        #[arg(long)]
        no_optimizer: bool,
        #[command(flatten)]
        search: Search,
    },
    /// Validate or export ensembles.
    #[command(subcommand)]
    Ensemble(EnsembleCommand),
}

#[derive(Subcommand)]
enum ProtocolCommand {
    /// Simulate a protocol file and report its mutual information.
    Run {
        /// Protocol file.
        #[arg(long)]
        protocol: PathBuf,
        #[command(flatten)]
        source: Source,
    },
    /// Print a built-in protocol as a protocol file.
    Export {
        #[arg(value_enum)]
        name: BuiltinProtocol,
        /// Party dimensions for `computational`.
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum EnsembleCommand {
    /// Load and check an ensemble.
    Validate {
        #[command(flatten)]
        source: Source,
    },
    /// Print an ensemble (optionally a pair reduction) as an ensemble file.
    Export {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuiltinProtocol {
    Shifts,
    Computational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TemplateArg {
    OneWay,
    Global,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    #[value(name = "a-b")]
    AToB,
    #[value(name = "b-a")]
    BToA,
    Both,
}

#[derive(Args, Clone, Debug)]
pub struct Source {
    /// Registry id, e.g. V-shifts, III-cat, IV-nonorth.
    #[arg(long)]
    case: Option<String>,
    /// Ensemble file.
    #[arg(long)]
    ensemble: Option<PathBuf>,
    /// Party count N for III-cat.
    #[arg(long)]
    n: Option<usize>,
    /// Angle for IV-nonorth.
    #[arg(long)]
    theta: Option<f64>,
    /// Restrict to a pair, e.g. A:B1.
    #[arg(long)]
    pair: Option<String>,
}

#[derive(Args, Clone, Debug)]
pub struct Search {
    /// Optimizer restarts (default 64). Needs a seed.
    #[arg(long)]
    restarts: Option<usize>,
    /// Monte Carlo samples for the local subentropy bound. Needs a seed.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for restarts and sampling.
    #[arg(long, env = "QMONO_SEED")]
    seed: Option<u64>,
}

/// A failed run: exit code 1 for reproduction mismatches, 2 for bad input.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<qmono::Error> for Failure {
    fn from(e: qmono::Error) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

/// Text to emit and whether every reproduction check passed.
pub struct Output {
    pub text: String,
    pub passed: bool,
}

fn dispatch(command: Command, format: Format) -> Result<Output, Failure> {
    match command {
        Command::Reproduce { case, n, theta, search } => reproduce::run(&case, n, theta, &search, format),
        Command::Bounds { source, search } => commands::bounds(&source, &search, format),
        Command::Protocol(ProtocolCommand::Run { protocol, source }) => {
            commands::protocol_run(&protocol, &source, format)
        }
        Command::Protocol(ProtocolCommand::Export { name, dims }) => commands::protocol_export(name, &dims),
        Command::Optimize {
            source,
            template,
            direction,
            search,
        } => commands::optimize(&source, template, direction, &search, format),
        Command::Monogamy {
            source,
            no_optimizer,
            search,
        } => commands::monogamy(&source, !no_optimizer, &search, format),
        Command::Ensemble(EnsembleCommand::Validate { source }) => commands::ensemble_validate(&source, format),
        Command::Ensemble(EnsembleCommand::Export { source }) => commands::ensemble_export(&source),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli.command, cli.format) {
        Ok(output) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &output.text),
                None => {
                    print!("{}", output.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if output.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
