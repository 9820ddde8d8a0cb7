//! `tempeval`: validate, score, merge, close and count TimeML corpora.

mod commands;
mod style;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "tempeval", version, about = "TimeML corpus validation, scoring, merging and closure")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for per-document work (default: one per processor).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Suppress warnings and progress notes.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check datafiles against the format and model rules.
    Validate(ValidateArgs),
    /// Score a response corpus against a reference corpus.
    Score(ScoreArgs),
    /// Merge several systems' annotations into one corpus.
    Merge(MergeArgs),
    /// Check or materialize the temporal closure of one document.
    Closure(ClosureArgs),
    /// Report corpus size statistics.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileArg {
    Structural,
    Gold,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Files or directories of `.tml` files.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "structural")]
    profile: ProfileArg,
    /// Descend into subdirectories.
    #[arg(long)]
    recursive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TaskArg {
    /// Temporal expressions.
    #[value(name = "A", alias = "a")]
    A,
    /// Events.
    #[value(name = "B", alias = "b")]
    B,
    /// Temporal relations.
    #[value(name = "C", alias = "c")]
    C,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Relaxed,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[arg(long, value_name = "DIR")]
    reference: PathBuf,
    #[arg(long, value_name = "DIR")]
    response: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    task: TaskArg,
    #[arg(long, value_enum, default_value = "relaxed")]
    mode: ModeArg,
    /// Also score event TENSE, ASPECT, POLARITY, MODALITY and POS.
    #[arg(long)]
    all_attributes: bool,
    /// Verify every stated link instead of a non-redundant core.
    #[arg(long)]
    no_reduce: bool,
    #[arg(long)]
    recursive: bool,
}

#[derive(Debug, Args)]
struct MergeArgs {
    /// JSON file listing systems, weights, the best system and the threshold.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Directory for the merged `.tml` files.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Keep inconsistent merged relations instead of dropping the weakest.
    #[arg(long)]
    no_repair: bool,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("action").required(true).args(["check", "emit"]))]
struct ClosureArgs {
    file: PathBuf,
    /// Report whether the links are consistent.
    #[arg(long)]
    check: bool,
    /// Write the document with its links replaced by the closure.
    #[arg(long)]
    emit: bool,
    /// With --emit, write a non-redundant subset of the stated links instead.
    #[arg(long, requires = "emit")]
    reduced: bool,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(required = true, value_name = "DIR")]
    dirs: Vec<PathBuf>,
    #[arg(long)]
    recursive: bool,
}

/// Exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Findings = 1,
    Usage = 2,
    Io = 3,
}

pub struct Context {
    pub json: bool,
    pub quiet: bool,
    pub color: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(Status::Usage as u8);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(Status::Usage as u8);
        }
    }
    let ctx = Context { json: cli.json, quiet: cli.quiet, color: style::color_enabled() };
    let status = match cli.command {
        Command::Validate(a) => commands::validate(&ctx, &a),
        Command::Score(a) => commands::score(&ctx, &a),
        Command::Merge(a) => commands::merge(&ctx, &a),
        Command::Closure(a) => commands::closure(&ctx, &a),
        Command::Stats(a) => commands::stats(&ctx, &a),
    };
    ExitCode::from(status as u8)
}
