//! `typeground`: build typing resources, type mentions and score predictions.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ParamArgs, ResourceArgs};

#[derive(Debug, Parser)]
#[command(name = "typeground", version, about = "Zero-shot entity typing over a linked corpus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the word to concept index from the corpus
    BuildIndex(BuildArgs),
    /// Count surface to concept links in the corpus
    BuildPriors(BuildArgs),
    /// Average sentence vectors per concept
    BuildReps(BuildArgs),
    /// Type query mentions, one prediction per input line
    Type(TypeArgs),
    /// Score predictions against gold types
    Evaluate(EvaluateArgs),
    /// Fraction of mentions whose gold types are covered by the top candidates
    Coverage(CoverageArgs),
    /// Nearest type representation baseline
    BaselineElmonn(BaselineArgs),
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[command(flatten)]
    res: ResourceArgs,
    /// Output file; defaults to the matching path in the config
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TypeArgs {
    #[command(flatten)]
    res: ResourceArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// Query mentions (JSON lines); standard input when omitted
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Prediction records; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Mentions with gold_types (JSON lines)
    #[arg(long)]
    gold: PathBuf,
    /// Prediction records in the same order
    #[arg(long)]
    pred: PathBuf,
    /// Write the JSON report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a per-type TSV breakdown here
    #[arg(long)]
    per_type: Option<PathBuf>,
    /// Print only the JSON report
    #[arg(long)]
    json_only: bool,
}

#[derive(Debug, Args)]
struct CoverageArgs {
    #[command(flatten)]
    res: ResourceArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// Mentions with gold_types (JSON lines)
    #[arg(long = "in")]
    input: PathBuf,
    /// Largest number of retrieved concepts to report
    #[arg(long, default_value_t = 300)]
    max_ell: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    #[command(flatten)]
    res: ResourceArgs,
    /// Query mentions (JSON lines); standard input when omitted
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of nearest types to predict
    #[arg(short, long, default_value_t = 1)]
    k: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
            eprintln!("{line}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::BuildIndex(a) => commands::build_index(&a.res, a.out),
        Command::BuildPriors(a) => commands::build_priors(&a.res, a.out),
        Command::BuildReps(a) => commands::build_reps(&a.res, a.out),
        Command::Type(a) => commands::type_mentions(&a.res, &a.params, a.input, a.out),
        Command::Evaluate(a) => commands::evaluate(&a.gold, &a.pred, a.out, a.per_type, a.json_only),
        Command::Coverage(a) => commands::coverage(&a.res, &a.params, &a.input, a.max_ell, a.out),
        Command::BaselineElmonn(a) => commands::baseline(&a.res, a.input, a.out, a.k),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
