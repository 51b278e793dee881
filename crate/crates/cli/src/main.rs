mod args;
mod commands;
mod config;
mod fingerset;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use args::{ExtractArgs, IdentifyArgs, PreprocessArgs, ReportArgs, SelectArgs, SynthArgs, VerifyArgs};

/// Finger-geometry biometrics: synthetic scans, finger isolation, shape
/// features, feature selection, identification and verification.
///
/// Every long flag may also be given as `key=value` in a `--config` file
/// (flags on the command line win). Each run writes `manifest.txt` to its
/// output directory; passing that manifest back as `--config` repeats the run.
///
/// Exit codes: 0 ok, 2 bad arguments, 3 stage failure, 4 I/O failure.
#[derive(Debug, Parser)]
#[command(name = "handgeom", version)]
pub struct Cli {
    /// Flat key=value file supplying defaults for any long flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,

    /// Worker threads (0 = one per core). Outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a synthetic cohort: PGM scans plus ground truth.
    Synth(SynthArgs),
    /// Segment scans and isolate five normalized fingers per hand.
    Preprocess(PreprocessArgs),
    /// Compute 30 shape features per finger into a CSV.
    Extract(ExtractArgs),
    /// Rank features and run forward-backward selection.
    Select(SelectArgs),
    /// Closed-set identification with the 2-train/1-test rotations.
    Identify(IdentifyArgs),
    /// 1-to-1 verification: FAR/FRR curve and equal error rate.
    Verify(VerifyArgs),
    /// Collect the results of earlier runs into one summary.
    Report(ReportArgs),
}

/// Problems with the invocation itself (exit code 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// A pipeline stage could not produce usable output (exit code 3).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct StageFailure(pub String);

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if cause.is::<StageFailure>() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<handgeom::Error>() {
            return match e.root() {
                handgeom::Error::Io(_) | handgeom::Error::Format(_) => 4,
                handgeom::Error::InvalidArgument(_) if e.stage().is_none() => 2,
                _ => 3,
            };
        }
        if cause.is::<std::io::Error>() || cause.is::<csv::Error>() {
            return 4;
        }
    }
    3
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let jobs = cli.jobs;
    match cli.command {
        Command::Synth(a) => commands::synth::run(&a, jobs),
        Command::Preprocess(a) => commands::preprocess::run(&a, jobs),
        Command::Extract(a) => commands::extract::run(&a, jobs),
        Command::Select(a) => commands::select::run(&a, jobs),
        Command::Identify(a) => commands::identify::run(&a, jobs),
        Command::Verify(a) => commands::verify::run(&a, jobs),
        Command::Report(a) => commands::report::run(&a),
    }
}

fn main() -> ExitCode {
    let cli = match config::parse_args(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(config::ParseError::Clap(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
