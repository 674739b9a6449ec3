//! Library side of the `dkmr` command-line tool.
//!
//! Each subcommand is a plain function over a resolved [`PipelineConfig`], so
//! tests can drive the same code paths as the binary.

pub mod commands;
pub mod config;
pub mod evaluation;
pub mod output;
pub mod stages;

use clap::{Parser, Subcommand};

pub use config::{CommonArgs, PipelineConfig};

#[derive(Debug, Parser)]
#[command(
    name = "dkmr",
    version,
    about = "Kill matrix refinement and mutation-based fault localization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dataset directory to weak and enhanced kill matrix dumps.
    Build(CommonArgs),
    /// Kill matrix dump to low-pass filtered, normalized dump.
    Refine(CommonArgs),
    /// Dataset directory to ranked suspiciousness reports (JSON and CSV).
    Localize(CommonArgs),
    /// Reports plus ground truths to evaluation JSON and EXAM curves.
    Evaluate(CommonArgs),
    /// Scenario parameters to synthetic dataset directories.
    Simulate(CommonArgs),
    /// simulate, localize and evaluate in one run.
    Pipeline(CommonArgs),
}

/// Invalid input or configuration, reported with exit status 1.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// Maps an error to the process exit status: 1 for validation problems, 2
/// for everything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<dkmr_core::Error>() {
        Some(dkmr_core::Error::Io(_) | dkmr_core::Error::NonNegligibleImaginary(_)) => 2,
        Some(_) => 1,
        None => 2,
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Build(args) => commands::build(&PipelineConfig::resolve(&args, &[])?),
        Command::Refine(args) => commands::refine(&PipelineConfig::resolve(&args, &[])?),
        Command::Localize(args) => commands::localize(&PipelineConfig::resolve(
            &args,
            &[dkmr_core::Variant::Full],
        )?),
        Command::Evaluate(args) => commands::evaluate(&PipelineConfig::resolve(&args, &[])?),
        Command::Simulate(args) => commands::simulate(&PipelineConfig::resolve(&args, &[])?),
        Command::Pipeline(args) => {
            commands::pipeline(&PipelineConfig::resolve(&args, &dkmr_core::Variant::ALL)?)
        }
    }
}
