//! `bubblelab` — command-line driver for the bubble-stability laboratory:
//! closed-form identity checks, deficit and projection diagnostics, the
//! weighted eigenproblem, the conformal plane/sphere dictionary, and the
//! rescaled fast-diffusion flow with rate extraction.
//!
//! Exit codes: 0 success, 1 generic failure, 2 fit failure, 3 calibration
//! bracket failure.

use std::process::ExitCode;

use bubblelab_cli::commands;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bubblelab", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the bubble family's closed-form identities on the grid.
    BubbleCheck(commands::bubble_check::Args),
    /// Curvature deficit and energy diagnostics of a scenario field.
    Deficit(commands::deficit::Args),
    /// Fit the nearest bubble and run the stability check.
    Project(commands::project::Args),
    /// Eigenvalues of the weighted linearization and the spectral gap.
    Spectrum(commands::spectrum::Args),
    /// Map a planar field to the sphere and back; report the dictionary.
    Transform(commands::transform::Args),
    /// Integrate the rescaled fast-diffusion flow from a config file.
    Flow(commands::flow::Args),
    /// Fit decay rates to a stored trajectory.
    RateFit(commands::rate_fit::Args),
    /// Summarize a rate report; optionally emit plots.
    Report(commands::report::Args),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<bubblelab_core::Error>() {
        Some(bubblelab_core::Error::FitFailed(_)) => 2,
        Some(bubblelab_core::Error::NoBracket(_)) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::BubbleCheck(args) => commands::bubble_check::run(args),
        Command::Deficit(args) => commands::deficit::run(args),
        Command::Project(args) => commands::project::run(args),
        Command::Spectrum(args) => commands::spectrum::run(args),
        Command::Transform(args) => commands::transform::run(args),
        Command::Flow(args) => commands::flow::run(args),
        Command::RateFit(args) => commands::rate_fit::run(args),
        Command::Report(args) => commands::report::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
