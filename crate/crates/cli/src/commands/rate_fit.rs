//! Fit decay rates to a stored trajectory. Standalone version of the fit
//! the `flow` command runs inline, reusing the options recorded in the
//! trajectory artifact.

use std::path::PathBuf;

use anyhow::Result;

use bubblelab_core::grid::RadialGrid;
use bubblelab_core::rate::trajectory_report;
use bubblelab_core::{Dimension, Error as CoreError};

use crate::commands::report::print_artifact;
use crate::io;
use crate::trajectory::{RateArtifact, TrajectoryFile};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Trajectory artifact produced by `flow`.
    pub input: PathBuf,
    /// Output path; defaults to rate_report.json next to the input.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let traj: TrajectoryFile = io::read_json(&args.input)?;
    let records = traj.to_records()?;
    let dim = Dimension::new(traj.dim)?;
    let plane = RadialGrid::new(dim, traj.plane_grid)?;

    // Same convention as the flow command: a trajectory without a fittable
    // decay window is reported as not-applicable, not as a failure.
    let artifact = match trajectory_report(&records, &plane, &traj.rate_options) {
        Ok(report) => RateArtifact::applicable(report),
        Err(CoreError::Unresolved(reason)) | Err(CoreError::FitFailed(reason)) => {
            RateArtifact::not_applicable(&reason)
        }
        Err(err) => return Err(err.into()),
    };
    print_artifact(&artifact);

    let out = args.out.clone().unwrap_or_else(|| {
        args.input.parent().unwrap_or_else(|| std::path::Path::new(".")).join("rate_report.json")
    });
    io::write_json(&out, &artifact)?;
    println!("wrote {}", out.display());
    Ok(())
}
