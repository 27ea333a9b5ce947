//! Integrate the rescaled fast-diffusion flow per a run configuration:
//! build the initial state, optionally calibrate its amplitude to the
//! vanish/blow-up threshold, record the trajectory, and fit decay rates.
//! Emits a diagnostics CSV, the trajectory artifact, the rate report, and
//! optional SVG plots. Deterministic: the same config yields byte-identical
//! files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};

use bubblelab_core::field::ZonalSphereField;
use bubblelab_core::flow::{calibrate_amplitude, perturbed_constant, SphereFlow, SphereRecord};
use bubblelab_core::functionals::stationary_value_sphere;
use bubblelab_core::grid::{RadialGrid, SphereGrid, SphereSpec};
use bubblelab_core::rate::{fit_trajectory, trajectory_report, StateFit};
use bubblelab_core::{Dimension, Error as CoreError};

use crate::config::{CalibrationMode, InitialKind, RunConfig};
use crate::io;
use crate::svg;
use crate::trajectory::{CalibrationSummary, RateArtifact, TrajectoryFile};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Run configuration JSON.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory for flow.csv, trajectory.json and rate_report.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also emit decay.svg and ratio.svg.
    #[arg(long)]
    pub svg: bool,
}

/// Fixed header of the diagnostics CSV.
pub const CSV_HEADER: &str = "s, J, I, delta, K0, mass, rhoH1, alpha, lambda, z, dt_accepted";

pub fn render_csv(records: &[SphereRecord], fits: &[StateFit]) -> Result<String> {
    if records.len() != fits.len() {
        bail!("{} records but {} fitted states", records.len(), fits.len());
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (r, f) in records.iter().zip(fits) {
        writeln!(
            out,
            "{}, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}",
            r.s, r.j, r.i, r.delta, r.k0, r.mass, f.rho_h1, f.alpha, f.lambda, f.z, r.dt_accepted
        )?;
    }
    Ok(out)
}

pub fn run(args: Args) -> Result<()> {
    let cfg = RunConfig::load(&args.config)?;
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));

    let dim = Dimension::new(cfg.dim)?;
    let sphere = SphereGrid::new(dim, SphereSpec { nodes: cfg.sphere_nodes })?;
    let flow = SphereFlow::new(sphere.clone(), cfg.flow.clone());

    let base = match cfg.initial.kind {
        InitialKind::Stationary => {
            ZonalSphereField::constant(sphere.clone(), stationary_value_sphere(dim))
        }
        InitialKind::Perturbed => {
            perturbed_constant(&sphere, cfg.initial.eps, cfg.initial.degree)?
        }
    };

    let (calibration, run) = match cfg.calibration.mode {
        CalibrationMode::Off => (None, flow.run(&base)?),
        CalibrationMode::Bisect => {
            let cal = calibrate_amplitude(
                &flow,
                &base,
                cfg.calibration.lo,
                cfg.calibration.hi,
                cfg.calibration.rel_tol,
            )?;
            (Some(CalibrationSummary::from(&cal)), cal.run)
        }
    };

    println!("classification  {:?}", run.classification);
    println!("final s         {:.6}", run.final_s);
    println!("steps           {} accepted, {} rejected", run.accepted, run.rejected);
    if let Some(c) = &calibration {
        println!(
            "calibration     c* = {:.12} after {} bisections in [{}, {}]",
            c.c_star, c.bisections, c.bracket.0, c.bracket.1
        );
    }

    // Flat runs (e.g. stationary data) leave no decay window to fit; that
    // is a reportable outcome of a successful run, not a process failure.
    let plane = RadialGrid::new(dim, cfg.plane_grid)?;
    let (fits, artifact) = match trajectory_report(&run.records, &plane, &cfg.rate) {
        Ok(report) => (report.fits.clone(), RateArtifact::applicable(report)),
        Err(CoreError::Unresolved(reason)) | Err(CoreError::FitFailed(reason)) => {
            let fits = fit_trajectory(&run.records, &plane, &cfg.rate.fit)?;
            (fits, RateArtifact::not_applicable(&reason))
        }
        Err(err) => return Err(err.into()),
    };
    match (&artifact.kappa_fit, &artifact.note) {
        (Some(k), _) => println!("rate fit        kappa = {k:.6}"),
        (None, Some(note)) => println!("rate fit        {note}"),
        (None, None) => {}
    }

    let csv_path = out_dir.join("flow.csv");
    io::write_atomic(&csv_path, render_csv(&run.records, &fits)?.as_bytes())?;
    println!("wrote {}", csv_path.display());

    let traj = TrajectoryFile::new(
        cfg.dim,
        cfg.sphere_nodes,
        cfg.plane_grid,
        cfg.rate.clone(),
        &run,
        calibration,
    );
    let traj_path = out_dir.join("trajectory.json");
    io::write_json(&traj_path, &traj)?;
    println!("wrote {}", traj_path.display());

    let rate_path = out_dir.join("rate_report.json");
    io::write_json(&rate_path, &artifact)?;
    println!("wrote {}", rate_path.display());

    if args.svg {
        emit_plots(&artifact, &out_dir)?;
    }
    Ok(())
}

/// Shared by `flow --svg` and `report --svg`.
pub fn emit_plots(artifact: &RateArtifact, dir: &Path) -> Result<()> {
    match &artifact.report {
        Some(report) => {
            let decay = dir.join("decay.svg");
            io::write_atomic(&decay, svg::decay_plot(report).render().as_bytes())?;
            println!("wrote {}", decay.display());
            let ratio = dir.join("ratio.svg");
            io::write_atomic(&ratio, svg::ratio_plot(report).render().as_bytes())?;
            println!("wrote {}", ratio.display());
        }
        None => println!("no plots: rate fit was not applicable"),
    }
    Ok(())
}
