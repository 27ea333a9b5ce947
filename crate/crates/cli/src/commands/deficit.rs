//! Curvature deficit and energy diagnostics of a named scenario field.

use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use bubblelab_core::bubble::sharp_sobolev_power;
use bubblelab_core::functionals::{curvature_normalizer, deficit_scenario};
use bubblelab_core::grid::{AngularRule, GridSpec, RadialGrid};
use bubblelab_core::Dimension;

use crate::fieldfile::{parse_grid, SCHEMA_VERSION};
use crate::io;
use crate::scenario::ScenarioSpec;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Space dimension (n >= 3).
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(3..))]
    pub n: u32,
    /// Scenario, e.g. `bubble`, `perturbed:eps=1e-3`, `two-bubble:sep=20`.
    #[arg(long, default_value = "bubble")]
    pub scenario: String,
    /// Radial grid as map_scale,panels,nodes_per_panel.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<GridSpec>,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Report {
    schema_version: String,
    dim: u32,
    label: String,
    /// Energy-ratio curvature `K₀ = ∫|∇u|² / ∫u^{2*}`.
    k0: f64,
    /// Deficit at `K₀` in the critical dual norm.
    delta: f64,
    mass: f64,
    dirichlet: f64,
    sharp_power: f64,
    /// Whether `∫|∇u|² ≤ (3/2)·Sⁿ`, the single-bubble energy regime.
    energy_within_wall: bool,
}

pub fn run(args: Args) -> Result<()> {
    let dim = Dimension::new(args.n)?;
    let grid = RadialGrid::new(dim, args.grid.unwrap_or_default())?;
    let sc = ScenarioSpec::parse(&args.scenario)?.build(grid)?;

    let k0 = curvature_normalizer(&sc.u);
    let rule = AngularRule::new(dim, sc.u.lmax().max(8));
    let delta = deficit_scenario(&sc, k0, &rule);
    let mass = sc.u.critical_mass();
    let dirichlet = sc.u.dirichlet_energy();
    let sharp = sharp_sobolev_power(dim);

    let report = Report {
        schema_version: SCHEMA_VERSION.into(),
        dim: args.n,
        label: sc.label.clone(),
        k0,
        delta,
        mass,
        dirichlet,
        sharp_power: sharp,
        energy_within_wall: dirichlet <= 1.5 * sharp,
    };

    println!("scenario        {}", report.label);
    println!("K0              {k0:.12}");
    println!("deficit         {delta:.6e}");
    println!("critical mass   {mass:.12e}");
    println!("grad energy     {dirichlet:.12e}   (3/2)S^n = {:.12e}", 1.5 * sharp);
    println!("energy within single-bubble wall: {}", report.energy_within_wall);

    if let Some(out) = &args.out {
        io::write_json(out, &report)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
