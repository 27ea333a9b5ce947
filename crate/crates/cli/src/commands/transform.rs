//! Push a planar field through the conformal dictionary to the sphere and
//! back, reporting the invariants: critical mass is preserved exactly, the
//! planar Dirichlet energy equals the sphere's conformal energy, and the
//! round trip reproduces the field.

use std::path::PathBuf;

use anyhow::{bail, Result};

use bubblelab_core::conformal::{plane_to_sphere, sphere_to_plane};
use bubblelab_core::grid::{GridSpec, RadialGrid, SphereGrid, SphereSpec};
use bubblelab_core::Dimension;

use crate::fieldfile::{parse_grid, FieldFile};
use crate::scenario::ScenarioSpec;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Planar field file to push through the dictionary. Omit when
    /// --scenario builds the input.
    pub input: Option<PathBuf>,
    /// Space dimension; used with --scenario (files carry their own).
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(3..))]
    pub n: u32,
    /// Build the input from a scenario instead of a file.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Radial grid as map_scale,panels,nodes_per_panel (scenario inputs only).
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<GridSpec>,
    /// Collocation nodes of the sphere grid.
    #[arg(long, default_value_t = 64)]
    pub sphere_nodes: usize,
    /// Write the round-tripped planar field here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let u = match (&args.input, &args.scenario) {
        (Some(path), None) => FieldFile::load(path)?.to_field()?,
        (None, Some(text)) => {
            let dim = Dimension::new(args.n)?;
            let grid = RadialGrid::new(dim, args.grid.unwrap_or_default())?;
            ScenarioSpec::parse(text)?.build(grid)?.u
        }
        _ => bail!("give exactly one input: a field file or --scenario"),
    };
    let dim = u.dim();

    let sphere = SphereGrid::new(dim, SphereSpec { nodes: args.sphere_nodes })?;
    let v = plane_to_sphere(&u, sphere)?;
    let back = sphere_to_plane(&v, u.grid().clone())?;

    let mass_plane = u.critical_mass();
    let mass_sphere = v.critical_mass();
    let energy_plane = u.dirichlet_energy();
    let energy_sphere = v.conformal_energy();
    let diff = back.try_sub(&u)?;
    let round_trip_rel = (diff.dirichlet_energy() / energy_plane).sqrt();

    println!("critical mass   plane {mass_plane:.12e}   sphere {mass_sphere:.12e}   rel {:.2e}",
        (mass_plane - mass_sphere).abs() / mass_plane);
    println!("energy          plane {energy_plane:.12e}   sphere {energy_sphere:.12e}   rel {:.2e}",
        (energy_plane - energy_sphere).abs() / energy_plane);
    println!("round trip      relative gradient-norm error {round_trip_rel:.2e}");
    println!("sphere range    [{:.6e}, {:.6e}]", v.min_value(), v.max_value());

    if let Some(out) = &args.out {
        FieldFile::from_field(&back).save(out)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
