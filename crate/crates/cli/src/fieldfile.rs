//! On-disk format for planar zonal fields: one radial profile per zonal
//! degree, stored as JSON with exact shortest-round-trip decimals.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use bubblelab_core::field::ModalField;
use bubblelab_core::grid::{GridSpec, RadialGrid};
use bubblelab_core::Dimension;

use crate::io;

/// Version written by this build; readers accept any `1.x`.
pub const SCHEMA_VERSION: &str = "1.0";

/// The only field representation defined so far.
pub const REPRESENTATION: &str = "plane-modal";

/// Reject artifacts written under a different major version.
pub fn check_schema(version: &str) -> Result<()> {
    let major: u64 = version
        .split('.')
        .next()
        .unwrap_or("")
        .parse()
        .with_context(|| format!("malformed schema_version {version:?}"))?;
    if major != 1 {
        bail!("schema_version {version} needs a reader for major {major}; this build reads 1.x");
    }
    Ok(())
}

/// Parse the `--grid` flag: `map_scale,panels,nodes_per_panel`.
pub fn parse_grid(text: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        bail!("--grid wants map_scale,panels,nodes_per_panel; got {text:?}");
    }
    Ok(GridSpec {
        map_scale: parts[0].parse().with_context(|| format!("map scale {:?}", parts[0]))?,
        panels: parts[1].parse().with_context(|| format!("panel count {:?}", parts[1]))?,
        nodes_per_panel: parts[2]
            .parse()
            .with_context(|| format!("nodes per panel {:?}", parts[2]))?,
    })
}

/// One zonal degree: the radial profile sampled on the collocation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub l: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub schema_version: String,
    pub dim: u32,
    /// Label of the symmetry axis the zonal degrees refer to.
    pub axis: String,
    pub grid: GridSpec,
    pub representation: String,
    pub modes: Vec<Mode>,
}

impl FieldFile {
    pub fn from_field(u: &ModalField) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            dim: u.dim().n(),
            axis: "polar".into(),
            grid: u.grid().spec(),
            representation: REPRESENTATION.into(),
            modes: u
                .profiles()
                .iter()
                .enumerate()
                .map(|(l, p)| Mode { l, values: p.clone() })
                .collect(),
        }
    }

    /// Materialize the stored modes on a freshly built grid. Absent degrees
    /// are zero; degrees may come in any order but not twice.
    pub fn to_field(&self) -> Result<ModalField> {
        check_schema(&self.schema_version)?;
        if self.representation != REPRESENTATION {
            bail!(
                "unsupported representation {:?}; this build reads {REPRESENTATION:?}",
                self.representation
            );
        }
        let dim = Dimension::new(self.dim)?;
        let grid = RadialGrid::new(dim, self.grid)?;
        let lmax = self.modes.iter().map(|m| m.l).max().unwrap_or(0);
        let mut profiles = vec![vec![0.0; grid.len()]; lmax + 1];
        let mut seen = vec![false; lmax + 1];
        for mode in &self.modes {
            if seen[mode.l] {
                bail!("zonal degree {} appears twice", mode.l);
            }
            if mode.values.len() != grid.len() {
                bail!(
                    "degree {} carries {} samples for a grid of {} nodes",
                    mode.l,
                    mode.values.len(),
                    grid.len()
                );
            }
            profiles[mode.l] = mode.values.clone();
            seen[mode.l] = true;
        }
        Ok(ModalField::from_profiles(grid, profiles)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: Self = io::read_json(path)?;
        check_schema(&file.schema_version)?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_json(path, self)
    }
}
