//! Stored flow trajectory — the recorded diagnostics plus the sphere
//! states — so rate fitting can run as a separate step, and the rate-fit
//! artifact it produces.

use anyhow::Result;
use serde::{Deserialize, Serialize};

use bubblelab_core::field::ZonalSphereField;
use bubblelab_core::flow::{Calibration, Classification, SphereRecord, SphereRun};
use bubblelab_core::grid::{GridSpec, SphereGrid, SphereSpec};
use bubblelab_core::rate::{RateOptions, RateReport};
use bubblelab_core::Dimension;

use crate::fieldfile::{check_schema, SCHEMA_VERSION};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryFile {
    pub schema_version: String,
    pub dim: u32,
    pub sphere_nodes: usize,
    /// Radial grid used to pull states back to the plane during fitting.
    pub plane_grid: GridSpec,
    pub classification: Classification,
    pub final_s: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub max_j_increase: f64,
    pub calibration: Option<CalibrationSummary>,
    /// Fit options to reuse when the rate fit runs as a separate command.
    pub rate_options: RateOptions,
    pub records: Vec<TrajectoryRecord>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSummary {
    pub c_star: f64,
    pub bracket: (f64, f64),
    pub bisections: usize,
}

impl From<&Calibration> for CalibrationSummary {
    fn from(c: &Calibration) -> Self {
        Self { c_star: c.c_star, bracket: c.bracket, bisections: c.bisections }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryRecord {
    pub s: f64,
    pub j: f64,
    pub i: f64,
    pub delta: f64,
    pub k0: f64,
    pub mass: f64,
    pub dissipation: f64,
    pub dt_accepted: f64,
    pub state: Vec<f64>,
}

impl TrajectoryFile {
    pub fn new(
        dim: u32,
        sphere_nodes: usize,
        plane_grid: GridSpec,
        rate_options: RateOptions,
        run: &SphereRun,
        calibration: Option<CalibrationSummary>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            dim,
            sphere_nodes,
            plane_grid,
            classification: run.classification,
            final_s: run.final_s,
            accepted: run.accepted,
            rejected: run.rejected,
            max_j_increase: run.max_j_increase,
            calibration,
            rate_options,
            records: run
                .records
                .iter()
                .map(|r| TrajectoryRecord {
                    s: r.s,
                    j: r.j,
                    i: r.i,
                    delta: r.delta,
                    k0: r.k0,
                    mass: r.mass,
                    dissipation: r.dissipation,
                    dt_accepted: r.dt_accepted,
                    state: r.state.values().to_vec(),
                })
                .collect(),
        }
    }

    /// Rebuild the sphere grid and the recorded states.
    pub fn to_records(&self) -> Result<Vec<SphereRecord>> {
        check_schema(&self.schema_version)?;
        let dim = Dimension::new(self.dim)?;
        let grid = SphereGrid::new(dim, SphereSpec { nodes: self.sphere_nodes })?;
        self.records
            .iter()
            .map(|r| {
                Ok(SphereRecord {
                    s: r.s,
                    j: r.j,
                    i: r.i,
                    delta: r.delta,
                    k0: r.k0,
                    mass: r.mass,
                    dissipation: r.dissipation,
                    dt_accepted: r.dt_accepted,
                    state: ZonalSphereField::new(grid.clone(), r.state.clone())?,
                })
            })
            .collect()
    }
}

/// Rate-fit artifact: either a full report, or an explicit not-applicable
/// marker for runs without a resolvable decay window (e.g. stationary data).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateArtifact {
    pub schema_version: String,
    /// Headline decay rate of the energy gap; `null` when not applicable.
    pub kappa_fit: Option<f64>,
    /// Why no rate was fitted, when `kappa_fit` is null.
    pub note: Option<String>,
    pub report: Option<RateReport>,
}

impl RateArtifact {
    pub fn applicable(report: RateReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            kappa_fit: Some(report.kappa_fit),
            note: None,
            report: Some(report),
        }
    }

    pub fn not_applicable(reason: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            kappa_fit: None,
            note: Some(format!("not applicable: {reason}")),
            report: None,
        }
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let art: Self = crate::io::read_json(path)?;
        check_schema(&art.schema_version)?;
        Ok(art)
    }
}
