//! Flow-run configuration: one JSON document drives the integrate →
//! calibrate → rate-fit pipeline. Unknown keys are rejected so a typo can
//! never silently fall back to a default.

use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::{Deserialize, Serialize};

use bubblelab_core::flow::FlowConfig;
use bubblelab_core::grid::GridSpec;
use bubblelab_core::rate::RateOptions;

use crate::fieldfile::{check_schema, SCHEMA_VERSION};
use crate::io;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema_default")]
    pub schema_version: String,
    /// Space dimension of the planar problem; the flow runs on the sphere
    /// of the same dimension.
    #[serde(default = "dim_default")]
    pub dim: u32,
    /// Collocation nodes of the sphere grid.
    #[serde(default = "sphere_nodes_default")]
    pub sphere_nodes: usize,
    /// Radial grid used when states are pulled back to the plane for fits.
    #[serde(default)]
    pub plane_grid: GridSpec,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub calibration: CalibrationConfig,
    #[serde(default)]
    pub rate: RateOptions,
    /// Output directory; the `--out` flag takes precedence.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

fn schema_default() -> String {
    SCHEMA_VERSION.into()
}
fn dim_default() -> u32 {
    3
}
fn sphere_nodes_default() -> usize {
    64
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: schema_default(),
            dim: dim_default(),
            sphere_nodes: sphere_nodes_default(),
            plane_grid: GridSpec::default(),
            flow: FlowConfig::default(),
            initial: InitialData::default(),
            calibration: CalibrationConfig::default(),
            rate: RateOptions::default(),
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = io::read_json(path)?;
        check_schema(&cfg.schema_version)?;
        Ok(cfg)
    }
}

/// What the flow starts from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    #[serde(default = "kind_default")]
    pub kind: InitialKind,
    /// Amplitude of the zonal perturbation on top of the stationary constant.
    #[serde(default = "eps_default")]
    pub eps: f64,
    /// Zonal degree of the perturbation.
    #[serde(default = "degree_default")]
    pub degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    /// The exact stationary constant.
    Stationary,
    /// Stationary constant plus a zonal polynomial perturbation.
    Perturbed,
}

fn kind_default() -> InitialKind {
    InitialKind::Perturbed
}
fn eps_default() -> f64 {
    1e-2
}
fn degree_default() -> usize {
    2
}

impl Default for InitialData {
    fn default() -> Self {
        Self { kind: kind_default(), eps: eps_default(), degree: degree_default() }
    }
}

/// Amplitude calibration of the initial data: bisect to the threshold
/// between vanishing and blow-up before recording the trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    #[serde(default = "mode_default")]
    pub mode: CalibrationMode,
    /// Lower amplitude factor of the bisection bracket.
    #[serde(default = "lo_default")]
    pub lo: f64,
    /// Upper amplitude factor of the bisection bracket.
    #[serde(default = "hi_default")]
    pub hi: f64,
    /// Relative bracket width at which the bisection stops.
    #[serde(default = "rel_tol_default")]
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationMode {
    /// Run the initial data as given.
    Off,
    /// Bisect the amplitude to the vanish/blow-up threshold first.
    Bisect,
}

fn mode_default() -> CalibrationMode {
    CalibrationMode::Bisect
}
fn lo_default() -> f64 {
    0.9
}
fn hi_default() -> f64 {
    1.1
}
fn rel_tol_default() -> f64 {
    1e-10
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self { mode: mode_default(), lo: lo_default(), hi: hi_default(), rel_tol: rel_tol_default() }
    }
}
