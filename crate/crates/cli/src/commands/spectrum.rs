//! Eigenvalues of the weighted linearization `-Δφ = ν U^{p-1} φ` with the
//! closed-form oracle, plus an optional randomized certificate that Rayleigh
//! quotients orthogonal to the symmetry directions stay above the gap.

use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use bubblelab_core::grid::{GridSpec, RadialGrid};
use bubblelab_core::spectral::{
    eigenvalue_oracle, rayleigh_gap_check, weighted_spectrum, GapCheck, SpectralOptions,
    SpectrumResult,
};
use bubblelab_core::Dimension;

use crate::fieldfile::SCHEMA_VERSION;
use crate::io;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Space dimension (n >= 3).
    #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
    pub n: u32,
    /// Randomized Rayleigh-quotient trials for the gap certificate (0 skips).
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    /// RNG seed for the trial fields.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Highest zonal degree solved.
    #[arg(long, default_value_t = 3)]
    pub max_degree: usize,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Report {
    schema_version: String,
    dim: u32,
    /// Closed-form eigenvalues `ν_k = 1 + 4k(k+n-1)/(n(n-2))`.
    oracle: Vec<f64>,
    spectrum: SpectrumResult,
    gap: Option<GapCheck>,
}

pub fn run(args: Args) -> Result<()> {
    let dim = Dimension::new(args.n)?;
    let opts = SpectralOptions { max_degree: args.max_degree, ..SpectralOptions::default() };
    let spectrum = weighted_spectrum(dim, &opts)?;

    println!("distinct eigenvalues (value, total multiplicity):");
    for (value, mult) in &spectrum.distinct {
        println!("  {value:.9}  x{mult}");
    }
    let oracle: Vec<f64> = (0..=3).map(|k| eigenvalue_oracle(dim, k)).collect();
    println!("closed-form first four: {:?}", oracle.iter().map(|v| format!("{v:.9}")).collect::<Vec<_>>());
    println!(
        "gap eigenvalue  {:.9}  (converged: {}, above p = {:.9}: {})",
        spectrum.lambda,
        spectrum.lambda_converged,
        dim.p(),
        spectrum.gap_ok
    );

    let gap = if args.trials > 0 {
        let grid = RadialGrid::new(dim, GridSpec::default())?;
        let check =
            rayleigh_gap_check(grid, args.trials, args.seed, eigenvalue_oracle(dim, 2), 1e-4)?;
        println!(
            "randomized certificate: {} trials, min quotient {:.9}, ok: {}",
            check.trials, check.min_quotient, check.ok
        );
        Some(check)
    } else {
        None
    };

    let report =
        Report { schema_version: SCHEMA_VERSION.into(), dim: args.n, oracle, spectrum, gap };
    if let Some(out) = &args.out {
        io::write_json(out, &report)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
