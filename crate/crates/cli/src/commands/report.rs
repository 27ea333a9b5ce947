//! Human-readable summary of a rate report, with optional SVG plots.

use std::path::PathBuf;

use anyhow::Result;

use crate::commands::flow::emit_plots;
use crate::trajectory::RateArtifact;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Rate report JSON produced by `flow` or `rate-fit`.
    pub input: PathBuf,
    /// Emit decay.svg and ratio.svg.
    #[arg(long)]
    pub svg: bool,
    /// Directory for the plots; defaults to the input's directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn print_artifact(artifact: &RateArtifact) {
    let Some(rep) = &artifact.report else {
        match &artifact.note {
            Some(note) => println!("rate fit: {note}"),
            None => println!("rate fit: empty artifact"),
        }
        return;
    };
    println!(
        "fit window      s in [{:.4}, {:.4}]   {} samples",
        rep.fit_window.0, rep.fit_window.1, rep.samples
    );
    println!("energy gap      rate {:.6}   r^2 {:.6}", rep.kappa_fit, rep.r2);
    println!(
        "remainder^2     rate {:.6}   consistent with energy gap: {}",
        rep.kappa_rho, rep.rates_consistent
    );
    println!("gap/remainder^2 band [{:.4}, {:.4}]", rep.ratio_band.0, rep.ratio_band.1);
    println!(
        "weighted sup    rate {:.4}   r^2 {:.4}   ripple {:.4}   final {:.3e}",
        rep.theta_rate, rep.theta_r2, rep.theta_ripple, rep.theta_final
    );
    println!("critical dist   rate {:.4}", rep.dist_rate);
    println!("measured consts c_K0 {:.4e}   c_profile {:.4e}", rep.c_k0, rep.c_profile);
    println!(
        "two-time bound  {} pairs, C {:.4e}; {} blocks, margin {:.6}; tail rate {:.4} (r^2 {:.4}); ok: {}",
        rep.cauchy.pairs,
        rep.cauchy.pair_constant,
        rep.cauchy.blocks,
        rep.cauchy.block_margin,
        rep.cauchy.tail_rate,
        rep.cauchy.tail_r2,
        rep.cauchy.ok
    );
    println!("final profile   z {:.3e}   lambda {:.9}", rep.w_inf.0, rep.w_inf.1);
}

pub fn run(args: Args) -> Result<()> {
    let artifact = RateArtifact::load(&args.input)?;
    print_artifact(&artifact);
    if args.svg {
        let dir = args.out.clone().unwrap_or_else(|| {
            args.input.parent().unwrap_or_else(|| std::path::Path::new(".")).to_path_buf()
        });
        emit_plots(&artifact, &dir)?;
    }
    Ok(())
}
