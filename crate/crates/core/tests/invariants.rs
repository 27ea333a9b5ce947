//! Property-based invariants that hold for arbitrary inputs in range, not
//! just for hand-picked cases.

use std::sync::Arc;

use bubblelab_core::dim::Dimension;
use bubblelab_core::field::ZonalSphereField;
use bubblelab_core::grid::{SphereGrid, SphereSpec};
use bubblelab_core::rate::fit_exponential;
use proptest::prelude::*;

fn sphere(n: u32) -> Arc<SphereGrid> {
    SphereGrid::new(Dimension::new(n).unwrap(), SphereSpec::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The log-linear fit recovers rate and prefactor of exact exponentials
    /// regardless of rate sign, scale, or sampling cadence.
    #[test]
    fn exponential_fit_is_exact_on_exponentials(
        rate in -5.0f64..5.0,
        prefactor in 1e-6f64..1e6,
        ds in 0.05f64..0.5,
        count in 10usize..60,
    ) {
        let series: Vec<(f64, f64)> = (0..count)
            .map(|k| {
                let s = ds * k as f64;
                (s, prefactor * (-rate * s).exp())
            })
            .collect();
        let fit = fit_exponential(&series).unwrap();
        prop_assert!((fit.rate - rate).abs() <= 1e-8 * rate.abs().max(1.0));
        prop_assert!((fit.prefactor - prefactor).abs() <= 1e-7 * prefactor);
        prop_assert!(fit.r2 >= 1.0 - 1e-9);
    }

    /// Scaling a sphere state scales the conformal energy by c² and the
    /// critical mass by c^{2*}; the energy-ratio curvature follows the
    /// exact power law, for every dimension.
    #[test]
    fn sphere_functionals_follow_the_scaling_laws(
        n in 3u32..=6,
        c in 0.1f64..10.0,
        amp in -0.5f64..0.5,
        degree in 0usize..4,
    ) {
        let grid = sphere(n);
        let dim = grid.dim();
        let base = ZonalSphereField::from_fn_cos(grid.clone(), |t| {
            1.0 + amp * t.powi(degree as i32)
        }).unwrap();
        let scaled = base.scale(c);
        let e0 = base.conformal_energy();
        let m0 = base.critical_mass();
        prop_assert!((scaled.conformal_energy() - c * c * e0).abs() <= 1e-12 * e0.abs().max(1.0) * c * c);
        let ts = dim.two_star();
        prop_assert!((scaled.critical_mass() - c.powf(ts) * m0).abs() <= 1e-11 * (c.powf(ts) * m0).abs().max(1e-30));
    }
}
