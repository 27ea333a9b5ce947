//! End-to-end pipeline: calibrate the amplitude of perturbed stationary
//! data on S³, integrate the near-critical trajectory, and extract the
//! quantitative convergence statements from the recorded diagnostics.

use bubblelab_core::dim::Dimension;
use bubblelab_core::flow::{
    calibrate_amplitude, perturbed_constant, Classification, FlowConfig, SphereFlow,
};
use bubblelab_core::grid::{GridSpec, RadialGrid, SphereGrid, SphereSpec};
use bubblelab_core::rate::{fit_exponential, trajectory_report, RateOptions};

#[test]
fn calibrated_run_decays_at_the_linearized_rate() {
    let dim = Dimension::new(3).unwrap();
    let sphere = SphereGrid::new(dim, SphereSpec::default()).unwrap();
    let flow = SphereFlow::new(sphere.clone(), FlowConfig::default());
    let base = perturbed_constant(&sphere, 1e-2, 2).unwrap();

    let cal = calibrate_amplitude(&flow, &base, 0.9, 1.1, 1e-10).unwrap();
    assert_eq!(cal.run.classification, Classification::Converged);
    assert!((cal.c_star - 1.0).abs() < 1e-2, "c* = {}", cal.c_star);

    let plane = RadialGrid::new(dim, GridSpec::default()).unwrap();
    let report = trajectory_report(&cal.run.records, &plane, &RateOptions::default()).unwrap();

    // the energy gap decays at twice the slowest stable linearized rate:
    // amplitude rate 1 - 2(2+n-1)/n = 5/3 for n = 3, so I decays at 10/3
    let expected = 10.0 / 3.0;
    assert!(report.kappa_fit > 0.0);
    assert!(report.r2 >= 0.99, "r² = {}", report.r2);
    assert!(
        (report.kappa_fit - expected).abs() <= 0.1 * expected,
        "κ = {} vs linearized {}",
        report.kappa_fit,
        expected
    );
    assert!(
        report.rates_consistent,
        "κ_I = {} vs κ_ρ = {}",
        report.kappa_fit, report.kappa_rho
    );

    // energy gap and squared remainder are equivalent within a factor 10
    assert!(
        report.ratio_band.0 >= 0.1 && report.ratio_band.1 <= 10.0,
        "ratio band {:?}",
        report.ratio_band
    );

    // both orthogonality residuals are small once the state has converged
    let last_in_window = report
        .fits
        .iter()
        .rfind(|f| f.s <= report.fit_window.1 + 1e-9)
        .unwrap();
    assert!(
        last_in_window.residual_dirichlet <= 1e-6,
        "Dirichlet residual {}",
        last_in_window.residual_dirichlet
    );
    assert!(
        last_in_window.residual_weighted <= 1e-6,
        "weighted residual {}",
        last_in_window.residual_weighted
    );

    // far-field weighted residual decays, monotone up to 5% ripple
    assert!(report.theta_rate > 0.0, "θ rate {}", report.theta_rate);
    assert!(report.theta_ripple <= 1.05, "θ ripple {}", report.theta_ripple);

    // two-time critical-norm bound, exact block Cauchy–Schwarz, tail decay
    assert!(report.cauchy.ok, "{:?}", report.cauchy);

    // measured constants of the renormalized-profile bounds are finite
    assert!(report.c_k0.is_finite() && report.c_k0 >= 0.0, "c_k0 = {}", report.c_k0);
    assert!(
        report.c_profile.is_finite() && report.c_profile >= 0.0,
        "c_profile = {}",
        report.c_profile
    );

    // distance to the final profile decays
    assert!(report.dist_rate > 0.0, "dist rate {}", report.dist_rate);

    // the zonal run is parity-protected: no drift in center or concentration
    let (z_inf, lambda_inf) = report.w_inf;
    assert!(z_inf.abs() < 1e-3, "z∞ = {z_inf}");
    assert!((lambda_inf - 1.0).abs() < 1e-2, "λ∞ = {lambda_inf}");

    // window-halving changes the fitted rate by < 5%
    let (a, b) = report.fit_window;
    let mid = 0.5 * (a + b);
    let full: Vec<(f64, f64)> = cal
        .run
        .records
        .iter()
        .filter(|r| r.s >= a - 1e-9 && r.s <= b + 1e-9 && r.i > 0.0)
        .map(|r| (r.s, r.i))
        .collect();
    let half: Vec<(f64, f64)> = full.iter().copied().filter(|&(s, _)| s >= mid).collect();
    let f_full = fit_exponential(&full).unwrap();
    let f_half = fit_exponential(&half).unwrap();
    assert!(
        (f_full.rate - f_half.rate).abs() <= 0.05 * f_full.rate,
        "full-window rate {} vs half-window rate {}",
        f_full.rate,
        f_half.rate
    );
}
