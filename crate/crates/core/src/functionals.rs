//! Scalar functionals: curvature normalizer, deficit, flow energy.
//!
//! The deficit of a positive field `u` with respect to a constant curvature
//! `K₀` is the critical-norm size of the residual,
//!
//! ```text
//! δ(u) = ( ∫ |Δu + K₀ u^p|^{2n/(n+2)} dx )^{(n+2)/(2n)},
//! ```
//!
//! invariant under the translation-dilation group. The canonical choice of
//! constant is the energy ratio `K₀(u) = ∫|∇u|² / ∫u^{2*}`, which equals `κ`
//! exactly when `u` is a bubble of curvature `κ`.
//!
//! On the sphere side the same number is computed without any conformal
//! factor: the residual density `|Δ_S v + K₀ v^p - (n(n-2)/4) v|^{2n/(n+2)} dσ`
//! transforms onto its flat counterpart with weight one, which is what makes
//! the critical exponent `2n/(n+2)` special.
//!
//! The flow energy is `J(w) = ½∫|∇w|² - (c/2*)∫w^{2*}` with `c = (n+2)/4`;
//! its stationary value over the bubble family is
//! `J∞ = Sⁿ / (n c^{(n-2)/2})`, reproduced here in closed form and by
//! same-grid quadrature so that energy gaps can be driven to zero without a
//! quadrature-floor mismatch.

use std::sync::Arc;

use crate::bubble::{sharp_sobolev_power, BubbleParams, Scenario};
use crate::dim::Dimension;
use crate::error::{Error, Result};
use crate::field::{ModalField, ZonalSphereField};
use crate::grid::{AngularRule, RadialGrid, SphereGrid};

/// Energy-ratio curvature `K₀(u) = ∫|∇u|² / ∫u^{2*}`.
pub fn curvature_normalizer(u: &ModalField) -> f64 {
    u.dirichlet_energy() / u.critical_mass()
}

/// Sphere-side energy-ratio curvature, numerically the same quantity.
pub fn curvature_normalizer_sphere(v: &ZonalSphereField) -> f64 {
    v.conformal_energy() / v.critical_mass()
}

/// Rescale `u` so its energy-ratio curvature becomes `target`; returns the
/// rescaled field and the applied factor `c = (K₀/target)^{(n-2)/4}`.
pub fn normalize_curvature(u: &ModalField, target: f64) -> Result<(ModalField, f64)> {
    if !(target.is_finite() && target > 0.0) {
        return Err(Error::NonPositive(format!("curvature target {target}")));
    }
    let k0 = curvature_normalizer(u);
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(Error::NonPositive(format!("energy-ratio curvature {k0}")));
    }
    let c = (k0 / target).powf((u.dim().nf() - 2.0) / 4.0);
    Ok((u.scale(c), c))
}

/// Deficit of a scenario, using its exact pointwise closures (no numerical
/// differentiation). The angular rule controls the tensor quadrature and
/// should be at least as fine as the scenario field's own resolution.
pub fn deficit_scenario(sc: &Scenario, k0: f64, rule: &AngularRule) -> f64 {
    let dim = sc.dim();
    let q = 2.0 * dim.nf() / (dim.nf() + 2.0);
    let p = dim.p();
    let grid = sc.grid();
    let mut acc = 0.0;
    for (&r, &wr) in grid.r().iter().zip(grid.weights()) {
        let mut inner = 0.0;
        for (&t, &wt) in rule.t().iter().zip(rule.weights()) {
            let resid = -sc.minus_lap_at(r, t) + k0 * sc.u_at(r, t).powf(p);
            inner += wt * resid.abs().powf(q);
        }
        acc += wr * inner;
    }
    (rule.area_factor() * acc).powf(1.0 / q)
}

/// Deficit with the Laplacian taken numerically from the modal profiles;
/// used for fields that exist only as grid data.
pub fn deficit_field(u: &ModalField, k0: f64) -> f64 {
    let dim = u.dim();
    let q = 2.0 * dim.nf() / (dim.nf() + 2.0);
    let p = dim.p();
    let rule = AngularRule::new(dim, u.lmax());
    let lap = u.laplacian();
    let nt = rule.len();
    let grid = u.grid();
    let lap_vals = lap.synth(&rule);
    let u_vals = u.synth(&rule);
    let mut acc = 0.0;
    for (i, &wr) in grid.weights().iter().enumerate() {
        let mut inner = 0.0;
        for (j, &wt) in rule.weights().iter().enumerate() {
            let resid = lap_vals[i * nt + j] + k0 * u_vals[i * nt + j].abs().powf(p);
            inner += wt * resid.abs().powf(q);
        }
        acc += wr * inner;
    }
    (rule.area_factor() * acc).powf(1.0 / q)
}

/// Sphere-native deficit `(∫ |Δ_S v + K₀ v^p - shift·v|^{2n/(n+2)} dσ)^{(n+2)/2n}`.
pub fn deficit_sphere(v: &ZonalSphereField, k0: f64) -> f64 {
    let dim = v.dim();
    let q = 2.0 * dim.nf() / (dim.nf() + 2.0);
    let resid = sphere_residual(v, k0);
    let dens: Vec<f64> = resid.iter().map(|r| r.abs().powf(q)).collect();
    v.grid().integral(&dens).powf(1.0 / q)
}

/// `Δ_S v + k v^p - (n(n-2)/4) v` at the sphere nodes.
pub fn sphere_residual(v: &ZonalSphereField, k: f64) -> Vec<f64> {
    let dim = v.dim();
    let p = dim.p();
    let shift = dim.sphere_shift();
    let lap = v.laplacian();
    v.values()
        .iter()
        .zip(lap.values())
        .map(|(&vv, &lv)| lv + k * vv.abs().powf(p).copysign(vv) - shift * vv)
        .collect()
}

/// Flow energy `J(w) = ½ ∫|∇w|² - (c/2*) ∫ w^{2*}` on the flat side.
pub fn flow_energy(w: &ModalField) -> f64 {
    let dim = w.dim();
    0.5 * w.dirichlet_energy() - dim.c_flow() / dim.two_star() * w.critical_mass()
}

/// Flow energy on the sphere side, same number through the dictionary.
pub fn flow_energy_sphere(v: &ZonalSphereField) -> f64 {
    let dim = v.dim();
    0.5 * v.conformal_energy() - dim.c_flow() / dim.two_star() * v.critical_mass()
}

/// Energy dissipated by the flow: `dJ/ds = -D(v)` with
/// `D(v) = m ∫ (Δ_S v + c v^p - shift·v)² v^{1-p} dσ`, `m = 1/p`.
pub fn dissipation_sphere(v: &ZonalSphereField) -> f64 {
    let dim = v.dim();
    let resid = sphere_residual(v, dim.c_flow());
    let p = dim.p();
    let dens: Vec<f64> = resid
        .iter()
        .zip(v.values())
        .map(|(r, &vv)| r * r * vv.powf(1.0 - p))
        .collect();
    dim.m() * v.grid().integral(&dens)
}

/// Closed-form stationary energy `J∞ = Sⁿ / (n c^{(n-2)/2})`.
pub fn stationary_energy_exact(dim: Dimension) -> f64 {
    sharp_sobolev_power(dim) / (dim.nf() * dim.c_flow().powf((dim.nf() - 2.0) / 2.0))
}

/// Constant sphere value of the stationary state,
/// `v∞ = (n(n-2)/(n+2))^{(n-2)/4}`.
pub fn stationary_value_sphere(dim: Dimension) -> f64 {
    let nf = dim.nf();
    (nf * (nf - 2.0) / (nf + 2.0)).powf((nf - 2.0) / 4.0)
}

/// `J` of the constant stationary state by the same quadrature used for
/// trajectory energies; subtracting this instead of the closed form lets
/// energy gaps decay to the roundoff floor instead of the quadrature floor.
pub fn stationary_energy_sphere(grid: &Arc<SphereGrid>) -> f64 {
    let v = ZonalSphereField::constant(grid.clone(), stationary_value_sphere(grid.dim()));
    flow_energy_sphere(&v)
}

/// Same-grid stationary energy on the flat side, from the stationary bubble.
pub fn stationary_energy_flat(grid: &Arc<RadialGrid>) -> Result<f64> {
    let dim = grid.dim();
    let params = BubbleParams::flow_stationary(dim, 0.0, 1.0);
    let w = ModalField::sample_radial(grid.clone(), |r| params.eval(dim, r, 1.0))?;
    Ok(flow_energy(&w))
}

/// Both sides of the critical-norm chain
/// `δ_c(w)² ≤ (∫w^{2*})^{2/n} ∫ (Δw/w^p + c)² w^{2*} dx`, evaluated
/// sphere-natively: the right factor is `mass^{2/n} · D(v)/m`.
pub fn holder_chain_sphere(v: &ZonalSphereField) -> (f64, f64) {
    let dim = v.dim();
    let delta = deficit_sphere(v, dim.c_flow());
    let mass = v.critical_mass();
    let rhs = mass.powf(2.0 / dim.nf()) * dissipation_sphere(v) / dim.m();
    (delta * delta, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubble::{
        multi_bubble_scenario, perturbed_bubble_scenario, single_bubble_scenario,
    };
    use crate::grid::GridSpec;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn grid(n: u32) -> Arc<RadialGrid> {
        RadialGrid::new(Dimension::new(n).unwrap(), GridSpec::default()).unwrap()
    }

    #[test]
    fn energy_ratio_curvature_of_bubble_is_kappa() {
        let g = grid(3);
        for kappa in [1.0, 1.25, 3.0] {
            let sc =
                single_bubble_scenario(g.clone(), BubbleParams { kappa, z: 0.0, lambda: 1.7 })
                    .unwrap();
            assert_relative_eq!(curvature_normalizer(&sc.u), kappa, max_relative = 1e-10);
        }
    }

    #[test]
    fn normalizing_curvature_hits_the_target() {
        let g = grid(3);
        let sc = single_bubble_scenario(g, BubbleParams::standard(0.0, 2.0)).unwrap();
        let u3 = sc.u.scale(1.3);
        let (back, c) = normalize_curvature(&u3, 1.0).unwrap();
        assert_relative_eq!(curvature_normalizer(&back), 1.0, max_relative = 1e-10);
        assert_relative_eq!(c * 1.3, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn deficit_of_exact_bubble_vanishes() {
        let g = grid(3);
        let rule = AngularRule::new(g.dim(), 8);
        for params in [BubbleParams::standard(0.0, 1.0), BubbleParams::standard(1.5, 2.0)] {
            let sc = single_bubble_scenario(g.clone(), params).unwrap();
            let k0 = curvature_normalizer(&sc.u);
            let d = deficit_scenario(&sc, k0, &rule);
            assert!(d < 1e-8, "deficit {d} for {:?}", params);
        }
    }

    #[test]
    fn deficit_scales_linearly_in_the_perturbation() {
        let g = grid(3);
        let rule = AngularRule::new(g.dim(), 4);
        let d = |eps: f64| {
            let sc = perturbed_bubble_scenario(g.clone(), eps).unwrap();
            let k0 = curvature_normalizer(&sc.u);
            deficit_scenario(&sc, k0, &rule)
        };
        let d1 = d(1e-3);
        let d2 = d(2e-3);
        assert!(d1 > 1e-6, "deficit should be visible, got {d1}");
        assert_relative_eq!(d2 / d1, 2.0, max_relative = 1e-2);
    }

    #[test]
    fn numerical_laplacian_deficit_agrees_with_exact_closures() {
        let g = grid(3);
        let sc = perturbed_bubble_scenario(g.clone(), 0.05).unwrap();
        let k0 = curvature_normalizer(&sc.u);
        let rule = AngularRule::new(g.dim(), 4);
        let exact_route = deficit_scenario(&sc, k0, &rule);
        let numeric_route = deficit_field(&sc.u, k0);
        assert_relative_eq!(exact_route, numeric_route, max_relative = 1e-5);
    }

    #[test]
    fn two_bubble_deficit_is_order_one_and_separation_monotone() {
        let g = grid(3);
        let rule = AngularRule::new(g.dim(), 64);
        let d = |sep: f64| {
            let sc =
                multi_bubble_scenario(g.clone(), &[(-sep / 2.0, 1.0), (sep / 2.0, 1.0)], 512)
                    .unwrap();
            let k0 = curvature_normalizer(&sc.u);
            deficit_scenario(&sc, k0, &rule)
        };
        let d6 = d(6.0);
        let d12 = d(12.0);
        assert!(d6 > 0.1, "interaction deficit should be visible: {d6}");
        assert!(d12 < d6, "deficit must decay with separation: {d12} vs {d6}");
    }

    #[test]
    fn stationary_energy_closed_forms() {
        let d3 = Dimension::new(3).unwrap();
        assert_abs_diff_eq!(stationary_energy_exact(d3), 3.822_481_347_907_451, epsilon = 1e-13);
        assert_abs_diff_eq!(stationary_value_sphere(d3), 0.880_111_736_793_393_4, epsilon = 1e-15);
        let d4 = Dimension::new(4).unwrap();
        assert_relative_eq!(stationary_energy_exact(d4), 17.545_963_379_714_415, max_relative = 1e-13);
        assert_abs_diff_eq!(stationary_value_sphere(d4), 1.154_700_538_379_251_5, epsilon = 1e-15);
        let d6 = Dimension::new(6).unwrap();
        assert_abs_diff_eq!(stationary_value_sphere(d6), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn stationary_energy_same_grid_matches_closed_form() {
        let d = Dimension::new(3).unwrap();
        let sg = SphereGrid::with_default_spec(d).unwrap();
        assert_relative_eq!(
            stationary_energy_sphere(&sg),
            stationary_energy_exact(d),
            max_relative = 1e-13
        );
        let rg = grid(3);
        assert_relative_eq!(
            stationary_energy_flat(&rg).unwrap(),
            stationary_energy_exact(d),
            max_relative = 1e-10
        );
    }

    #[test]
    fn sphere_dissipation_is_minus_energy_slope() {
        let d = Dimension::new(3).unwrap();
        let sg = SphereGrid::with_default_spec(d).unwrap();
        let v = ZonalSphereField::from_fn_cos(sg.clone(), |t| 0.9 + 0.1 * t + 0.05 * t * t)
            .unwrap();
        // direction of the flow: ∂_s v = m v^{1-p} R(v)
        let resid = sphere_residual(&v, d.c_flow());
        let p = d.p();
        let dir: Vec<f64> = v
            .values()
            .iter()
            .zip(&resid)
            .map(|(&vv, &r)| d.m() * vv.powf(1.0 - p) * r)
            .collect();
        let dir = ZonalSphereField::new(sg, dir).unwrap();
        let h = 1e-6;
        let jp = flow_energy_sphere(&v.try_add(&dir.scale(h)).unwrap());
        let jm = flow_energy_sphere(&v.try_sub(&dir.scale(h)).unwrap());
        let slope = (jp - jm) / (2.0 * h);
        assert_relative_eq!(slope, -dissipation_sphere(&v), max_relative = 1e-7);
    }

    #[test]
    fn holder_chain_inequality_holds() {
        let d = Dimension::new(3).unwrap();
        let sg = SphereGrid::with_default_spec(d).unwrap();
        for v in [
            ZonalSphereField::from_fn_cos(sg.clone(), |t| 0.9 + 0.2 * t).unwrap(),
            ZonalSphereField::from_fn_cos(sg.clone(), |t| 0.7 + 0.1 * t * t).unwrap(),
            ZonalSphereField::constant(sg, 1.3),
        ] {
            let (lhs, rhs) = holder_chain_sphere(&v);
            assert!(
                lhs <= rhs * (1.0 + 1e-12) + 1e-30,
                "chain violated: {lhs} > {rhs}"
            );
        }
    }

    #[test]
    fn flow_energy_matches_between_representations_for_stationary_state() {
        // constant on the sphere <-> stationary bubble on the plane
        let d = Dimension::new(3).unwrap();
        let sg = SphereGrid::with_default_spec(d).unwrap();
        let v = ZonalSphereField::constant(sg, stationary_value_sphere(d));
        let rg = grid(3);
        let flat = stationary_energy_flat(&rg).unwrap();
        assert_relative_eq!(flow_energy_sphere(&v), flat, max_relative = 1e-10);
    }
}
