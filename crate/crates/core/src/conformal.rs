//! Conformal dictionary between radial fields on `ℝⁿ` and zonal fields on `S^n`.
//!
//! Under stereographic projection with `r = cot(θ/2)`, i.e.
//! `cos θ = (r²-1)/(r²+1)`, a radial field `u` on the plane and a zonal field
//! `v` on the sphere correspond through
//!
//! ```text
//! v(θ) = (1 - cos θ)^{-(n-2)/2} u(r(θ)),
//! u(r) = (2/(1+r²))^{(n-2)/2} v(θ(r)),
//! ```
//!
//! and the dictionary sends `∫ u^{2*} dx = ∫ v^{2*} dσ`,
//! `∫ |∇u|² dx = ∫ (|∇v|² + (n(n-2)/4) v²) dσ`, and the curvature residual
//! `Δu + K u^p` to `Δ_S v + K v^p - (n(n-2)/4) v` with critical-norm weight
//! one. The stationary bubble of curvature `(n+2)/4` maps to the constant
//! `(n(n-2)/(n+2))^{(n-2)/4}`.
//!
//! Only the radial/zonal pair is implemented: a non-radial axisymmetric flat
//! field corresponds to a non-zonal sphere function, which the sphere grid
//! cannot represent, so such inputs are rejected rather than silently
//! projected.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{ModalField, ZonalSphereField};
use crate::grid::{RadialGrid, SphereGrid};

/// `cos θ` of the sphere point corresponding to radius `r`.
pub fn cos_theta_of_r(r: f64) -> f64 {
    (r * r - 1.0) / (r * r + 1.0)
}

/// Radius corresponding to polar cosine `t ∈ (-1, 1)`.
pub fn r_of_cos_theta(t: f64) -> f64 {
    ((1.0 + t) / (1.0 - t)).sqrt()
}

/// Transport a radial flat field onto the sphere grid.
pub fn plane_to_sphere(u: &ModalField, sphere: Arc<SphereGrid>) -> Result<ZonalSphereField> {
    if u.dim() != sphere.dim() {
        return Err(Error::GridMismatch("dimension mismatch in conformal transport".into()));
    }
    if !u.is_radial() {
        return Err(Error::OffAxis(
            "only radial flat fields transport to zonal sphere fields; this one has angular content"
                .into(),
        ));
    }
    let expo = (u.dim().nf() - 2.0) / 2.0;
    let profile = u.profile(0);
    let grid = u.grid();
    let values: Vec<f64> = sphere
        .cos_theta()
        .iter()
        .map(|&t| {
            let r = r_of_cos_theta(t);
            (1.0 - t).powf(-expo) * grid.interpolate(profile, r)
        })
        .collect();
    ZonalSphereField::new(sphere, values)
}

/// Transport a zonal sphere field back to a radial flat field.
pub fn sphere_to_plane(v: &ZonalSphereField, grid: Arc<RadialGrid>) -> Result<ModalField> {
    if v.dim() != grid.dim() {
        return Err(Error::GridMismatch("dimension mismatch in conformal transport".into()));
    }
    let expo = (v.dim().nf() - 2.0) / 2.0;
    // evaluate the zonal expansion once per radial node through its
    // analysis coefficients
    let coeffs = v.grid().analysis(v.values());
    let values: Vec<f64> = grid
        .r()
        .iter()
        .map(|&r| {
            let t = cos_theta_of_r(r);
            (2.0 / (1.0 + r * r)).powf(expo) * v.grid().eval_coeffs(&coeffs, t)
        })
        .collect();
    ModalField::radial(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubble::{perturbed_bubble_scenario, BubbleParams};
    use crate::dim::Dimension;
    use crate::functionals::{
        curvature_normalizer, curvature_normalizer_sphere, deficit_scenario, deficit_sphere,
        stationary_value_sphere,
    };
    use crate::grid::{AngularRule, GridSpec, SphereSpec};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn grids(n: u32) -> (Arc<RadialGrid>, Arc<SphereGrid>) {
        let d = Dimension::new(n).unwrap();
        (
            RadialGrid::new(d, GridSpec::default()).unwrap(),
            SphereGrid::new(d, SphereSpec { nodes: 64 }).unwrap(),
        )
    }

    #[test]
    fn stationary_bubble_maps_to_the_constant() {
        for n in [3u32, 4, 5] {
            let (rg, sg) = grids(n);
            let d = rg.dim();
            let params = BubbleParams::flow_stationary(d, 0.0, 1.0);
            let u = ModalField::sample_radial(rg, |r| params.eval(d, r, 1.0)).unwrap();
            let v = plane_to_sphere(&u, sg).unwrap();
            let c = stationary_value_sphere(d);
            for &val in v.values() {
                assert_relative_eq!(val, c, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn round_trip_reproduces_the_field() {
        let (rg, sg) = grids(3);
        let d = rg.dim();
        let u = ModalField::sample_radial(rg.clone(), |r| {
            BubbleParams::standard(0.0, 2.0).eval(d, r, 1.0) + 0.3 * (-r * r).exp()
        })
        .unwrap();
        let v = plane_to_sphere(&u, sg).unwrap();
        let back = sphere_to_plane(&v, rg.clone()).unwrap();
        for (i, &r) in rg.r().iter().enumerate() {
            if r < 30.0 {
                assert_relative_eq!(back.profile(0)[i], u.profile(0)[i], max_relative = 1e-8);
            }
            let _ = r;
        }
    }

    #[test]
    fn critical_mass_is_invariant() {
        let (rg, sg) = grids(3);
        let d = rg.dim();
        let u = ModalField::sample_radial(rg, |r| BubbleParams::standard(0.0, 1.3).eval(d, r, 1.0))
            .unwrap();
        let v = plane_to_sphere(&u, sg).unwrap();
        assert_relative_eq!(v.critical_mass(), u.critical_mass(), max_relative = 1e-10);
    }

    #[test]
    fn dirichlet_energy_maps_to_conformal_energy() {
        let (rg, sg) = grids(3);
        let d = rg.dim();
        let u = ModalField::sample_radial(rg, |r| {
            BubbleParams::standard(0.0, 1.0).eval(d, r, 1.0) + 0.05 * (-0.5 * r * r).exp()
        })
        .unwrap();
        let v = plane_to_sphere(&u, sg).unwrap();
        assert_relative_eq!(v.conformal_energy(), u.dirichlet_energy(), max_relative = 1e-9);
        assert_relative_eq!(
            curvature_normalizer_sphere(&v),
            curvature_normalizer(&u),
            max_relative = 1e-9
        );
    }

    #[test]
    fn pointwise_residual_obeys_the_dictionary() {
        // Δ_S v + K₀ v^p - shift·v at a sphere node equals the flat residual
        // at the matching radius times ((1+r²)/2)^{(n+2)/2}
        let (rg, sg) = grids(3);
        let d = rg.dim();
        let eps = 0.05;
        let v1 = BubbleParams::standard(0.0, 1.0);
        let u_pt = move |r: f64| v1.eval(d, r, 1.0) + eps * (-r * r).exp();
        let minus_lap = move |r: f64| {
            v1.minus_laplacian(d, r, 1.0) - eps * (4.0 * r * r - 2.0 * d.nf()) * (-r * r).exp()
        };
        let u = ModalField::sample_radial(rg, u_pt).unwrap();
        let k0 = curvature_normalizer(&u);
        let v = plane_to_sphere(&u, sg.clone()).unwrap();
        let sphere_resid = crate::functionals::sphere_residual(&v, k0);
        let p = d.p();
        let weight_pow = (d.nf() + 2.0) / 2.0;
        for (j, &t) in sg.cos_theta().iter().enumerate() {
            let r = r_of_cos_theta(t);
            let flat = -minus_lap(r) + k0 * u_pt(r).powf(p);
            let expected = flat * ((1.0 + r * r) / 2.0).powf(weight_pow);
            assert_abs_diff_eq!(sphere_resid[j], expected, epsilon = 2e-8);
        }
    }

    #[test]
    fn deficit_agrees_through_the_dictionary_at_quadrature_accuracy() {
        // the |·|^{2n/(n+2)} density matches pointwise, but its kink at
        // residual zero crossings limits either side's quadrature to roughly
        // (panel count)^{-2.2}; the norms agree to that accuracy, while the
        // pointwise test above pins the identity itself
        let (rg, sg) = grids(3);
        let sc = perturbed_bubble_scenario(rg, 0.05).unwrap();
        let k0 = curvature_normalizer(&sc.u);
        let rule = AngularRule::new(sc.dim(), 4);
        let flat = deficit_scenario(&sc, k0, &rule);
        let v = plane_to_sphere(&sc.u, sg).unwrap();
        let sphere = deficit_sphere(&v, k0);
        assert_relative_eq!(flat, sphere, max_relative = 2e-3);
    }

    #[test]
    fn non_radial_fields_are_rejected() {
        let (rg, sg) = grids(3);
        let u = ModalField::from_fn(rg, 2, |r, t| (-r * r).exp() * (1.0 + 0.1 * t)).unwrap();
        let err = plane_to_sphere(&u, sg).unwrap_err();
        assert!(matches!(err, Error::OffAxis(_)));
    }

    #[test]
    fn coordinate_maps_are_mutually_inverse() {
        for &r in &[0.1, 1.0, 7.5] {
            assert_abs_diff_eq!(r_of_cos_theta(cos_theta_of_r(r)), r, epsilon = 1e-13);
        }
    }
}
