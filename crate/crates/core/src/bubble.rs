//! Extremal bubble profiles and exactly curved scenarios.
//!
//! The bubble with curvature `κ > 0`, center `z` on the axis and
//! concentration `λ` is
//!
//! ```text
//! v_κ[z,λ](x) = λ^{(n-2)/2} (n(n-2)/κ)^{(n-2)/4} (1 + λ²|x - z e|²)^{-(n-2)/2},
//! ```
//!
//! the unique positive radial solution of `-Δv = κ v^p` with `p = (n+2)/(n-2)`
//! that decays at infinity. Its Dirichlet energy and critical mass have the
//! closed forms `Sⁿ/κ^{(n-2)/2}` and `Sⁿ/κ^{n/2}` where `Sⁿ` is the n-th
//! power of the sharp Sobolev constant; those closed forms are the oracles
//! that every quadrature in this crate is tested against.
//!
//! A [`Scenario`] packages a field together with pointwise closures for its
//! exact negative Laplacian and its exact curvature, so that downstream
//! functionals can avoid numerical differentiation entirely.

use std::sync::Arc;

use statrs::function::gamma::ln_gamma;

use crate::dim::Dimension;
use crate::error::{Error, Result};
use crate::field::ModalField;
use crate::grid::RadialGrid;

/// Center/concentration/curvature coordinates of one bubble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleParams {
    /// Scalar curvature of the solved equation `-Δv = κ v^p`.
    pub kappa: f64,
    /// Center position along the symmetry axis.
    pub z: f64,
    /// Concentration parameter.
    pub lambda: f64,
}

impl BubbleParams {
    /// Bubble solving `-Δv = v^p`.
    pub fn standard(z: f64, lambda: f64) -> Self {
        Self { kappa: 1.0, z, lambda }
    }

    /// Bubble solving `-Δv = ((n+2)/4) v^p`, the stationary profile of the
    /// normalized fast diffusion flow.
    pub fn flow_stationary(dim: Dimension, z: f64, lambda: f64) -> Self {
        Self { kappa: dim.c_flow(), z, lambda }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::NonPositive(format!("bubble curvature {}", self.kappa)));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::NonPositive(format!("bubble concentration {}", self.lambda)));
        }
        if !self.z.is_finite() {
            return Err(Error::NonFinite("bubble center".into()));
        }
        Ok(())
    }

    /// `λ^{(n-2)/2} (n(n-2)/κ)^{(n-2)/4}`, the on-center value divided by
    /// `(1+0)^{-(n-2)/2} = 1`.
    pub fn amplitude(&self, dim: Dimension) -> f64 {
        let nf = dim.nf();
        self.lambda.powf((nf - 2.0) / 2.0) * (nf * (nf - 2.0) / self.kappa).powf((nf - 2.0) / 4.0)
    }

    /// Squared distance from `(r, t)` in polar-axis coordinates to the center.
    fn rho_sq(&self, r: f64, t: f64) -> f64 {
        (r * r - 2.0 * r * self.z * t + self.z * self.z).max(0.0)
    }

    pub fn eval(&self, dim: Dimension, r: f64, t: f64) -> f64 {
        let nf = dim.nf();
        let q = 1.0 + self.lambda * self.lambda * self.rho_sq(r, t);
        self.amplitude(dim) * q.powf(-(nf - 2.0) / 2.0)
    }

    /// `-Δ v_κ = κ v_κ^p`, evaluated without differentiation.
    pub fn minus_laplacian(&self, dim: Dimension, r: f64, t: f64) -> f64 {
        self.kappa * self.eval(dim, r, t).powf(dim.p())
    }

    /// `∂v/∂λ` at this parameter point.
    pub fn deriv_lambda(&self, dim: Dimension, r: f64, t: f64) -> f64 {
        let nf = dim.nf();
        let l2r2 = self.lambda * self.lambda * self.rho_sq(r, t);
        let v = self.eval(dim, r, t);
        (nf - 2.0) / (2.0 * self.lambda) * v * (1.0 - l2r2) / (1.0 + l2r2)
    }

    /// `∂v/∂z` for motion of the center along the axis.
    pub fn deriv_center(&self, dim: Dimension, r: f64, t: f64) -> f64 {
        let nf = dim.nf();
        let l2r2 = self.lambda * self.lambda * self.rho_sq(r, t);
        let v = self.eval(dim, r, t);
        (nf - 2.0) * self.lambda * self.lambda * (r * t - self.z) * v / (1.0 + l2r2)
    }

    /// Closed-form Dirichlet energy `∫|∇v|² dx = Sⁿ/κ^{(n-2)/2}`.
    pub fn dirichlet_exact(&self, dim: Dimension) -> f64 {
        sharp_sobolev_power(dim) / self.kappa.powf((dim.nf() - 2.0) / 2.0)
    }

    /// Closed-form critical mass `∫v^{2*} dx = Sⁿ/κ^{n/2}`.
    pub fn critical_mass_exact(&self, dim: Dimension) -> f64 {
        sharp_sobolev_power(dim) / self.kappa.powf(dim.nf() / 2.0)
    }
}

/// `Sⁿ`, the common value of `∫|∇v₁|²` and `∫v₁^{2*}` for the unit-curvature
/// bubble: `|S^{n-1}| (n(n-2))^{(n-2)/2} (n-2)² B((n+2)/2, (n-2)/2) / 2`.
pub fn sharp_sobolev_power(dim: Dimension) -> f64 {
    let nf = dim.nf();
    let ln_beta =
        ln_gamma((nf + 2.0) / 2.0) + ln_gamma((nf - 2.0) / 2.0) - ln_gamma(nf);
    dim.sphere_area_flat()
        * (nf * (nf - 2.0)).powf((nf - 2.0) / 2.0)
        * (nf - 2.0).powi(2)
        * ln_beta.exp()
        / 2.0
}

/// Sharp Sobolev constant `S = (Sⁿ)^{1/n}`: `‖∇u‖₂ ≥ S ‖u‖_{2*}` with
/// equality exactly on the bubble family.
pub fn sharp_sobolev_constant(dim: Dimension) -> f64 {
    sharp_sobolev_power(dim).powf(1.0 / dim.nf())
}

/// Modal field of a single bubble on the given grid. Centered bubbles are
/// stored radially; off-center ones are analyzed up to `lmax_cap` with the
/// stated relative tolerance on trailing degrees.
pub fn bubble_field(
    grid: Arc<RadialGrid>,
    params: BubbleParams,
    rel_tol: f64,
    lmax_cap: usize,
) -> Result<ModalField> {
    params.validate()?;
    let dim = grid.dim();
    if params.z == 0.0 {
        ModalField::sample_radial(grid, |r| params.eval(dim, r, 1.0))
    } else {
        ModalField::from_fn_adaptive(grid, |r, t| params.eval(dim, r, t), rel_tol, lmax_cap)
    }
}

/// Quadrature-vs-closed-form diagnostics for one bubble.
#[derive(Debug, Clone, Copy)]
pub struct BubbleCheck {
    pub dirichlet: f64,
    pub dirichlet_exact: f64,
    pub critical_mass: f64,
    pub critical_mass_exact: f64,
    /// `‖∇v‖₂ / ‖v‖_{2*}`; equals the sharp Sobolev constant on any bubble.
    pub sobolev_quotient: f64,
    /// Relative sup over resolved nodes of `|Δv + κ v^p| / κ v^p`, with the
    /// Laplacian taken numerically.
    pub residual_rel_linf: f64,
}

pub fn bubble_check(grid: &Arc<RadialGrid>, params: BubbleParams) -> Result<BubbleCheck> {
    let dim = grid.dim();
    let field = bubble_field(grid.clone(), params, 1e-13, 512)?;
    let dirichlet = field.dirichlet_energy();
    let mass = field.critical_mass();
    let quotient = dirichlet.sqrt() / mass.powf(1.0 / dim.two_star());

    // residual on the resolved region only: far-tail nodes underflow the
    // local scale of the collocation derivative; comparison is on the
    // symmetry axis where all degrees synthesize to the pointwise value
    let r_cut = 100.0 * grid.spec().map_scale / params.lambda + params.z.abs();
    let lap_axis = field.laplacian().axis_values();
    let mut rel = 0.0f64;
    for (i, &r) in grid.r().iter().enumerate() {
        if r > r_cut {
            continue;
        }
        let exact = params.minus_laplacian(dim, r, 1.0);
        rel = rel.max((lap_axis[i] + exact).abs() / exact.abs().max(1e-300));
    }

    Ok(BubbleCheck {
        dirichlet,
        dirichlet_exact: params.dirichlet_exact(dim),
        critical_mass: mass,
        critical_mass_exact: params.critical_mass_exact(dim),
        sobolev_quotient: quotient,
        residual_rel_linf: rel,
    })
}

type PointFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A positive field together with exact pointwise closures for `-Δu` and for
/// the curvature `K` of `-Δu = K u^p`. The identity holds at every point of
/// the domain, not only on the grid.
pub struct Scenario {
    pub label: String,
    pub u: ModalField,
    point_u: PointFn,
    point_minus_lap: PointFn,
    point_curvature: PointFn,
}

impl Scenario {
    pub fn new(
        label: impl Into<String>,
        u: ModalField,
        point_u: PointFn,
        point_minus_lap: PointFn,
        point_curvature: PointFn,
    ) -> Self {
        Self { label: label.into(), u, point_u, point_minus_lap, point_curvature }
    }

    pub fn dim(&self) -> Dimension {
        self.u.dim()
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.u.grid()
    }

    pub fn u_at(&self, r: f64, t: f64) -> f64 {
        (self.point_u)(r, t)
    }

    pub fn minus_lap_at(&self, r: f64, t: f64) -> f64 {
        (self.point_minus_lap)(r, t)
    }

    pub fn curvature_at(&self, r: f64, t: f64) -> f64 {
        (self.point_curvature)(r, t)
    }
}

/// Single bubble with exactly constant curvature `κ`.
pub fn single_bubble_scenario(grid: Arc<RadialGrid>, params: BubbleParams) -> Result<Scenario> {
    params.validate()?;
    let dim = grid.dim();
    let u = bubble_field(grid, params, 1e-13, 512)?;
    let pu: PointFn = Arc::new(move |r, t| params.eval(dim, r, t));
    let pl: PointFn = Arc::new(move |r, t| params.minus_laplacian(dim, r, t));
    let kappa = params.kappa;
    let pk: PointFn = Arc::new(move |_, _| kappa);
    let label = format!("bubble z={} lambda={} kappa={}", params.z, params.lambda, params.kappa);
    Ok(Scenario::new(label, u, pu, pl, pk))
}

/// Radial compact bump `(1-r²)³` on the unit ball, `C²` across `r = 1`.
pub fn unit_bump(r: f64) -> f64 {
    if r < 1.0 {
        let s = 1.0 - r * r;
        s * s * s
    } else {
        0.0
    }
}

/// Laplacian of [`unit_bump`] in `n` dimensions, again in closed form.
pub fn unit_bump_laplacian(dim: Dimension, r: f64) -> f64 {
    if r < 1.0 {
        let nf = dim.nf();
        let s = 1.0 - r * r;
        -6.0 * s * s + 24.0 * r * r * s - 6.0 * (nf - 1.0) * s * s
    } else {
        0.0
    }
}

/// Standard bubble plus `ε` times the compact bump, with the curvature
/// adjusted so `-Δu = K_ε u^p` stays exact:
/// `K_ε = (v₁^p - ε Δφ) / (v₁ + ε φ)^p`.
///
/// The bump support boundary `r = 1` must be a panel boundary of the grid
/// (map scale 1 with an even panel count), otherwise the kink at `r = 1`
/// wrecks the collocation derivative in the panel containing it.
pub fn perturbed_bubble_scenario(grid: Arc<RadialGrid>, eps: f64) -> Result<Scenario> {
    let dim = grid.dim();
    let spec = grid.spec();
    if !(spec.map_scale == 1.0 && spec.panels % 2 == 0) {
        return Err(Error::InvalidGrid(
            "perturbed bubble needs map scale 1 and an even panel count so r = 1 is a panel boundary"
                .into(),
        ));
    }
    if !(eps.is_finite() && eps.abs() < 0.5) {
        return Err(Error::NonPositive(format!(
            "perturbation size {eps} leaves the positive regime"
        )));
    }
    let v = BubbleParams::standard(0.0, 1.0);
    let p = dim.p();
    let u_point = move |r: f64| v.eval(dim, r, 1.0) + eps * unit_bump(r);
    let u = ModalField::sample_radial(grid, u_point)?;
    if u.min_on_grid() <= 0.0 {
        return Err(Error::NonPositive(format!("perturbed bubble at eps {eps}")));
    }
    let pu: PointFn = Arc::new(move |r, _| u_point(r));
    let minus_lap = move |r: f64| v.minus_laplacian(dim, r, 1.0) - eps * unit_bump_laplacian(dim, r);
    let pl: PointFn = Arc::new(move |r, _| minus_lap(r));
    let pk: PointFn = Arc::new(move |r, _| minus_lap(r) / u_point(r).powf(p));
    Ok(Scenario::new(format!("perturbed bubble eps={eps}"), u, pu, pl, pk))
}

/// Sum of standard bubbles with the exact curvature
/// `K = Σ v_i^p / (Σ v_i)^p ∈ (0, 1]`; no cutoffs are involved, so the
/// curvature identity is pointwise exact for any placement.
pub fn multi_bubble_scenario(
    grid: Arc<RadialGrid>,
    bubbles: &[(f64, f64)],
    lmax_cap: usize,
) -> Result<Scenario> {
    if bubbles.is_empty() {
        return Err(Error::InvalidGrid("multi-bubble scenario needs at least one bubble".into()));
    }
    let dim = grid.dim();
    let params: Vec<BubbleParams> =
        bubbles.iter().map(|&(z, l)| BubbleParams::standard(z, l)).collect();
    for p in &params {
        p.validate()?;
    }
    let p_exp = dim.p();
    let ps = params.clone();
    let sum = move |r: f64, t: f64| ps.iter().map(|b| b.eval(dim, r, t)).sum::<f64>();
    let ps = params.clone();
    let sum_p = move |r: f64, t: f64| {
        ps.iter().map(|b| b.eval(dim, r, t).powf(p_exp)).sum::<f64>()
    };

    let u = if params.len() == 1 && params[0].z == 0.0 {
        let s = sum.clone();
        ModalField::sample_radial(grid, move |r| s(r, 1.0))?
    } else {
        let s = sum.clone();
        ModalField::from_fn_adaptive(grid, move |r, t| s(r, t), 1e-11, lmax_cap)?
    };

    let s1 = sum.clone();
    let pu: PointFn = Arc::new(move |r, t| s1(r, t));
    let s2 = sum_p.clone();
    let pl: PointFn = Arc::new(move |r, t| s2(r, t));
    let pk: PointFn = Arc::new(move |r, t| sum_p(r, t) / sum(r, t).powf(p_exp));

    let label = format!(
        "multi-bubble [{}]",
        bubbles.iter().map(|(z, l)| format!("(z={z}, lambda={l})")).collect::<Vec<_>>().join(", ")
    );
    Ok(Scenario::new(label, u, pu, pl, pk))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn grid(n: u32) -> Arc<RadialGrid> {
        RadialGrid::new(Dimension::new(n).unwrap(), GridSpec::default()).unwrap()
    }

    #[test]
    fn sharp_constant_closed_forms() {
        // n = 3: S³ = (3√3/4) π², S = (S³)^{1/3}
        let d3 = Dimension::new(3).unwrap();
        assert_abs_diff_eq!(sharp_sobolev_power(d3), 12.820_992_204_969_127, epsilon = 1e-13);
        assert_abs_diff_eq!(
            sharp_sobolev_power(d3),
            0.75 * 3.0f64.sqrt() * std::f64::consts::PI.powi(2),
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(sharp_sobolev_constant(d3), 2.340_492_275_042_011_7, epsilon = 1e-14);
        // n = 4, 5, 6
        let d4 = Dimension::new(4).unwrap();
        assert_relative_eq!(sharp_sobolev_power(d4), 105.275_780_278_286_49, max_relative = 1e-13);
        let d5 = Dimension::new(5).unwrap();
        assert_relative_eq!(sharp_sobolev_power(d5), 844.360_264_762_738_56, max_relative = 1e-13);
        let d6 = Dimension::new(6).unwrap();
        assert_relative_eq!(sharp_sobolev_power(d6), 7_143.846_147_141_078_6, max_relative = 1e-13);
    }

    #[test]
    fn bubble_identities_match_closed_forms() {
        for n in [3u32, 4, 5] {
            let g = grid(n);
            for params in [
                BubbleParams::standard(0.0, 1.0),
                BubbleParams::standard(0.0, 3.0),
                BubbleParams { kappa: 1.25, z: 0.0, lambda: 1.0 },
            ] {
                let c = bubble_check(&g, params).unwrap();
                assert_relative_eq!(c.dirichlet, c.dirichlet_exact, max_relative = 1e-10);
                assert_relative_eq!(c.critical_mass, c.critical_mass_exact, max_relative = 1e-10);
                assert_relative_eq!(
                    c.sobolev_quotient,
                    sharp_sobolev_constant(g.dim()),
                    max_relative = 1e-10
                );
            }
        }
    }

    #[test]
    fn bubble_solves_its_equation_on_the_grid() {
        let g = grid(3);
        let c = bubble_check(&g, BubbleParams::standard(0.0, 1.0)).unwrap();
        assert!(c.residual_rel_linf < 1e-8, "residual {}", c.residual_rel_linf);
        let c2 = bubble_check(&g, BubbleParams::flow_stationary(g.dim(), 0.0, 2.0)).unwrap();
        assert!(c2.residual_rel_linf < 1e-8, "residual {}", c2.residual_rel_linf);
    }

    #[test]
    fn off_center_bubble_keeps_its_energy() {
        // translation/dilation invariance of both functionals
        let g = grid(3);
        let params = BubbleParams::standard(0.7, 2.0);
        let f = bubble_field(g, params, 1e-12, 128).unwrap();
        assert_relative_eq!(
            f.dirichlet_energy(),
            params.dirichlet_exact(f.dim()),
            max_relative = 1e-9
        );
        assert_relative_eq!(
            f.critical_mass(),
            params.critical_mass_exact(f.dim()),
            max_relative = 1e-9
        );
    }

    #[test]
    fn parameter_derivatives_match_finite_differences() {
        let d = Dimension::new(3).unwrap();
        let base = BubbleParams::standard(0.4, 1.7);
        let h = 1e-6;
        for &(r, t) in &[(0.3, 0.8), (1.9, -0.2), (5.0, 1.0)] {
            let up = BubbleParams { lambda: base.lambda + h, ..base };
            let dn = BubbleParams { lambda: base.lambda - h, ..base };
            let fd = (up.eval(d, r, t) - dn.eval(d, r, t)) / (2.0 * h);
            assert_relative_eq!(base.deriv_lambda(d, r, t), fd, max_relative = 1e-8);

            let up = BubbleParams { z: base.z + h, ..base };
            let dn = BubbleParams { z: base.z - h, ..base };
            let fd = (up.eval(d, r, t) - dn.eval(d, r, t)) / (2.0 * h);
            assert_relative_eq!(base.deriv_center(d, r, t), fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn perturbed_bubble_identity_is_exact_on_nodes() {
        let g = grid(3);
        let sc = perturbed_bubble_scenario(g.clone(), 0.05).unwrap();
        // numerical -Δu against the closed form, including across r = 1
        let lap = sc.u.laplacian();
        for (i, &r) in g.r().iter().enumerate() {
            if r > 50.0 {
                continue;
            }
            let exact = sc.minus_lap_at(r, 1.0);
            assert_relative_eq!(-lap.profile(0)[i], exact, max_relative = 1e-7);
            // curvature closure reproduces -Δu = K u^p by construction
            let back = sc.curvature_at(r, 1.0) * sc.u_at(r, 1.0).powf(g.dim().p());
            assert_relative_eq!(back, exact, max_relative = 1e-13);
        }
    }

    #[test]
    fn perturbed_bubble_curvature_deviates_linearly() {
        let g = grid(3);
        let dev = |eps: f64| {
            let sc = perturbed_bubble_scenario(g.clone(), eps).unwrap();
            g.r()
                .iter()
                .filter(|&&r| r < 20.0)
                .map(|&r| (sc.curvature_at(r, 1.0) - 1.0).abs())
                .fold(0.0f64, f64::max)
        };
        let d1 = dev(1e-3);
        let d2 = dev(2e-3);
        assert_relative_eq!(d2 / d1, 2.0, max_relative = 2e-2);
    }

    #[test]
    fn multi_bubble_curvature_is_bounded_by_one() {
        let g = grid(3);
        let sc = multi_bubble_scenario(g.clone(), &[(-3.0, 1.0), (3.0, 1.5)], 256).unwrap();
        for &r in g.r().iter().filter(|&&r| r < 50.0) {
            for &t in &[-1.0, -0.5, 0.0, 0.5, 1.0] {
                let k = sc.curvature_at(r, t);
                assert!(k > 0.0 && k <= 1.0 + 1e-14, "K = {k} at r={r}, t={t}");
            }
        }
        // the identity holds pointwise wherever we ask
        let d = g.dim();
        for &(r, t) in &[(0.5, 0.3), (3.0, -1.0), (10.0, 0.9)] {
            let lhs = sc.minus_lap_at(r, t);
            let rhs = sc.curvature_at(r, t) * sc.u_at(r, t).powf(d.p());
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn multi_bubble_field_resolves_the_sum() {
        let g = grid(3);
        let sc = multi_bubble_scenario(g.clone(), &[(-2.0, 1.0), (2.0, 1.0)], 256).unwrap();
        for &(r, t) in &[(0.0, 1.0), (2.0, 1.0), (2.0, -1.0), (1.0, 0.0)] {
            // interior points away from node radii still match pointwise
            assert_relative_eq!(sc.u.eval(r, t), sc.u_at(r, t), max_relative = 1e-9);
        }
        // mirror-symmetric pair: odd degrees vanish
        for ell in (1..=sc.u.lmax()).step_by(2) {
            let m = sc.u.profile(ell).iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            assert!(m < 1e-10, "odd degree {ell} has magnitude {m}");
        }
    }

    #[test]
    fn rejects_unusable_input() {
        let g = grid(3);
        assert!(BubbleParams { kappa: -1.0, z: 0.0, lambda: 1.0 }.validate().is_err());
        assert!(BubbleParams { kappa: 1.0, z: 0.0, lambda: 0.0 }.validate().is_err());
        assert!(perturbed_bubble_scenario(g.clone(), 0.9).is_err());
        assert!(multi_bubble_scenario(g, &[], 64).is_err());
        let odd = RadialGrid::new(Dimension::new(3).unwrap(), GridSpec::new(1.0, 31, 8)).unwrap();
        assert!(perturbed_bubble_scenario(odd, 0.01).is_err());
    }
}
