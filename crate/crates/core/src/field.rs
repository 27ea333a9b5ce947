//! Field representations.
//!
//! [`ModalField`] stores an axisymmetric function on `ℝⁿ` as zonal modal
//! profiles: `u(x) = Σ_ℓ f_ℓ(r) G_ℓ(cos θ_x)` with `G_ℓ` the degree-`ℓ`
//! zonal harmonic on `S^{n-1}` normalized to one on the symmetry axis. A
//! purely radial field has `lmax = 0`. [`ZonalSphereField`] stores a zonal
//! function on `S^n` by its values at the sphere grid nodes.
//!
//! Nonlinear functionals evaluate modal fields on the `(r, t)` tensor grid
//! through zonal synthesis; angular content above `lmax` is a documented
//! truncation of the representation, not of any individual operation.

use std::sync::Arc;

use crate::dim::Dimension;
use crate::error::{Error, Result};
use crate::grid::basis::gegenbauer_table;
use crate::grid::{AngularRule, RadialGrid, SphereGrid};

/// Axisymmetric field on the flat domain in zonal modal form.
#[derive(Debug, Clone)]
pub struct ModalField {
    grid: Arc<RadialGrid>,
    /// profiles[ℓ] sampled at the radial nodes, ℓ = 0..=lmax
    profiles: Vec<Vec<f64>>,
}

impl ModalField {
    /// Purely radial field (`lmax = 0`).
    pub fn radial(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        Self::from_profiles(grid, vec![values])
    }

    pub fn from_profiles(grid: Arc<RadialGrid>, profiles: Vec<Vec<f64>>) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::GridMismatch("field needs at least the degree-0 profile".into()));
        }
        for (ell, p) in profiles.iter().enumerate() {
            if p.len() != grid.len() {
                return Err(Error::GridMismatch(format!(
                    "profile {} has {} samples, grid has {}",
                    ell,
                    p.len(),
                    grid.len()
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("degree-{ell} profile")));
            }
        }
        Ok(Self { grid, profiles })
    }

    /// Zero field with the given number of degrees.
    pub fn zeros(grid: Arc<RadialGrid>, lmax: usize) -> Self {
        let n = grid.len();
        Self { grid, profiles: vec![vec![0.0; n]; lmax + 1] }
    }

    /// Sample a radial function at the nodes.
    pub fn sample_radial(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.sample(&f);
        Self::radial(grid, values)
    }

    /// Analyze a pointwise axisymmetric function `f(r, cos θ_x)` into modal
    /// profiles of degree `<= lmax`.
    pub fn from_fn(
        grid: Arc<RadialGrid>,
        lmax: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let rule = AngularRule::new(grid.dim(), lmax);
        Self::from_fn_with_rule(grid, &rule, f)
    }

    pub fn from_fn_with_rule(
        grid: Arc<RadialGrid>,
        rule: &AngularRule,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let lmax = rule.lmax();
        let nr = grid.len();
        let mut profiles = vec![vec![0.0; nr]; lmax + 1];
        let mut row = vec![0.0; rule.len()];
        for (i, &r) in grid.r().iter().enumerate() {
            for (j, &t) in rule.t().iter().enumerate() {
                row[j] = f(r, t);
            }
            let coeffs = rule.analyze(&row);
            for (ell, c) in coeffs.iter().enumerate() {
                profiles[ell][i] = *c;
            }
        }
        Self::from_profiles(grid, profiles)
    }

    /// Analyze with the smallest `lmax` (doubling from 8 up to `lmax_cap`)
    /// whose trailing two degree profiles fall below `rel_tol` relative to
    /// the field maximum.
    pub fn from_fn_adaptive(
        grid: Arc<RadialGrid>,
        f: impl Fn(f64, f64) -> f64,
        rel_tol: f64,
        lmax_cap: usize,
    ) -> Result<Self> {
        let mut lmax = 8usize.min(lmax_cap);
        loop {
            let field = Self::from_fn(grid.clone(), lmax, &f)?;
            let scale = field
                .profiles
                .iter()
                .flat_map(|p| p.iter())
                .fold(0.0f64, |a, &v| a.max(v.abs()));
            let tail = field.profiles[lmax.saturating_sub(1)..]
                .iter()
                .flat_map(|p| p.iter())
                .fold(0.0f64, |a, &v| a.max(v.abs()));
            if tail <= rel_tol * scale || lmax >= lmax_cap {
                if tail > rel_tol * scale {
                    return Err(Error::Unresolved(format!(
                        "angular content not resolved at lmax {lmax}: tail {tail:.3e} vs scale {scale:.3e}"
                    )));
                }
                return Ok(field.trimmed(rel_tol));
            }
            lmax = (2 * lmax).min(lmax_cap);
        }
    }

    /// Drop trailing degrees whose profiles are below `rel_tol` of the field
    /// maximum (always keeps degree 0).
    pub fn trimmed(mut self, rel_tol: f64) -> Self {
        let scale = self
            .profiles
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0f64, |a, &v| a.max(v.abs()));
        while self.profiles.len() > 1 {
            let last = self.profiles.last().unwrap();
            if last.iter().all(|v| v.abs() <= rel_tol * scale) {
                self.profiles.pop();
            } else {
                break;
            }
        }
        self
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn dim(&self) -> Dimension {
        self.grid.dim()
    }

    pub fn lmax(&self) -> usize {
        self.profiles.len() - 1
    }

    pub fn is_radial(&self) -> bool {
        self.profiles.len() == 1
    }

    pub fn profile(&self, ell: usize) -> &[f64] {
        &self.profiles[ell]
    }

    pub fn profiles(&self) -> &[Vec<f64>] {
        &self.profiles
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch(
                "fields live on different grids or dimensions".into(),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.combine(other, 1.0))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.combine(other, -1.0))
    }

    /// `self + c * other`; degrees missing on one side count as zero.
    fn combine(&self, other: &Self, c: f64) -> Self {
        let lmax = self.lmax().max(other.lmax());
        let n = self.grid.len();
        let mut profiles = vec![vec![0.0; n]; lmax + 1];
        for (ell, out) in profiles.iter_mut().enumerate() {
            for i in 0..n {
                let a = self.profiles.get(ell).map_or(0.0, |p| p[i]);
                let b = other.profiles.get(ell).map_or(0.0, |p| p[i]);
                out[i] = a + c * b;
            }
        }
        Self { grid: self.grid.clone(), profiles }
    }

    pub fn add_scaled(&self, c: f64, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.combine(other, c))
    }

    pub fn scale(&self, c: f64) -> Self {
        let profiles = self
            .profiles
            .iter()
            .map(|p| p.iter().map(|v| c * v).collect())
            .collect();
        Self { grid: self.grid.clone(), profiles }
    }

    /// Evaluate at radius `r` and axis cosine `t` by per-panel radial
    /// interpolation and zonal synthesis.
    pub fn eval(&self, r: f64, t: f64) -> f64 {
        let lambda = (self.dim().nf() - 2.0) / 2.0;
        let g = gegenbauer_table(lambda, self.lmax(), &[t]);
        self.profiles
            .iter()
            .enumerate()
            .map(|(ell, p)| self.grid.interpolate(p, r) * g[ell][0])
            .sum()
    }

    /// Values on the positive symmetry axis at the radial nodes.
    pub fn axis_values(&self) -> Vec<f64> {
        let n = self.grid.len();
        let mut out = vec![0.0; n];
        for p in &self.profiles {
            for (o, v) in out.iter_mut().zip(p) {
                *o += v;
            }
        }
        out
    }

    /// Synthesize on the `(r, t)` tensor grid of the rule; layout is
    /// row-major over radial nodes.
    pub fn synth(&self, rule: &AngularRule) -> Vec<f64> {
        assert!(rule.lmax() >= self.lmax(), "angular rule too small for field");
        let nr = self.grid.len();
        let nt = rule.len();
        let mut out = vec![0.0; nr * nt];
        for (ell, p) in self.profiles.iter().enumerate() {
            let g = rule.basis(ell);
            for i in 0..nr {
                let f = p[i];
                if f != 0.0 {
                    let row = &mut out[i * nt..(i + 1) * nt];
                    for (o, gv) in row.iter_mut().zip(g) {
                        *o += f * gv;
                    }
                }
            }
        }
        out
    }

    /// Integrate `g(r, t, u(r,t))` over `ℝⁿ` on the tensor grid.
    pub fn tensor_integral(
        &self,
        rule: &AngularRule,
        g: impl Fn(f64, f64, f64) -> f64,
    ) -> f64 {
        let vals = self.synth(rule);
        let nt = rule.len();
        let mut acc = 0.0;
        for (i, (&r, &wr)) in self.grid.r().iter().zip(self.grid.weights()).enumerate() {
            let mut inner = 0.0;
            for (j, (&t, &wt)) in rule.t().iter().zip(rule.weights()).enumerate() {
                inner += wt * g(r, t, vals[i * nt + j]);
            }
            acc += wr * inner;
        }
        rule.area_factor() * acc
    }

    /// `∫ |u|^q dx` over the flat domain.
    pub fn lq_mass(&self, q: f64, rule: &AngularRule) -> f64 {
        self.tensor_integral(rule, |_, _, u| u.abs().powf(q))
    }

    /// `∫ u^{2*} dx` with the sign kept (fields are positive in every
    /// scenario; the sign makes misuse visible).
    pub fn critical_mass(&self) -> f64 {
        let rule = self.angular_rule();
        let q = self.dim().two_star();
        self.tensor_integral(&rule, |_, _, u| u.abs().powf(q).copysign(u))
    }

    fn angular_rule(&self) -> AngularRule {
        AngularRule::new(self.dim(), self.lmax())
    }

    /// Dirichlet energy `∫ |∇u|² dx` from the modal profiles:
    /// `Σ_ℓ A_ℓ ∫ (f_ℓ'² + ℓ(ℓ+n-2) f_ℓ²/r²) r^{n-1} dr` with
    /// `A_ℓ = ∫_{S^{n-1}} G_ℓ² dσ`.
    pub fn dirichlet_energy(&self) -> f64 {
        let rule = self.angular_rule();
        let nf = self.dim().nf();
        let grid = &self.grid;
        let mut total = 0.0;
        for (ell, p) in self.profiles.iter().enumerate() {
            let dp = grid.deriv(p);
            let cent = ell as f64 * (ell as f64 + nf - 2.0);
            let integrand: Vec<f64> = (0..grid.len())
                .map(|i| {
                    let r = grid.r()[i];
                    dp[i] * dp[i] + cent * p[i] * p[i] / (r * r)
                })
                .collect();
            total += rule.degree_weight(ell) * grid.integral_measure(&integrand);
        }
        total
    }

    /// `∫ (∇u · ∇v) dx` through the same per-degree quadrature.
    pub fn dirichlet_inner(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        let lmax = self.lmax().max(other.lmax());
        let rule = AngularRule::new(self.dim(), lmax);
        let nf = self.dim().nf();
        let grid = &self.grid;
        let zero = vec![0.0; grid.len()];
        let mut total = 0.0;
        for ell in 0..=lmax {
            let a = self.profiles.get(ell).map_or(&zero[..], |p| &p[..]);
            let b = other.profiles.get(ell).map_or(&zero[..], |p| &p[..]);
            let da = grid.deriv(a);
            let db = grid.deriv(b);
            let cent = ell as f64 * (ell as f64 + nf - 2.0);
            let integrand: Vec<f64> = (0..grid.len())
                .map(|i| {
                    let r = grid.r()[i];
                    da[i] * db[i] + cent * a[i] * b[i] / (r * r)
                })
                .collect();
            total += rule.degree_weight(ell) * grid.integral_measure(&integrand);
        }
        Ok(total)
    }

    /// Laplacian applied per degree.
    pub fn laplacian(&self) -> Self {
        let profiles = self
            .profiles
            .iter()
            .enumerate()
            .map(|(ell, p)| self.grid.mode_laplacian(p, ell as u32))
            .collect();
        Self { grid: self.grid.clone(), profiles }
    }

    /// Minimum of the synthesized values over the tensor grid.
    pub fn min_on_grid(&self) -> f64 {
        let rule = self.angular_rule();
        let vals = self.synth(&rule);
        vals.into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        let rule = self.angular_rule();
        let vals = self.synth(&rule);
        vals.into_iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Translation-dilation reparameterization
    /// `u[z,λ](x) = λ^{(n-2)/2} u(λ(x - z e))`, re-analyzed on the same grid.
    pub fn reparameterized(&self, z: f64, lambda: f64, lmax_out: usize) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::NonPositive(format!("dilation parameter {lambda}")));
        }
        let amp = lambda.powf((self.dim().nf() - 2.0) / 2.0);
        let me = self.clone();
        Self::from_fn(self.grid.clone(), lmax_out, move |r, t| {
            // image point λ(x - z e) in polar form
            let rho2 = r * r - 2.0 * r * z * t + z * z;
            let rho = rho2.max(0.0).sqrt() * lambda;
            let tt = if rho > 0.0 { lambda * (r * t - z) / rho } else { 1.0 };
            amp * me.eval(rho, tt.clamp(-1.0, 1.0))
        })
    }
}

/// Zonal function on the round sphere `S^n`, sampled at the grid nodes.
#[derive(Debug, Clone)]
pub struct ZonalSphereField {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

impl ZonalSphereField {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "sphere field has {} samples, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sphere field".into()));
        }
        Ok(Self { grid, values })
    }

    /// Sample a function of the polar-angle cosine.
    pub fn from_fn_cos(grid: Arc<SphereGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.cos_theta().iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Arc<SphereGrid>, c: f64) -> Self {
        let n = grid.len();
        Self { grid, values: vec![c; n] }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn dim(&self) -> Dimension {
        self.grid.dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch("sphere fields on different grids".into()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn scale(&self, c: f64) -> Self {
        let values = self.values.iter().map(|v| c * v).collect();
        Self { grid: self.grid.clone(), values }
    }

    pub fn integral(&self) -> f64 {
        self.grid.integral(&self.values)
    }

    /// `∫_{S^n} |v|^{2*} dσ`.
    pub fn critical_mass(&self) -> f64 {
        let q = self.dim().two_star();
        let f: Vec<f64> = self.values.iter().map(|v| v.abs().powf(q)).collect();
        self.grid.integral(&f)
    }

    /// Conformal energy `∫ (|∇v|² + (n(n-2)/4) v²) dσ`.
    pub fn conformal_energy(&self) -> f64 {
        self.grid.conformal_energy(&self.values)
    }

    pub fn laplacian(&self) -> Self {
        Self { grid: self.grid.clone(), values: self.grid.laplacian(&self.values) }
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &v| a.min(v))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v))
    }

    /// Evaluate at an arbitrary polar cosine through the zonal expansion.
    pub fn eval_cos(&self, t: f64) -> f64 {
        let c = self.grid.analysis(&self.values);
        self.grid.eval_coeffs(&c, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn grid3() -> Arc<RadialGrid> {
        RadialGrid::new(Dimension::new(3).unwrap(), GridSpec::default()).unwrap()
    }

    #[test]
    fn radial_field_has_lmax_zero() {
        let g = grid3();
        let u = ModalField::sample_radial(g, |r| (-r).exp()).unwrap();
        assert!(u.is_radial());
        assert_eq!(u.lmax(), 0);
    }

    #[test]
    fn algebra_rejects_mismatched_grids() {
        let g1 = grid3();
        let g2 = RadialGrid::new(Dimension::new(3).unwrap(), GridSpec::new(1.0, 16, 16)).unwrap();
        let a = ModalField::sample_radial(g1, |r| r).unwrap();
        let b = ModalField::sample_radial(g2, |r| r).unwrap();
        assert!(a.try_add(&b).is_err());
    }

    #[test]
    fn add_pads_missing_degrees_with_zeros() {
        let g = grid3();
        let a = ModalField::sample_radial(g.clone(), |r| (-r * r).exp()).unwrap();
        let b = ModalField::from_fn(g, 2, |r, t| {
            (-r * r).exp() * (0.5 + t * t)
        })
        .unwrap();
        let s = a.try_add(&b).unwrap();
        assert_eq!(s.lmax(), 2);
        for i in 0..s.profile(0).len() {
            assert_abs_diff_eq!(
                s.profile(0)[i],
                a.profile(0)[i] + b.profile(0)[i],
                epsilon = 0.0
            );
            assert_abs_diff_eq!(s.profile(2)[i], b.profile(2)[i], epsilon = 0.0);
        }
    }

    #[test]
    fn from_fn_recovers_modal_content() {
        // t² = (2 G_2 + 1)/3 on S² in Legendre terms: G_0 coeff 1/3, G_2 coeff 2/3
        let g = grid3();
        let u = ModalField::from_fn(g, 2, |r, t| (-r).exp() * t * t).unwrap();
        let i = 40;
        let e = (-u.grid().r()[i]).exp();
        assert_abs_diff_eq!(u.profile(0)[i], e / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(u.profile(1)[i], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(u.profile(2)[i], 2.0 * e / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn eval_matches_source_function() {
        let g = grid3();
        let f = |r: f64, t: f64| (-0.5 * r * r).exp() * (1.0 + 0.3 * t);
        let u = ModalField::from_fn(g, 1, f).unwrap();
        for &(r, t) in &[(0.3, 0.9), (1.7, -0.4), (4.0, 0.0)] {
            assert_abs_diff_eq!(u.eval(r, t), f(r, t), epsilon = 1e-10);
        }
    }

    #[test]
    fn dirichlet_energy_of_gaussian_matches_closed_form() {
        // ∫ |∇ e^{-r²/2}|² dx over ℝ³ = 4π ∫ r⁴ e^{-r²} dr = (3/2) π^{3/2}
        let g = grid3();
        let u = ModalField::sample_radial(g, |r| (-0.5 * r * r).exp()).unwrap();
        let exact = 1.5 * std::f64::consts::PI.powf(1.5);
        assert_relative_eq!(u.dirichlet_energy(), exact, max_relative = 1e-11);
    }

    #[test]
    fn dirichlet_energy_of_degree_one_field() {
        // u = r e^{-r²} t: ∫|∇u|² = A_1 ∫ (f'² + 2 f²/r²) r² dr, A_1 = 4π/3
        let g = grid3();
        let u = ModalField::from_fn(g.clone(), 1, |r, t| r * (-r * r).exp() * t).unwrap();
        let f: Vec<f64> = g.sample(|r| r * (-r * r).exp());
        let df = g.deriv(&f);
        let integrand: Vec<f64> = (0..g.len())
            .map(|i| df[i] * df[i] + 2.0 * f[i] * f[i] / (g.r()[i] * g.r()[i]))
            .collect();
        let exact = 4.0 * std::f64::consts::PI / 3.0 * g.integral_measure(&integrand);
        assert_relative_eq!(u.dirichlet_energy(), exact, max_relative = 1e-12);
        assert_relative_eq!(u.dirichlet_inner(&u).unwrap(), exact, max_relative = 1e-12);
    }

    #[test]
    fn critical_mass_matches_direct_quadrature() {
        let g = grid3();
        let u = ModalField::sample_radial(g.clone(), |r| 1.0 / (1.0 + r * r)).unwrap();
        // ∫ u^6 dx = 4π ∫ r²(1+r²)^{-6} dr = 4π · B(3/2, 9/2)/2 = 7π²/128
        let exact = 7.0 * std::f64::consts::PI.powi(2) / 128.0;
        assert_relative_eq!(u.critical_mass(), exact, max_relative = 1e-11);
    }

    #[test]
    fn reparameterization_round_trip() {
        let g = grid3();
        let u = ModalField::sample_radial(g, |r| (1.0 + r * r).powf(-0.5)).unwrap();
        let moved = u.reparameterized(0.4, 2.0, 24).unwrap();
        let back = moved.reparameterized(-0.8, 0.5, 24).unwrap();
        // (u[z,λ])[z',λ'] with λ' = 1/λ, z' = -λ z undoes the motion
        for &(r, t) in &[(0.2, 1.0), (1.3, -0.6), (3.0, 0.2)] {
            assert_abs_diff_eq!(back.eval(r, t), u.eval(r, t), epsilon = 1e-9);
        }
    }

    #[test]
    fn degree_profiles_vanish_at_origin_like_r_ell() {
        // shifted bubble: degree-ℓ profile must behave like O(r^ℓ) near zero
        let g = grid3();
        let u = ModalField::from_fn(g, 3, |r, t| {
            let rho2 = 1.0 + r * r - 2.0 * 0.5 * r * t + 0.25;
            rho2.powf(-0.5)
        })
        .unwrap();
        let r0 = u.grid().r()[0];
        for ell in 1..=3usize {
            let c = u.profile(ell)[0].abs() / r0.powi(ell as i32);
            assert!(c.is_finite() && c < 10.0, "degree {ell} origin behavior: {c}");
        }
    }

    #[test]
    fn sphere_field_algebra_and_mass() {
        let d = Dimension::new(3).unwrap();
        let g = SphereGrid::with_default_spec(d).unwrap();
        let v = ZonalSphereField::constant(g.clone(), 2.0);
        let w = ZonalSphereField::from_fn_cos(g, |t| t).unwrap();
        let s = v.try_add(&w).unwrap();
        assert_relative_eq!(
            s.integral(),
            2.0 * 2.0 * std::f64::consts::PI.powi(2),
            max_relative = 1e-12
        );
        // ∫ 2^{2*} = 64 |S³| for n = 3
        assert_relative_eq!(
            v.critical_mass(),
            64.0 * 2.0 * std::f64::consts::PI.powi(2),
            max_relative = 1e-12
        );
    }
}
