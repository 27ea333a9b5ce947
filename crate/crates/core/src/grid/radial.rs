//! Mapped composite Gauss-Legendre grid on the radial half line.
//!
//! The half line is pulled back to `ξ ∈ (0,1)` through `r = L ξ/(1-ξ)`; the
//! unit interval is split into equal panels, each carrying a Gauss-Legendre
//! rule. All nodes are interior, so neither the origin nor the point at
//! infinity is ever evaluated. Derivatives are per-panel spectral collocation
//! in `ξ` combined with the chain rule; integration weights carry the map
//! Jacobian and the `r^{n-1}` volume factor.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::gauss::{bary_eval, bary_weights, diff_matrix, gauss_legendre};
use crate::dim::Dimension;
use crate::error::{Error, Result};

/// Constructor parameters of a [`RadialGrid`]; doubles as its identifier in
/// serialized artifacts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Map scale `L` in `r = L ξ/(1-ξ)`.
    pub map_scale: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
}

impl GridSpec {
    pub fn new(map_scale: f64, panels: usize, nodes_per_panel: usize) -> Self {
        Self { map_scale, panels, nodes_per_panel }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { map_scale: 1.0, panels: 32, nodes_per_panel: 16 }
    }
}

/// Composite collocation/quadrature grid for radial profiles.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    dim: Dimension,
    spec: GridSpec,
    xi: Vec<f64>,
    r: Vec<f64>,
    /// weights for ∫ f r^{n-1} dr (no sphere-area factor)
    w_measure: Vec<f64>,
    /// weights for ∫ f dr
    w_dr: Vec<f64>,
    /// per-panel differentiation matrices in ξ
    d_xi: Vec<DMatrix<f64>>,
    /// per-panel barycentric weights (in ξ) for interpolation
    bary: Vec<Vec<f64>>,
    panel_width: f64,
}

impl RadialGrid {
    pub fn new(dim: Dimension, spec: GridSpec) -> Result<Arc<Self>> {
        if !(spec.map_scale.is_finite() && spec.map_scale > 0.0) {
            return Err(Error::InvalidGrid(format!("map scale {} must be positive", spec.map_scale)));
        }
        if spec.panels == 0 || spec.nodes_per_panel < 4 {
            return Err(Error::InvalidGrid(format!(
                "need at least 1 panel and 4 nodes per panel, got {}x{}",
                spec.panels, spec.nodes_per_panel
            )));
        }
        let q = spec.nodes_per_panel;
        let rule = gauss_legendre(q);
        let width = 1.0 / spec.panels as f64;
        let nf = dim.nf();
        let l = spec.map_scale;

        let mut xi = Vec::with_capacity(spec.panels * q);
        let mut r = Vec::with_capacity(spec.panels * q);
        let mut w_measure = Vec::with_capacity(spec.panels * q);
        let mut w_dr = Vec::with_capacity(spec.panels * q);
        let mut d_xi = Vec::with_capacity(spec.panels);
        let mut bary = Vec::with_capacity(spec.panels);

        for p in 0..spec.panels {
            let lo = p as f64 * width;
            let mut local_xi = Vec::with_capacity(q);
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let s = lo + 0.5 * width * (x + 1.0);
                let jac = l / ((1.0 - s) * (1.0 - s));
                let rr = l * s / (1.0 - s);
                let wd = w * 0.5 * width * jac;
                xi.push(s);
                local_xi.push(s);
                r.push(rr);
                w_dr.push(wd);
                w_measure.push(wd * rr.powf(nf - 1.0));
            }
            d_xi.push(diff_matrix(&local_xi));
            bary.push(bary_weights(&local_xi));
        }

        Ok(Arc::new(Self {
            dim,
            spec,
            xi,
            r,
            w_measure,
            w_dr,
            d_xi,
            bary,
            panel_width: width,
        }))
    }

    pub fn with_default_spec(dim: Dimension) -> Result<Arc<Self>> {
        Self::new(dim, GridSpec::default())
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// Quadrature weights of the measure `r^{n-1} dr`.
    pub fn weights(&self) -> &[f64] {
        &self.w_measure
    }

    /// Quadrature weights of the bare measure `dr`.
    pub fn dr_weights(&self) -> &[f64] {
        &self.w_dr
    }

    /// Sample a radial function at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.r.iter().map(|&rr| f(rr)).collect()
    }

    /// `∫_0^∞ f r^{n-1} dr` without the angular factor.
    pub fn integral_measure(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        f.iter().zip(&self.w_measure).map(|(a, w)| a * w).sum()
    }

    /// Full-space integral `|S^{n-1}| ∫_0^∞ f g r^{n-1} dr` of a product of
    /// radial profiles.
    pub fn radial_integral(&self, f: &[f64], g: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        debug_assert_eq!(g.len(), self.len());
        let s: f64 = f
            .iter()
            .zip(g)
            .zip(&self.w_measure)
            .map(|((a, b), w)| a * b * w)
            .sum();
        self.dim.sphere_area_flat() * s
    }

    /// First derivative `df/dr` by per-panel collocation.
    pub fn deriv(&self, f: &[f64]) -> Vec<f64> {
        debug_assert_eq!(f.len(), self.len());
        let q = self.spec.nodes_per_panel;
        let l = self.spec.map_scale;
        let mut out = vec![0.0; f.len()];
        for p in 0..self.spec.panels {
            let base = p * q;
            let d = &self.d_xi[p];
            for i in 0..q {
                let mut acc = 0.0;
                for j in 0..q {
                    acc += d[(i, j)] * f[base + j];
                }
                let s = self.xi[base + i];
                out[base + i] = acc * (1.0 - s) * (1.0 - s) / l;
            }
        }
        out
    }

    pub fn second_deriv(&self, f: &[f64]) -> Vec<f64> {
        let df = self.deriv(f);
        self.deriv(&df)
    }

    /// Laplacian restricted to a zonal mode of degree `ell`:
    /// `f'' + (n-1)/r f' - ell(ell+n-2)/r² f`.
    pub fn mode_laplacian(&self, f: &[f64], ell: u32) -> Vec<f64> {
        let df = self.deriv(f);
        let d2f = self.deriv(&df);
        let nf = self.dim.nf();
        let cent = f64::from(ell) * (f64::from(ell) + nf - 2.0);
        (0..f.len())
            .map(|i| {
                let r = self.r[i];
                d2f[i] + (nf - 1.0) * df[i] / r - cent * f[i] / (r * r)
            })
            .collect()
    }

    fn panel_of_xi(&self, s: f64) -> usize {
        let p = (s / self.panel_width) as usize;
        p.min(self.spec.panels - 1)
    }

    /// Map a radius to its pulled-back coordinate `ξ = r/(L+r)`.
    pub fn xi_of_r(&self, r: f64) -> f64 {
        r / (self.spec.map_scale + r)
    }

    /// Evaluate the per-panel interpolant of nodal samples at an arbitrary
    /// radius (any finite radius lands in exactly one panel).
    pub fn interpolate(&self, f: &[f64], r_target: f64) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        let s = self.xi_of_r(r_target);
        let p = self.panel_of_xi(s);
        let q = self.spec.nodes_per_panel;
        let base = p * q;
        bary_eval(&self.xi[base..base + q], &self.bary[p], &f[base..base + q], s)
    }

    /// Largest node radius; integrands must be negligible beyond it.
    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// Grids are interchangeable iff they share dimension and constructor
    /// parameters.
    pub fn compatible(&self, other: &Self) -> bool {
        self.dim == other.dim && self.spec == other.spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use statrs::function::gamma::ln_gamma;

    fn grid(n: u32, panels: usize, q: usize) -> Arc<RadialGrid> {
        RadialGrid::new(Dimension::new(n).unwrap(), GridSpec::new(1.0, panels, q)).unwrap()
    }

    /// ∫_0^∞ r^{a-1}(1+r²)^{-b} dr = B(a/2, b-a/2)/2, the closed form used to
    /// cross-check every quadrature below.
    fn beta_integral(a: f64, b: f64) -> f64 {
        0.5 * (ln_gamma(a / 2.0) + ln_gamma(b - a / 2.0) - ln_gamma(b)).exp()
    }

    #[test]
    fn quadrature_matches_beta_oracle_n3() {
        let g = grid(3, 32, 16);
        // ∫ r^4 (1+r²)^{-3} dr = 3π/16 with the r² measure factored in
        let f = g.sample(|r| r * r / (1.0 + r * r).powi(3));
        let got = g.integral_measure(&f);
        assert_relative_eq!(got, 3.0 * std::f64::consts::PI / 16.0, max_relative = 1e-12);
        assert_abs_diff_eq!(got, 0.589_048_622_548_086_2, epsilon = 1e-12);

        let f2 = g.sample(|r| 1.0 / (1.0 + r * r).powi(3));
        let got2 = g.integral_measure(&f2);
        assert_relative_eq!(got2, std::f64::consts::PI / 16.0, max_relative = 1e-12);
        assert_abs_diff_eq!(got2, 0.196_349_540_849_362_08, epsilon = 1e-13);
    }

    #[test]
    fn quadrature_matches_beta_oracle_general() {
        for n in [3u32, 4, 5, 6] {
            let g = grid(n, 32, 16);
            let nf = n as f64;
            let f = g.sample(|r| (1.0 + r * r).powf(-nf));
            let got = g.integral_measure(&f);
            let exact = beta_integral(nf, nf);
            assert_relative_eq!(got, exact, max_relative = 1e-11);
        }
    }

    #[test]
    fn refinement_improves_low_order_error() {
        // with 6-node panels the truncation error is visible and must drop
        // fast under panel doubling
        let d = Dimension::new(3).unwrap();
        let exact = beta_integral(5.0, 3.0);
        let errs: Vec<f64> = [4usize, 8, 16]
            .iter()
            .map(|&p| {
                let g = RadialGrid::new(d, GridSpec::new(1.0, p, 6)).unwrap();
                let f = g.sample(|r| r * r / (1.0 + r * r).powi(3));
                (g.integral_measure(&f) - exact).abs() / exact
            })
            .collect();
        assert!(errs[1] < errs[0] / 2.0, "errors {errs:?}");
        assert!(errs[2] < errs[1] / 2.0, "errors {errs:?}");
    }

    #[test]
    fn mode_laplacian_matches_closed_forms_on_resolved_region() {
        let g = grid(3, 32, 16);
        // Δ r² = 2n = 6 for the radial mode; growing fields lose accuracy in
        // the far panels, so the check stays on the resolved region
        let f = g.sample(|r| r * r);
        let lap = g.mode_laplacian(&f, 0);
        for (i, &r) in g.r().iter().enumerate() {
            if r <= 10.0 {
                assert_abs_diff_eq!(lap[i], 6.0, epsilon = 1e-5);
            }
        }
        // degree-1 mode of the linear profile is harmonic: Δ_1 r = 0
        let f1 = g.sample(|r| r);
        let lap1 = g.mode_laplacian(&f1, 1);
        for (i, &r) in g.r().iter().enumerate() {
            if r <= 10.0 {
                assert_abs_diff_eq!(lap1[i], 0.0, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn discrete_integration_by_parts_holds_for_resolved_fields() {
        // ∫ (Δ_ell f) g r^{n-1} dr = -∫ (f'g' + ell(ell+n-2) fg/r²) r^{n-1} dr
        let g = grid(3, 32, 16);
        for ell in [0u32, 1, 2] {
            let f: Vec<f64> = g.sample(|r| r.powi(ell as i32) * (-r * r).exp());
            let h: Vec<f64> = g.sample(|r| r.powi(ell as i32) * (-0.7 * r * r).exp());
            let lap = g.mode_laplacian(&f, ell);
            let lhs = g.integral_measure(&lap.iter().zip(&h).map(|(a, b)| a * b).collect::<Vec<_>>());
            let df = g.deriv(&f);
            let dh = g.deriv(&h);
            let cent = f64::from(ell) * (f64::from(ell) + 1.0);
            let integrand: Vec<f64> = (0..g.len())
                .map(|i| df[i] * dh[i] + cent * f[i] * h[i] / (g.r()[i] * g.r()[i]))
                .collect();
            let rhs = -g.integral_measure(&integrand);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-8);
        }
    }

    #[test]
    fn interpolation_is_exact_at_nodes_and_accurate_between() {
        let g = grid(3, 32, 16);
        let f = g.sample(|r| 1.0 / (1.0 + r * r));
        assert_eq!(g.interpolate(&f, g.r()[100]), f[100]);
        for &r in &[0.05, 0.77, 3.3, 41.0] {
            assert_abs_diff_eq!(g.interpolate(&f, r), 1.0 / (1.0 + r * r), epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_constructor_input() {
        let d = Dimension::new(3).unwrap();
        assert!(RadialGrid::new(d, GridSpec::new(0.0, 32, 16)).is_err());
        assert!(RadialGrid::new(d, GridSpec::new(1.0, 0, 16)).is_err());
        assert!(RadialGrid::new(d, GridSpec::new(1.0, 32, 2)).is_err());
    }
}
