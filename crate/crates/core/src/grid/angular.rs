//! Angular synthesis rule on `S^{n-1}` for axisymmetric fields on the flat
//! domain.
//!
//! An axisymmetric field decomposes as `u(x) = Σ_ℓ f_ℓ(r) G_ℓ(cos θ_x)` with
//! `G_ℓ` the zonal harmonic of degree `ℓ` on `S^{n-1}` normalized to one on
//! the axis. The rule holds Gauss nodes in `t = cos θ_x` for the measure
//! `(1-t²)^{(n-3)/2} dt`, the basis table and its squared norms, which makes
//! analysis of degree `< nodes` content exact.

use super::basis::gegenbauer_table;
use super::gauss::gauss_jacobi;
use crate::dim::{unit_sphere_area, Dimension};

#[derive(Debug, Clone)]
pub struct AngularRule {
    dim: Dimension,
    /// cos of the angle to the axis, ascending
    t: Vec<f64>,
    /// weights of ∫_{-1}^{1} · (1-t²)^{(n-3)/2} dt
    w: Vec<f64>,
    /// basis[ℓ][j] = G_ℓ(t_j)
    basis: Vec<Vec<f64>>,
    /// h[ℓ] = ∫ G_ℓ² (1-t²)^{(n-3)/2} dt
    h: Vec<f64>,
    /// |S^{n-2}|: ∫_{S^{n-1}} F dσ = area_factor · Σ_j w_j F(t_j) for zonal F
    area_factor: f64,
}

impl AngularRule {
    /// Rule able to analyze and synthesize degrees `0..=lmax` exactly; extra
    /// nodes damp aliasing of smooth non-polynomial integrands.
    pub fn new(dim: Dimension, lmax: usize) -> Self {
        let nodes = (lmax + 1).max(32) + lmax / 2;
        Self::with_nodes(dim, lmax, nodes)
    }

    pub fn with_nodes(dim: Dimension, lmax: usize, nodes: usize) -> Self {
        let nf = dim.nf();
        let expo = (nf - 3.0) / 2.0;
        let rule = gauss_jacobi(nodes.max(lmax + 1), expo, expo);
        let lambda = (nf - 2.0) / 2.0;
        let basis = gegenbauer_table(lambda, lmax, &rule.nodes);
        let h: Vec<f64> = basis
            .iter()
            .map(|g| g.iter().zip(&rule.weights).map(|(v, w)| v * v * w).sum())
            .collect();
        Self {
            dim,
            t: rule.nodes,
            w: rule.weights,
            basis,
            h,
            area_factor: unit_sphere_area(dim.n() - 2),
        }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn lmax(&self) -> usize {
        self.basis.len() - 1
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn basis(&self, ell: usize) -> &[f64] {
        &self.basis[ell]
    }

    pub fn norm_sq(&self, ell: usize) -> f64 {
        self.h[ell]
    }

    pub fn area_factor(&self) -> f64 {
        self.area_factor
    }

    /// ∫_{S^{n-1}} G_ℓ² dσ, the angular factor of per-degree volume integrals.
    pub fn degree_weight(&self, ell: usize) -> f64 {
        self.area_factor * self.h[ell]
    }

    /// Analysis of angular samples at the rule nodes into degree coefficients.
    pub fn analyze(&self, values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.len());
        self.basis
            .iter()
            .zip(&self.h)
            .map(|(g, h)| {
                let s: f64 =
                    g.iter().zip(values).zip(&self.w).map(|((gv, fv), w)| gv * fv * w).sum();
                s / h
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn constant_integrates_to_sphere_area() {
        // area_factor · Σ w = |S^{n-1}|
        for n in [3u32, 4, 5] {
            let d = Dimension::new(n).unwrap();
            let rule = AngularRule::new(d, 4);
            let total: f64 = rule.weights().iter().sum::<f64>() * rule.area_factor();
            assert_relative_eq!(total, d.sphere_area_flat(), max_relative = 1e-13);
        }
    }

    #[test]
    fn basis_is_orthogonal_under_the_rule() {
        let d = Dimension::new(4).unwrap();
        let rule = AngularRule::new(d, 6);
        for a in 0..=6usize {
            for b in 0..a {
                let dot: f64 = (0..rule.len())
                    .map(|j| rule.basis(a)[j] * rule.basis(b)[j] * rule.weights()[j])
                    .sum();
                assert_abs_diff_eq!(dot, 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn analyze_recovers_coefficients() {
        let d = Dimension::new(3).unwrap();
        let rule = AngularRule::new(d, 3);
        let values: Vec<f64> = (0..rule.len())
            .map(|j| 1.5 * rule.basis(0)[j] - 0.25 * rule.basis(2)[j] + 2.0 * rule.basis(3)[j])
            .collect();
        let c = rule.analyze(&values);
        assert_abs_diff_eq!(c[0], 1.5, epsilon = 1e-13);
        assert_abs_diff_eq!(c[1], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(c[2], -0.25, epsilon = 1e-13);
        assert_abs_diff_eq!(c[3], 2.0, epsilon = 1e-13);
    }

    #[test]
    fn degree_weight_matches_legendre_norm_for_n3() {
        // on S² the zonal norm is ∫ P_ℓ² dσ = 4π/(2ℓ+1)
        let d = Dimension::new(3).unwrap();
        let rule = AngularRule::new(d, 5);
        for ell in 0..=5usize {
            let exact = 4.0 * std::f64::consts::PI / (2.0 * ell as f64 + 1.0);
            assert_relative_eq!(rule.degree_weight(ell), exact, max_relative = 1e-12);
        }
    }
}
