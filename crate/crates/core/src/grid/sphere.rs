//! Gauss grid in `cos θ` for zonal functions on the round sphere `S^n`.
//!
//! Zonal functions are polynomials in `t = cos θ` in the basis of zonal
//! harmonics, so a Gauss-Gegenbauer rule in `t` integrates them exactly and
//! the Laplace-Beltrami operator acts diagonally on analysis coefficients
//! with eigenvalues `-k(k+n-1)`. Differentiation through the modal route is
//! regular at the poles by construction; the Gauss nodes themselves never
//! touch the poles.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::basis::gegenbauer_table;
use super::gauss::gauss_jacobi;
use crate::dim::Dimension;
use crate::error::{Error, Result};

/// Constructor parameters of a [`SphereGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereSpec {
    pub nodes: usize,
}

impl Default for SphereSpec {
    fn default() -> Self {
        Self { nodes: 64 }
    }
}

/// Quadrature and zonal-harmonic synthesis data on `S^n`.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    dim: Dimension,
    spec: SphereSpec,
    /// cos θ at the nodes, ascending (θ descending from π to 0)
    t: Vec<f64>,
    theta: Vec<f64>,
    /// weights of ∫_{S^n} f dσ for zonal f; they sum to |S^n|
    w: Vec<f64>,
    /// basis[k][j] = zonal harmonic of degree k at node j, normalized to 1 at the pole θ=0
    basis: Vec<Vec<f64>>,
    /// ∫_{S^n} G_k² dσ
    hnorm: Vec<f64>,
    /// orthonormal rescaling basis[k]/√hnorm[k]; analysis and synthesis run
    /// through this copy to keep roundoff flat across degrees
    basis_on: Vec<Vec<f64>>,
    /// dense Laplace-Beltrami matrix on nodal values
    lap: DMatrix<f64>,
}

impl SphereGrid {
    pub fn new(dim: Dimension, spec: SphereSpec) -> Result<Arc<Self>> {
        let m = spec.nodes;
        if m < 8 {
            return Err(Error::InvalidGrid(format!("sphere grid needs >= 8 nodes, got {m}")));
        }
        let nf = dim.nf();
        let expo = (nf - 2.0) / 2.0;
        let rule = gauss_jacobi(m, expo, expo);
        let t = rule.nodes;
        let theta: Vec<f64> = t.iter().map(|&x| x.acos()).collect();
        let area = dim.sphere_area_flat(); // |S^{n-1}| multiplies the polar-angle measure
        let w: Vec<f64> = rule.weights.iter().map(|&x| x * area).collect();

        let lambda = (nf - 1.0) / 2.0;
        let basis = gegenbauer_table(lambda, m - 1, &t);
        let hnorm: Vec<f64> = basis
            .iter()
            .map(|g| g.iter().zip(&w).map(|(v, ww)| v * v * ww).sum())
            .collect();
        let basis_on: Vec<Vec<f64>> = basis
            .iter()
            .zip(&hnorm)
            .map(|(g, h)| {
                let s = 1.0 / h.sqrt();
                g.iter().map(|v| v * s).collect()
            })
            .collect();

        // Laplace-Beltrami via analysis -> eigenvalue -> synthesis in the
        // orthonormal basis
        let mut lap = DMatrix::<f64>::zeros(m, m);
        for j in 0..m {
            for i in 0..m {
                let mut acc = 0.0;
                for (k, g) in basis_on.iter().enumerate() {
                    let kf = k as f64;
                    let eig = -kf * (kf + nf - 1.0);
                    acc += eig * g[i] * g[j] * w[j];
                }
                lap[(i, j)] = acc;
            }
        }

        Ok(Arc::new(Self { dim, spec, t, theta, w, basis, hnorm, basis_on, lap }))
    }

    pub fn with_default_spec(dim: Dimension) -> Result<Arc<Self>> {
        Self::new(dim, SphereSpec::default())
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn spec(&self) -> SphereSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn cos_theta(&self) -> &[f64] {
        &self.t
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn compatible(&self, other: &Self) -> bool {
        self.dim == other.dim && self.spec == other.spec
    }

    /// ∫_{S^n} f dσ for nodal samples of a zonal function.
    pub fn integral(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        f.iter().zip(&self.w).map(|(a, w)| a * w).sum()
    }

    /// Coefficients against the orthonormalized zonal harmonics.
    fn analysis_on(&self, f: &[f64]) -> Vec<f64> {
        debug_assert_eq!(f.len(), self.len());
        self.basis_on
            .iter()
            .map(|g| g.iter().zip(f).zip(&self.w).map(|((gv, fv), w)| gv * fv * w).sum())
            .collect()
    }

    /// Analysis coefficients against the zonal harmonics (degree < node
    /// count) in the pole-normalized convention.
    pub fn analysis(&self, f: &[f64]) -> Vec<f64> {
        self.analysis_on(f)
            .iter()
            .zip(&self.hnorm)
            .map(|(c, h)| c / h.sqrt())
            .collect()
    }

    pub fn synthesis(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (k, c) in coeffs.iter().enumerate() {
            for (o, g) in out.iter_mut().zip(&self.basis[k]) {
                *o += c * g;
            }
        }
        out
    }

    /// Evaluate the zonal-harmonic expansion at an arbitrary polar cosine.
    pub fn eval_coeffs(&self, coeffs: &[f64], t: f64) -> f64 {
        let table = gegenbauer_table((self.dim.nf() - 1.0) / 2.0, coeffs.len() - 1, &[t]);
        coeffs.iter().enumerate().map(|(k, c)| c * table[k][0]).sum()
    }

    /// Laplace-Beltrami of a zonal function (modal, pole-regular).
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let nf = self.dim.nf();
        let mut c = self.analysis_on(f);
        for (k, v) in c.iter_mut().enumerate() {
            let kf = k as f64;
            *v *= -kf * (kf + nf - 1.0);
        }
        let mut out = vec![0.0; self.len()];
        for (k, cv) in c.iter().enumerate() {
            for (o, g) in out.iter_mut().zip(&self.basis_on[k]) {
                *o += cv * g;
            }
        }
        out
    }

    pub fn laplacian_matrix(&self) -> &DMatrix<f64> {
        &self.lap
    }

    /// Conformal energy `∫ (|∇v|² + shift v²) dσ`, the sphere half of the
    /// Dirichlet dictionary.
    pub fn conformal_energy(&self, f: &[f64]) -> f64 {
        let nf = self.dim.nf();
        let shift = self.dim.sphere_shift();
        let c = self.analysis_on(f);
        c.iter()
            .enumerate()
            .map(|(k, v)| {
                let kf = k as f64;
                (kf * (kf + nf - 1.0) + shift) * v * v
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn s3_grid() -> Arc<SphereGrid> {
        SphereGrid::new(Dimension::new(3).unwrap(), SphereSpec { nodes: 48 }).unwrap()
    }

    #[test]
    fn total_weight_is_sphere_area() {
        use std::f64::consts::PI;
        let g = s3_grid();
        let total: f64 = g.weights().iter().sum();
        assert_relative_eq!(total, 2.0 * PI * PI, max_relative = 1e-13);

        let g4 = SphereGrid::new(Dimension::new(4).unwrap(), SphereSpec { nodes: 32 }).unwrap();
        let total4: f64 = g4.weights().iter().sum();
        assert_relative_eq!(total4, 8.0 * PI * PI / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn analysis_synthesis_round_trip() {
        let g = s3_grid();
        let f: Vec<f64> = g.cos_theta().iter().map(|&t| 0.3 + t - 0.8 * t * t * t).collect();
        let back = g.synthesis(&g.analysis(&f));
        for (a, b) in f.iter().zip(&back) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn laplacian_has_exact_zonal_eigenvalues() {
        // degree-k zonal harmonic on S^n is an eigenfunction with -k(k+n-1);
        // on S^3 degree 2 gives -8
        let g = s3_grid();
        let mut c = vec![0.0; g.len()];
        c[2] = 1.0;
        let y2 = g.synthesis(&c);
        let lap = g.laplacian(&y2);
        for (l, y) in lap.iter().zip(&y2) {
            assert_abs_diff_eq!(*l, -8.0 * y, epsilon = 1e-11);
        }
        let mat = g.laplacian_matrix();
        for i in 0..g.len() {
            let mut acc = 0.0;
            for j in 0..g.len() {
                acc += mat[(i, j)] * y2[j];
            }
            assert_abs_diff_eq!(acc, -8.0 * y2[i], epsilon = 1e-10);
        }
    }

    #[test]
    fn conformal_energy_of_constant_is_shift_times_area() {
        // |∇1|² = 0, so the energy is n(n-2)/4 · |S^n|
        let g = s3_grid();
        let ones = vec![1.0; g.len()];
        let e = g.conformal_energy(&ones);
        let exact = 0.75 * 2.0 * std::f64::consts::PI.powi(2);
        assert_relative_eq!(e, exact, max_relative = 1e-12);
    }

    #[test]
    fn conformal_energy_matches_quadrature_on_harmonic() {
        let g = s3_grid();
        let mut c = vec![0.0; g.len()];
        c[2] = 0.7;
        c[0] = 1.1;
        let f = g.synthesis(&c);
        // energy = ∫ (-Δv + shift v) v dσ for smooth zonal v
        let lap = g.laplacian(&f);
        let integrand: Vec<f64> =
            (0..g.len()).map(|i| (-lap[i] + 0.75 * f[i]) * f[i]).collect();
        assert_relative_eq!(g.conformal_energy(&f), g.integral(&integrand), max_relative = 1e-11);
    }
}
