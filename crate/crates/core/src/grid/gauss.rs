//! Gaussian quadrature rules and barycentric interpolation utilities.
//!
//! Gauss-Jacobi rules start from the Golub-Welsch method (nodes as the
//! eigenvalues of the symmetric tridiagonal recurrence matrix), then each
//! node is polished by Newton iteration on the orthonormal recurrence and
//! the weights are recomputed from the Christoffel kernel. The polish
//! matters: raw eigensolver nodes carry `~1e-13` errors that downstream
//! modal Laplacians multiply by the largest eigenvalue. Gauss-Lobatto rules
//! (used by the spectral-element eigensolver) are found by Newton iteration
//! on the interior extrema of the Legendre polynomial.

use nalgebra::DMatrix;
use statrs::function::gamma::ln_gamma;

/// Nodes (ascending) and weights of a quadrature rule on `(-1, 1)`.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss-Jacobi rule for the weight `(1-x)^alpha (1+x)^beta`, exact for
/// polynomial integrands of degree `<= 2m - 1`.
pub fn gauss_jacobi(m: usize, alpha: f64, beta: f64) -> QuadRule {
    assert!(m >= 1, "quadrature rule needs at least one node");
    assert!(alpha > -1.0 && beta > -1.0, "Jacobi exponents must exceed -1");

    let apb = alpha + beta;
    // recurrence coefficients of the orthonormal Jacobi polynomials:
    // diag[k] and off[k] = β_k (off[0] unused)
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m];
    for k in 0..m {
        let kf = k as f64;
        let denom = 2.0 * kf + apb;
        diag[k] = if k == 0 {
            if apb + 2.0 == 0.0 {
                0.0
            } else {
                (beta - alpha) / (apb + 2.0)
            }
        } else {
            (beta * beta - alpha * alpha) / (denom * (denom + 2.0))
        };
        if k >= 1 {
            let num = kf * (kf + alpha) * (kf + beta) * (kf + apb);
            let d = 2.0 * kf + apb;
            off[k] = 2.0 / d * (num / ((d + 1.0) * (d - 1.0))).sqrt();
        }
    }

    let mut mat = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        mat[(k, k)] = diag[k];
        if k + 1 < m {
            mat[(k, k + 1)] = off[k + 1];
            mat[(k + 1, k)] = off[k + 1];
        }
    }

    // total mass of the weight: 2^{a+b+1} B(a+1, b+1)
    let mu0 = ((apb + 1.0) * 2f64.ln() + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(apb + 2.0))
    .exp();

    // p_m, p_m' and the Christoffel kernel Σ_{k<m} p_k² at x
    let eval = |x: f64| -> (f64, f64, f64) {
        let mut p_prev = 0.0;
        let mut p = 1.0 / mu0.sqrt();
        let mut dp_prev = 0.0;
        let mut dp = 0.0;
        let mut kernel = p * p;
        for k in 0..m {
            let b_next = if k + 1 < m { off[k + 1] } else { 1.0 };
            let b_k = if k == 0 { 0.0 } else { off[k] };
            let p_next = ((x - diag[k]) * p - b_k * p_prev) / b_next;
            let dp_next = (p + (x - diag[k]) * dp - b_k * dp_prev) / b_next;
            p_prev = p;
            p = p_next;
            dp_prev = dp;
            dp = dp_next;
            if k + 1 < m {
                kernel += p * p;
            }
        }
        (p, dp, kernel)
    };

    let eig = mat.symmetric_eigen();
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut weights = vec![0.0; m];
    for (x, w) in nodes.iter_mut().zip(&mut weights) {
        for _ in 0..4 {
            let (p, dp, _) = eval(*x);
            if dp == 0.0 {
                break;
            }
            let dx = p / dp;
            *x -= dx;
            if dx.abs() < 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, _, kernel) = eval(*x);
        *w = 1.0 / kernel;
    }

    // a symmetric weight has a symmetric rule; enforce it exactly
    if alpha == beta {
        for i in 0..m / 2 {
            let j = m - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            nodes[i] = -x;
            nodes[j] = x;
            let w = 0.5 * (weights[i] + weights[j]);
            weights[i] = w;
            weights[j] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
    }

    QuadRule { nodes, weights }
}

/// Gauss-Legendre rule, exact for polynomials of degree `<= 2m - 1`.
pub fn gauss_legendre(m: usize) -> QuadRule {
    gauss_jacobi(m, 0.0, 0.0)
}

/// Legendre polynomial `P_n` and its derivative at `x`.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let dp = if x.abs() < 1.0 {
        (n as f64) * (x * p - p_prev) / (x * x - 1.0)
    } else {
        // P_n'(±1) = ±^{n-1} n(n+1)/2
        let sign = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 - 1) };
        sign * (n as f64) * (n as f64 + 1.0) / 2.0
    };
    (p, dp)
}

/// Gauss-Lobatto-Legendre rule with `m >= 2` nodes including both endpoints,
/// exact for polynomials of degree `<= 2m - 3`.
pub fn gauss_lobatto_legendre(m: usize) -> QuadRule {
    assert!(m >= 2, "Lobatto rule needs at least two nodes");
    let nn = m - 1;
    let mut nodes = vec![0.0; m];
    nodes[0] = -1.0;
    nodes[nn] = 1.0;
    for i in 1..nn {
        // interior nodes are the roots of P'_{nn}; Chebyshev-Lobatto starting guess
        let mut x = -(std::f64::consts::PI * i as f64 / nn as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(nn, x);
            // Newton on P'_{nn} using the ODE (1-x²)P'' = 2xP' - nn(nn+1)P
            let f = dp;
            let fp = (2.0 * x * dp - (nn as f64) * (nn as f64 + 1.0) * p) / (1.0 - x * x);
            let step = f / fp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
    }
    // enforce symmetry
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (p, _) = legendre_with_deriv(nn, x);
            2.0 / (nn as f64 * (nn as f64 + 1.0) * p * p)
        })
        .collect();
    QuadRule { nodes, weights }
}

/// Barycentric interpolation weights for the node set `x`, scaled to avoid
/// under/overflow (only ratios of the weights ever enter a formula).
pub fn bary_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let scale = if hi > lo { 4.0 / (hi - lo) } else { 1.0 };
    (0..n)
        .map(|i| {
            let mut w = 1.0;
            for j in 0..n {
                if j != i {
                    w *= scale * (x[i] - x[j]);
                }
            }
            1.0 / w
        })
        .collect()
}

/// Dense spectral differentiation matrix on the node set `x`:
/// `(Df)_i = p'(x_i)` where `p` interpolates `f` on `x`.
pub fn diff_matrix(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let w = bary_weights(x);
    let mut d = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / (x[i] - x[j]);
                d[(i, j)] = v;
                row_sum += v;
            }
        }
        d[(i, i)] = -row_sum; // exact derivative of constants is zero
    }
    d
}

/// Evaluate the interpolating polynomial of `(x, f)` at `t` using the
/// barycentric second form; exact at the nodes themselves.
pub fn bary_eval(x: &[f64], w: &[f64], f: &[f64], t: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..x.len() {
        let dx = t - x[i];
        if dx == 0.0 {
            return f[i];
        }
        let c = w[i] / dx;
        num += c * f[i];
        den += c;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let rule = gauss_legendre(8);
        // degree 15 is the exactness limit for 8 nodes
        let exact = 2.0 / 15.0; // ∫ x^14 dx over (-1,1)
        let got: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| w * x.powi(14))
            .sum();
        assert_abs_diff_eq!(got, exact, epsilon = 1e-14);
        let total: f64 = rule.weights.iter().sum();
        assert_abs_diff_eq!(total, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_rule_matches_beta_mass() {
        // ∫ (1-x)^{1/2}(1+x)^{1/2} dx = π/2
        let rule = gauss_jacobi(10, 0.5, 0.5);
        let total: f64 = rule.weights.iter().sum();
        assert_abs_diff_eq!(total, std::f64::consts::PI / 2.0, epsilon = 1e-13);
        // ∫ x² (1-x²)^{1/2} dx = π/8
        let got: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| w * x * x)
            .sum();
        assert_abs_diff_eq!(got, std::f64::consts::PI / 8.0, epsilon = 1e-13);
    }

    #[test]
    fn lobatto_rule_has_endpoints_and_exactness() {
        let rule = gauss_lobatto_legendre(7);
        assert_eq!(rule.nodes[0], -1.0);
        assert_eq!(rule.nodes[6], 1.0);
        // degree 11 = 2m-3 exactness
        let got: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| w * x.powi(10))
            .sum();
        assert_abs_diff_eq!(got, 2.0 / 11.0, epsilon = 1e-13);
    }

    #[test]
    fn diff_matrix_differentiates_polynomials() {
        let rule = gauss_legendre(9);
        let d = diff_matrix(&rule.nodes);
        let f: Vec<f64> = rule.nodes.iter().map(|&x| x.powi(5) - 2.0 * x).collect();
        for (i, &x) in rule.nodes.iter().enumerate() {
            let df: f64 = (0..9).map(|j| d[(i, j)] * f[j]).sum();
            assert_abs_diff_eq!(df, 5.0 * x.powi(4) - 2.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn bary_eval_reproduces_interpolant() {
        let rule = gauss_legendre(12);
        let w = bary_weights(&rule.nodes);
        let f: Vec<f64> = rule.nodes.iter().map(|&x| (2.0 * x).sin()).collect();
        let got = bary_eval(&rule.nodes, &w, &f, 0.3);
        assert_abs_diff_eq!(got, (0.6f64).sin(), epsilon = 1e-9);
        assert_eq!(bary_eval(&rule.nodes, &w, &f, rule.nodes[3]), f[3]);
    }
}
