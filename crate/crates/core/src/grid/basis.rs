//! Zonal (Gegenbauer) polynomial bases shared by the sphere grid and the
//! angular synthesis rule.
//!
//! `G_k` denotes the Gegenbauer polynomial `C_k^λ` normalized so that
//! `G_k(1) = 1`; with `λ = (d-1)/2` these are the zonal spherical harmonics
//! of degree `k` on `S^d` as functions of the cosine of the polar angle.

/// Table `out[k][j] = G_k(t_j)` for `k = 0..=kmax`.
pub fn gegenbauer_table(lambda: f64, kmax: usize, t: &[f64]) -> Vec<Vec<f64>> {
    assert!(lambda > 0.0, "Gegenbauer index must be positive");
    let m = t.len();
    let mut raw = vec![vec![0.0; m]; kmax + 1];
    let mut at_one = vec![0.0; kmax + 1];
    at_one[0] = 1.0;
    for j in 0..m {
        raw[0][j] = 1.0;
    }
    if kmax >= 1 {
        at_one[1] = 2.0 * lambda;
        for j in 0..m {
            raw[1][j] = 2.0 * lambda * t[j];
        }
    }
    for k in 2..=kmax {
        let kf = k as f64;
        let a = 2.0 * (kf + lambda - 1.0) / kf;
        let b = (kf + 2.0 * lambda - 2.0) / kf;
        at_one[k] = a * at_one[k - 1] - b * at_one[k - 2];
        for j in 0..m {
            raw[k][j] = a * t[j] * raw[k - 1][j] - b * raw[k - 2][j];
        }
    }
    for k in 0..=kmax {
        let c = at_one[k];
        for v in raw[k].iter_mut() {
            *v /= c;
        }
    }
    raw
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn half_index_reduces_to_legendre() {
        // C_k^{1/2} = P_k; check P_2 and P_3
        let t = [-0.9, -0.3, 0.2, 0.8];
        let g = gegenbauer_table(0.5, 3, &t);
        for (j, &x) in t.iter().enumerate() {
            assert_abs_diff_eq!(g[2][j], 0.5 * (3.0 * x * x - 1.0), epsilon = 1e-14);
            assert_abs_diff_eq!(g[3][j], 0.5 * (5.0 * x * x * x - 3.0 * x), epsilon = 1e-14);
        }
    }

    #[test]
    fn normalization_at_one() {
        let t = [1.0];
        for lambda in [0.5, 1.0, 1.5, 2.0] {
            let g = gegenbauer_table(lambda, 6, &t);
            for k in 0..=6 {
                assert_abs_diff_eq!(g[k][0], 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn index_one_gives_chebyshev_second_kind_ratio() {
        // C_k^1(cos θ) = sin((k+1)θ)/sin θ, so G_k = sin((k+1)θ)/((k+1) sin θ)
        let theta: f64 = 0.7;
        let g = gegenbauer_table(1.0, 4, &[theta.cos()]);
        for k in 0..=4 {
            let exact = ((k as f64 + 1.0) * theta).sin() / ((k as f64 + 1.0) * theta.sin());
            assert_abs_diff_eq!(g[k][0], exact, epsilon = 1e-13);
        }
    }
}
