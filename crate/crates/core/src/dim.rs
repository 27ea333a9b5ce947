//! Spatial dimension and the exponent family attached to it.
//!
//! Every exponent appearing in the critical equation `-Δu = K uᵖ` and in the
//! rescaled fast diffusion flow is a fixed rational function of the dimension
//! `n >= 3`:
//!
//! * critical power `p = (n+2)/(n-2)`,
//! * Sobolev exponent `2* = 2n/(n-2)` (so `p = 2* - 1`),
//! * fast diffusion exponent `m = (n-2)/(n+2) = 1/p`,
//! * rescaled-flow coefficient `1/(1-m) = (n+2)/4`,
//! * sphere zero-order shift `n(n-2)/4`.
//!
//! They are stored as exact rationals and converted to `f64` only at
//! evaluation sites, so identities such as `p * m = 1` hold exactly.

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Spatial dimension `n >= 3` together with its derived exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension {
    n: u32,
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.n
    }
}

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::DimensionTooSmall(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    /// Critical power `p = (n+2)/(n-2)`.
    pub fn p_exact(&self) -> Ratio<i64> {
        Ratio::new(i64::from(self.n) + 2, i64::from(self.n) - 2)
    }

    /// Sobolev exponent `2* = 2n/(n-2)`.
    pub fn two_star_exact(&self) -> Ratio<i64> {
        Ratio::new(2 * i64::from(self.n), i64::from(self.n) - 2)
    }

    /// Fast diffusion exponent `m = (n-2)/(n+2)`.
    pub fn m_exact(&self) -> Ratio<i64> {
        self.p_exact().recip()
    }

    /// Coefficient `1/(1-m) = (n+2)/4` of the confluent term in the rescaled flow.
    pub fn c_flow_exact(&self) -> Ratio<i64> {
        (Ratio::from_integer(1) - self.m_exact()).recip()
    }

    /// Zero-order shift `n(n-2)/4` of the conformal Laplacian on the sphere.
    pub fn sphere_shift_exact(&self) -> Ratio<i64> {
        Ratio::new(i64::from(self.n) * (i64::from(self.n) - 2), 4)
    }

    pub fn p(&self) -> f64 {
        ratio_f64(self.p_exact())
    }

    pub fn two_star(&self) -> f64 {
        ratio_f64(self.two_star_exact())
    }

    pub fn m(&self) -> f64 {
        ratio_f64(self.m_exact())
    }

    pub fn c_flow(&self) -> f64 {
        ratio_f64(self.c_flow_exact())
    }

    pub fn sphere_shift(&self) -> f64 {
        ratio_f64(self.sphere_shift_exact())
    }

    /// Dual exponent `(2*)' = 2n/(n+2)` of the deficit norm.
    pub fn two_star_dual(&self) -> f64 {
        2.0 * self.nf() / (self.nf() + 2.0)
    }

    /// Surface area `|S^{n-1}|` of the unit sphere bounding the flat domain.
    pub fn sphere_area_flat(&self) -> f64 {
        unit_sphere_area(self.n - 1)
    }

    /// Surface area `|S^n|` of the target sphere of the conformal dictionary.
    pub fn sphere_area_target(&self) -> f64 {
        unit_sphere_area(self.n)
    }
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    r.to_f64().expect("rational fits in f64")
}

/// Surface area of the unit `m`-sphere, `|S^m| = 2 π^{(m+1)/2} / Γ((m+1)/2)`.
pub fn unit_sphere_area(m: u32) -> f64 {
    let half = (f64::from(m) + 1.0) / 2.0;
    2.0 * (half * std::f64::consts::PI.ln() - ln_gamma(half)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_rational::Ratio;

    #[test]
    fn exponents_are_exact_rationals() {
        let d3 = Dimension::new(3).unwrap();
        assert_eq!(d3.p_exact(), Ratio::from_integer(5));
        assert_eq!(d3.two_star_exact(), Ratio::from_integer(6));
        assert_eq!(d3.m_exact(), Ratio::new(1, 5));
        assert_eq!(d3.c_flow_exact(), Ratio::new(5, 4));
        assert_eq!(d3.sphere_shift_exact(), Ratio::new(3, 4));

        let d4 = Dimension::new(4).unwrap();
        assert_eq!(d4.p_exact(), Ratio::from_integer(3));
        assert_eq!(d4.two_star_exact(), Ratio::from_integer(4));
        assert_eq!(d4.m_exact(), Ratio::new(1, 3));
        assert_eq!(d4.c_flow_exact(), Ratio::new(3, 2));
        assert_eq!(d4.sphere_shift_exact(), Ratio::from_integer(2));
    }

    #[test]
    fn p_times_m_is_one_exactly() {
        for n in 3..=12 {
            let d = Dimension::new(n).unwrap();
            assert_eq!(d.p_exact() * d.m_exact(), Ratio::from_integer(1));
            assert_eq!(d.p_exact() + Ratio::from_integer(1), d.two_star_exact());
        }
    }

    #[test]
    fn rejects_low_dimensions() {
        assert!(Dimension::new(2).is_err());
        assert!(Dimension::new(0).is_err());
    }

    #[test]
    fn sphere_areas_match_closed_forms() {
        use std::f64::consts::PI;
        assert_abs_diff_eq!(unit_sphere_area(1), 2.0 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(unit_sphere_area(2), 4.0 * PI, epsilon = 1e-13);
        assert_abs_diff_eq!(unit_sphere_area(3), 2.0 * PI * PI, epsilon = 1e-13);
        // |S^4| = 8π²/3, |S^5| = π³
        assert_abs_diff_eq!(unit_sphere_area(4), 8.0 * PI * PI / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(unit_sphere_area(5), PI.powi(3), epsilon = 1e-12);
    }

    #[test]
    fn serde_round_trip_rejects_bad_dimension() {
        let d: Dimension = serde_json::from_str("4").unwrap();
        assert_eq!(d.n(), 4);
        assert!(serde_json::from_str::<Dimension>("2").is_err());
    }
}
