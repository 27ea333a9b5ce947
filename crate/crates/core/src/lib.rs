//! Numerical laboratory for the critical prescribed-curvature equation
//! `-Δu = K uᵖ` on `ℝⁿ` (`p = (n+2)/(n-2)`) and the associated rescaled fast
//! diffusion flow.
//!
//! The crate verifies, at controlled numerical precision, the quantitative
//! stability of the extremal bubble family: closeness of the curvature `K`
//! to a constant (measured by a critical-norm deficit) controls the distance
//! of `u` to a single bubble in the Dirichlet norm, and for the fast
//! diffusion flow the same mechanism yields an exponential convergence rate
//! toward the stationary profile.
//!
//! Module map:
//!
//! * [`dim`] dimension and the derived exponent family,
//! * [`grid`] radial panels, sphere grid, zonal bases,
//! * [`field`] axisymmetric modal fields and zonal sphere fields,
//! * [`bubble`] the extremal family, its identities and scenario fields,
//! * [`functionals`] deficit, curvature ratio `K₀`, flow energy,
//! * [`conformal`] the plane/sphere dictionary,
//! * [`projection`] Dirichlet-nearest bubble fits and the stability check,
//! * [`spectral`] the linearized weighted eigenproblem and the gap,
//! * [`flow`] implicit stepping of the rescaled fast diffusion flow,
//! * [`rate`] convergence-rate extraction along trajectories.

pub mod bubble;
pub mod conformal;
pub mod dim;
pub mod error;
pub mod field;
pub mod flow;
pub mod functionals;
pub mod grid;
pub mod projection;
pub mod rate;
pub mod spectral;

pub use dim::Dimension;
pub use error::{Error, Result};
