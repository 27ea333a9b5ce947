//! Quadrature and collocation infrastructure: mapped radial panels for the
//! flat domain, a Gauss rule in `cos θ` for the sphere, and the zonal
//! harmonic bases connecting nodal samples to degree coefficients.

pub mod angular;
pub mod basis;
pub mod gauss;
pub mod radial;
pub mod sphere;

pub use angular::AngularRule;
pub use radial::{GridSpec, RadialGrid};
pub use sphere::{SphereGrid, SphereSpec};
