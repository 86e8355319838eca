//! Domains, ball quadrature and admissible step sets.

pub mod domain;
pub mod quadrature;
pub mod steps;

pub use domain::{DomainKind, DomainShape, GraphFn};
pub use quadrature::{ball_quadrature, QuadratureSet};
pub use steps::{admissible_steps, StepSet};

/// `(diameter, convex)` of a bounded domain.
pub fn domain_metrics(domain: &DomainShape) -> crate::Result<(f64, bool)> {
    domain.metrics()
}
