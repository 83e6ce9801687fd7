//! Regge–Ricci flow on piecewise-flat simplicial 3-geometries.
//!
//! The metric of a simplicial complex is its set of squared edge lengths.
//! From these alone the crate computes the circumcentric dual lattice,
//! deficit-angle curvature and the simplicial Ricci, scalar and Riemann
//! curvatures, and integrates the coupled edge-length flow
//! `Σ_λ m_λ λ̇ = −4 ε_ℓ` (one equation per edge).
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common double-precision instantiations.

pub mod complex;
pub mod curvature;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod models;
pub mod scalar;

pub use complex::{build_complex, validate_metric, ComplexTopology3, MetricAssignment, ValidationReport};
pub use curvature::CurvatureField;
pub use error::{Error, Result};
pub use flow::{FlowConfig, FlowTrajectory, Integrator, Termination};
pub use geometry::DualGeometry;
pub use scalar::{Differentiable, Real, Tangent};

pub type Metric = MetricAssignment<f64>;
pub type Metric32 = MetricAssignment<f32>;
pub type Dual = DualGeometry<f64>;
pub type Dual32 = DualGeometry<f32>;
pub type Curvature = CurvatureField<f64>;
pub type Curvature32 = CurvatureField<f32>;
pub type Config = FlowConfig<f64>;
pub type Config32 = FlowConfig<f32>;
pub type Trajectory = FlowTrajectory<f64>;
pub type Trajectory32 = FlowTrajectory<f32>;
