//! The edge-length flow `Σ_{λ ∋ ℓ} m_λ λ̇ = −4 ε_ℓ`.
//!
//! Each row couples the rates of all edges of the tetrahedra around `ℓ`
//! through the chain rule `λ̇ = Σ_i ∂λ/∂ℓ_i ℓ̇_i`, so the flow is the linear
//! system `M ℓ̇ = b`, solved at every stage of the integrator.

mod integrate;
pub mod linalg;
mod spectrum;
mod system;

pub use integrate::{
    coefficient_of_variation, run_flow, step, FlowConfig, FlowTrajectory, Integrator, Snapshot, StepResult, Termination,
};
pub use spectrum::{jacobian_spectrum, stability_report, StabilityReport};
pub use system::{
    assemble_rrf_system, dual_length_jacobian, evaluate_state, velocity, Differentiation, FlowState, RrfSystem,
};
