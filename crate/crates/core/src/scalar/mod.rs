//! Scalar abstraction shared by every numeric routine in the crate.

mod tangent;

pub use tangent::Tangent;

use num_dual::DualNum;
use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the geometry, curvature and flow code is generic over.
///
/// Implemented for `f32` and `f64`. The associated tolerances are scaled to
/// the precision of the type so the same algorithms behave sensibly for both.
pub trait Real: Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static {
    /// Relative tolerance for realizability and degeneracy tests, measured
    /// against the largest squared length of the simplex under test.
    fn geometric_tolerance() -> Self;

    /// Default relative step for central finite differences.
    fn default_fd_step() -> Self;

    /// Largest 1-norm condition estimate accepted by the linear solver.
    fn max_condition() -> Self;

    /// Converts an `f64` literal. Every `f64` is representable (possibly rounded).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn geometric_tolerance() -> Self {
        1e-12
    }
    fn default_fd_step() -> Self {
        1e-6
    }
    fn max_condition() -> Self {
        1e12
    }
}

impl Real for f32 {
    fn geometric_tolerance() -> Self {
        1e-5
    }
    fn default_fd_step() -> Self {
        2e-3
    }
    fn max_condition() -> Self {
        1e6
    }
}

/// Scalars that forward-mode derivatives can be taken over (`f32`, `f64`).
pub trait Differentiable: Real + DualNum<Self> {}

impl Differentiable for f64 {}
impl Differentiable for f32 {}
