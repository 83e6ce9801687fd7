//! Icosahedral 3-cylinder: rings of icosahedra joined by axial edges, every
//! block a regular triangular prism with icosahedral edge `s` and axial edge `a`.
//!
//! Dual lattice: regular pentagonal prisms with edges `σ = (√3/3) s` (dual to
//! the rectangular faces) and `α = a` (dual to the triangular faces).

use crate::error::{Error, Result};
use crate::geometry::Triangle;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderModel<T> {
    pub s0: T,
    pub a0: T,
    pub n_rings: usize,
}

/// Rates from the symmetric reduction of the flow, with the pieces that produce them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderRates<T> {
    pub ds_dt: T,
    pub da_dt: T,
    pub ds2_dt: T,
    pub dr2_dt: T,
    /// `LHS_a = c · s ṡ`.
    pub lhs_a_coefficient: T,
    pub theta_s: T,
    pub theta_a: T,
    pub eps_s: T,
    pub eps_a: T,
}

/// Prisms meeting at an icosahedral / axial edge.
pub const PRISMS_PER_S_EDGE: usize = 4;
pub const PRISMS_PER_A_EDGE: usize = 5;

impl<T: Real> CylinderModel<T> {
    pub fn new(s0: T, a0: T, n_rings: usize) -> Result<Self> {
        if !(s0 > T::zero() && a0 > T::zero()) {
            return Err(Error::InvalidArgument(format!("edge lengths s0 = {s0}, a0 = {a0} must be positive")));
        }
        if n_rings < 3 {
            return Err(Error::InvalidArgument(format!("need at least 3 rings, got {n_rings}")));
        }
        Ok(Self { s0, a0, n_rings })
    }

    pub fn sigma(s: T) -> T {
        T::lit(3.0).sqrt() / T::lit(3.0) * s
    }

    /// `∂s²/∂t = −16π / (5√3)`.
    pub fn s_sq_rate() -> T {
        -T::lit(16.0) * T::PI() / (T::lit(5.0) * T::lit(3.0).sqrt())
    }

    /// `r² / s² = 5√3 / (4π)` from matching the icosahedron's area to `4π r²`.
    pub fn radius_factor() -> T {
        T::lit(5.0) * T::lit(3.0).sqrt() / (T::lit(4.0) * T::PI())
    }

    pub fn extinction_time(&self) -> T {
        -self.s0 * self.s0 / Self::s_sq_rate()
    }

    /// `(s²(t), a(t), r_eff²(t))`; `a s` is conserved.
    pub fn closed_form(&self, t: T) -> Result<(T, T, T)> {
        let s_sq = self.s0 * self.s0 + Self::s_sq_rate() * t;
        if t < T::zero() || !(s_sq > T::zero()) {
            return Err(Error::CollapseExceeded { t: t.to_f64_lossy(), t_max: self.extinction_time().to_f64_lossy() });
        }
        let a = self.a0 * self.s0 / s_sq.sqrt();
        Ok((s_sq, a, Self::radius_factor() * s_sq))
    }

    /// Evaluates `Σ m_λ λ̇ = −4 ε` on the two edge classes at `(s, a)` and solves for `(ṡ, ȧ)`.
    ///
    /// Dihedrals: along `s` the rectangle meets the cap at a right angle; along
    /// `a` two rectangles meet at the cap triangle's interior angle.
    pub fn symmetric_rrf(s: T, a: T) -> Result<CylinderRates<T>> {
        if !(s > T::zero() && a > T::zero()) {
            return Err(Error::InvalidArgument(format!("edge lengths s = {s}, a = {a} must be positive")));
        }
        let cap = Triangle::new([s * s; 3])?;
        let theta_a = cap.angle(0);
        let theta_s = T::FRAC_PI_2();
        let eps_a = T::TAU() - T::lit(PRISMS_PER_A_EDGE as f64) * theta_a;
        let eps_s = T::TAU() - T::lit(PRISMS_PER_S_EDGE as f64) * theta_s;

        // σ = (√3/3) s is twice the cap's moment arm; α = a.
        let dsigma_ds = T::lit(2.0) * cap.moment_arm(0) / s;
        let half = T::lit(0.5);
        let m_a_sigma = half * s;
        let m_s_sigma = half * a;
        let m_s_alpha = cap.moment_arm(0);
        // rows: a-edge, s-edge; columns: ṡ, ȧ
        let (m11, m12) = (T::lit(PRISMS_PER_A_EDGE as f64) * m_a_sigma * dsigma_ds, T::zero());
        let (m21, m22) = (T::lit(2.0) * m_s_sigma * dsigma_ds, T::lit(2.0) * m_s_alpha);
        let (b1, b2) = (-T::lit(4.0) * eps_a, -T::lit(4.0) * eps_s);
        let det = m11 * m22 - m12 * m21;
        let ds_dt = (b1 * m22 - m12 * b2) / det;
        let da_dt = (m11 * b2 - m21 * b1) / det;
        let ds2_dt = T::lit(2.0) * s * ds_dt;
        Ok(CylinderRates {
            ds_dt,
            da_dt,
            ds2_dt,
            dr2_dt: Self::radius_factor() * ds2_dt,
            lhs_a_coefficient: m11 / s,
            theta_s,
            theta_a,
            eps_s,
            eps_a,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn reduction_recovers_closed_form() {
        let r = CylinderModel::symmetric_rrf(1.3f64, 0.7).unwrap();
        assert_relative_eq!(r.lhs_a_coefficient, 5.0 * 3f64.sqrt() / 6.0, max_relative = 1e-14);
        assert_relative_eq!(r.eps_a, PI / 3.0, max_relative = 1e-14);
        assert_eq!(r.eps_s, 0.0);
        assert_relative_eq!(r.ds2_dt, -16.0 * PI / (5.0 * 3f64.sqrt()), max_relative = 1e-14);
        // area matching turns the s-rate into twice the continuum radius rate
        assert_relative_eq!(r.dr2_dt, CylinderModel::<f64>::radius_factor() * r.ds2_dt, max_relative = 1e-15);
        assert_relative_eq!(r.dr2_dt, -4.0, max_relative = 1e-14);
        assert!((r.da_dt / 0.7 + r.ds_dt / 1.3).abs() < 1e-14);
    }

    #[test]
    fn closed_form_start_and_invariants() {
        let m = CylinderModel::new(1.0f64, 2.0, 4).unwrap();
        let (s2, a, r2) = m.closed_form(0.0).unwrap();
        assert_eq!((s2, a), (1.0, 2.0));
        assert_relative_eq!(r2, 5.0 * 3f64.sqrt() / (4.0 * PI), max_relative = 1e-15);
        let (s2, a, _) = m.closed_form(0.1).unwrap();
        assert_relative_eq!(a * s2.sqrt(), 2.0, max_relative = 1e-14);
        assert!(m.closed_form(1.0).is_err());
        assert!(CylinderModel::new(1.0f64, 1.0, 2).is_err());
    }
}
