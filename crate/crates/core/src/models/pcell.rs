//! Regular polytope boundaries (5-, 16- and 600-cell) under the uniform flow.
//!
//! With every edge equal, `λ = √6/6 ℓ` and `m = √3/6 ℓ`, and the flow of
//! each edge reduces to `(√2 p/24) ∂(ℓ²)/∂t = −4 ε_p` with `p` tetrahedra per
//! edge. Matching the boundary volume `N_p (√2/12) ℓ³` with the 3-sphere
//! volume `2π² a³` gives the effective radius.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PCellModel<T> {
    /// Tetrahedra per edge: 3, 4 or 5.
    pub p: usize,
    /// Tetrahedra in the boundary: 5, 16 or 600.
    pub n_tets: usize,
    pub ell0_sq: T,
}

impl<T: Real> PCellModel<T> {
    pub fn new(p: usize, ell0_sq: T) -> Result<Self> {
        let n_tets = match p {
            3 => 5,
            4 => 16,
            5 => 600,
            _ => return Err(Error::InvalidArgument(format!("p = {p}: only 3, 4 and 5 tetrahedra per edge exist"))),
        };
        if !(ell0_sq > T::zero()) {
            return Err(Error::InvalidArgument(format!("initial squared length {ell0_sq} must be positive")));
        }
        Ok(Self { p, n_tets, ell0_sq })
    }

    pub fn name(&self) -> &'static str {
        match self.p {
            3 => "5-cell",
            4 => "16-cell",
            _ => "600-cell",
        }
    }

    /// Dihedral angle of the regular tetrahedron, `arcsec 3`.
    pub fn dihedral() -> T {
        (T::one() / T::lit(3.0)).acos()
    }

    pub fn deficit(&self) -> T {
        T::TAU() - T::lit(self.p as f64) * Self::dihedral()
    }

    /// `∂(ℓ²)/∂t = −96 ε / (√2 p)`.
    pub fn ell_sq_rate(&self) -> T {
        -T::lit(96.0) * self.deficit() / (T::SQRT_2() * T::lit(self.p as f64))
    }

    /// `a² / ℓ² = (√2 N / (24 π²))^{2/3}`.
    pub fn radius_factor(&self) -> T {
        let pi2 = T::PI() * T::PI();
        (T::SQRT_2() * T::lit(self.n_tets as f64) / (T::lit(24.0) * pi2)).powf(T::lit(2.0 / 3.0))
    }

    /// Edge length in units of the effective radius, `ℓ/a`.
    pub fn mesh_size(&self) -> T {
        self.radius_factor().sqrt().recip()
    }

    /// Time at which `ℓ²` reaches zero.
    pub fn extinction_time(&self) -> T {
        -self.ell0_sq / self.ell_sq_rate()
    }

    /// `(ℓ²(t), a_eff²(t))`.
    pub fn closed_form(&self, t: T) -> Result<(T, T)> {
        let ell_sq = self.ell0_sq + self.ell_sq_rate() * t;
        if t < T::zero() || !(ell_sq > T::zero()) {
            return Err(Error::CollapseExceeded { t: t.to_f64_lossy(), t_max: self.extinction_time().to_f64_lossy() });
        }
        Ok((ell_sq, ell_sq * self.radius_factor()))
    }

    /// Effective `R_χχ = −½ ∂(a²)/∂t`; the continuum value is 2.
    pub fn effective_ricci(&self) -> T {
        -T::lit(0.5) * self.ell_sq_rate() * self.radius_factor()
    }

    /// `100 |R_χχ − 2| / 2`.
    pub fn percent_deviation(&self) -> T {
        let two = T::lit(2.0);
        T::lit(100.0) * (self.effective_ricci() - two).abs() / two
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow<T> {
    pub model: &'static str,
    pub p: usize,
    pub n_tets: usize,
    pub deficit: T,
    pub effective_ricci: T,
    pub percent_deviation: T,
    pub mesh_size: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationTable<T> {
    pub rows: Vec<DeviationRow<T>>,
    /// `Δ log(deviation) / Δ log(ℓ/a)` between the 16- and 600-cell rows.
    pub slope_16_600: T,
    /// The same slope taken against the deficit angle.
    pub slope_16_600_vs_deficit: T,
}

pub fn pcell_deviation_table<T: Real>() -> DeviationTable<T> {
    let rows: Vec<DeviationRow<T>> = (3..=5)
        .map(|p| {
            let m = PCellModel::new(p, T::one()).expect("valid p");
            DeviationRow {
                model: m.name(),
                p,
                n_tets: m.n_tets,
                deficit: m.deficit(),
                effective_ricci: m.effective_ricci(),
                percent_deviation: m.percent_deviation(),
                mesh_size: m.mesh_size(),
            }
        })
        .collect();
    let (a, b) = (&rows[1], &rows[2]);
    let dlog = (b.percent_deviation / a.percent_deviation).ln();
    DeviationTable {
        slope_16_600: dlog / (b.mesh_size / a.mesh_size).ln(),
        slope_16_600_vs_deficit: dlog / (b.deficit / a.deficit).ln(),
        rows,
    }
}
