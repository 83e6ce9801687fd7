//! Deficit angles and the simplicial Riemann, Ricci and scalar curvatures.
//!
//! In three dimensions the hinges are the edges. A hinge `h` carries the
//! deficit `ε_h` and the dual polygon area `h*`; the sectional curvature
//! `K_h = ε_h / h*` is spread uniformly over the hinge's hybrid cell. Curvature
//! at other sites is a weighted average over the hinges meeting the site,
//! `factor · ⟨ε⟩ / ⟨h*⟩`, with `factor = 1, d−1, d(d−1)` for Riemann, Ricci
//! and scalar curvature.

use crate::complex::{ComplexTopology3, MetricAssignment};
use crate::error::{Error, Result};
use crate::geometry::{dual_geometry, tetrahedron_of, DualGeometry};
use crate::scalar::Real;
use rayon::prelude::*;

/// Deficit angle `2π − Σθ` of every edge.
///
/// Edges on the boundary of a non-closed complex get the turning angle
/// `π − Σθ` instead, so that a flat boundary edge reads zero.
pub fn deficit_angles<T: Real>(top: &ComplexTopology3, metric: &MetricAssignment<T>) -> Result<Vec<T>> {
    metric.check_against(top)?;
    let dihedrals: Vec<[T; 6]> = (0..top.tet_count())
        .into_par_iter()
        .map(|t| tetrahedron_of(top, metric, t).map(|tet| std::array::from_fn(|e| tet.dihedral_angle(e))))
        .collect::<Result<_>>()?;
    let two_pi = T::TAU();
    Ok((0..top.edge_count())
        .map(|e| {
            let sum = top.edge_tets(e).iter().fold(T::zero(), |acc, &t| {
                let slot = top.tet_edges(t).iter().position(|&x| x == e).expect("edge of tet");
                acc + dihedrals[t][slot]
            });
            let boundary = top.edge_triangles(e).iter().any(|&f| top.triangle_tets(f).len() < 2);
            if boundary {
                T::PI() - sum
            } else {
                two_pi - sum
            }
        })
        .collect())
}

/// `K = ε / h*`.
pub fn sectional_curvature<T: Real>(deficit: T, dual_area: T) -> Result<T> {
    if dual_area == T::zero() || !dual_area.is_finite() {
        return Err(Error::ZeroDualArea(format!("hinge with deficit {deficit}")));
    }
    Ok(deficit / dual_area)
}

/// Curvatures of an Einstein space with sectional curvature `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EinsteinCurvatures<T> {
    pub riemann: T,
    pub ricci: T,
    pub scalar: T,
}

/// `(K, (d−1)K, d(d−1)K)`.
pub fn einstein_space_curvatures<T: Real>(d: usize, sectional: T) -> Result<EinsteinCurvatures<T>> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension {d} < 2 has no sectional curvature")));
    }
    Ok(EinsteinCurvatures {
        riemann: sectional * trace_factor(CurvatureKind::Riemann, d),
        ricci: sectional * trace_factor(CurvatureKind::Ricci, d),
        scalar: sectional * trace_factor(CurvatureKind::Scalar, d),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureKind {
    Riemann,
    Ricci,
    Scalar,
}

/// Lattice element a curvature is assigned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Site {
    Hinge,
    Edge,
    Vertex,
}

pub fn trace_factor<T: Real>(kind: CurvatureKind, d: usize) -> T {
    let d = T::lit(d as f64);
    match kind {
        CurvatureKind::Riemann => T::one(),
        CurvatureKind::Ricci => d - T::one(),
        CurvatureKind::Scalar => d * (d - T::one()),
    }
}

/// `⟨ε⟩ / ⟨h*⟩` over `(ε_h, h*_h, w_h)` triples, where `w_h` is the portion of
/// hinge `h` nearest the site. The normalisation of the weights cancels.
pub fn hinge_average<T: Real>(entries: impl IntoIterator<Item = (T, T, T)>, site: &str) -> Result<T> {
    let (mut num, mut den, mut wsum) = (T::zero(), T::zero(), T::zero());
    for (eps, area, w) in entries {
        num = num + eps * w;
        den = den + area * w;
        wsum = wsum + w.abs();
    }
    if wsum == T::zero() {
        return Err(Error::ZeroWeightSum { site: site.to_string() });
    }
    if den == T::zero() || !den.is_finite() {
        return Err(Error::ZeroDualArea(site.to_string()));
    }
    Ok(num / den)
}

/// One entry of the hinge/edge/vertex × Riemann/Ricci/scalar table for `d = 3`.
///
/// Hinge weights: at a hinge the hinge itself; at an edge `ℓ` the hinges
/// containing `ℓ` (only `ℓ` itself in 3D) weighted by `ℓ`; at a vertex the
/// incident edges weighted by the half nearest the vertex, `ℓ/2`.
pub fn curvature_on_sites<T: Real>(
    top: &ComplexTopology3,
    metric: &MetricAssignment<T>,
    dual: &DualGeometry<T>,
    deficit: &[T],
    kind: CurvatureKind,
    site: Site,
) -> Result<Vec<T>> {
    const D: usize = 3;
    let factor: T = trace_factor(kind, D);
    let hinge = |e: usize, w: T| (deficit[e], dual.dual_polygon_area[e], w);
    let len = |e: usize| metric.lengths_sq[e].sqrt();
    match site {
        Site::Hinge | Site::Edge => (0..top.edge_count())
            .map(|e| {
                let w = if site == Site::Hinge { T::one() } else { len(e) };
                Ok(factor * hinge_average([hinge(e, w)], &format!("edge {}", top.edge_key(e)))?)
            })
            .collect(),
        Site::Vertex => (0..top.vertex_count())
            .map(|v| {
                if top.vertex_edges(v).is_empty() {
                    return Ok(T::zero());
                }
                let half = T::lit(0.5);
                let entries = top.vertex_edges(v).iter().map(|&e| hinge(e, half * len(e)));
                Ok(factor * hinge_average(entries, &format!("vertex {v}"))?)
            })
            .collect(),
    }
}

/// `Rc_ℓ` through the general edge average; equals `2 ε_ℓ / ℓ*` in 3D.
pub fn rc_edge<T: Real>(
    top: &ComplexTopology3,
    metric: &MetricAssignment<T>,
    dual: &DualGeometry<T>,
    deficit: &[T],
) -> Result<Vec<T>> {
    curvature_on_sites(top, metric, dual, deficit, CurvatureKind::Ricci, Site::Edge)
}

/// `2 ε_ℓ / ℓ*` directly.
pub fn rc_edge_closed_form<T: Real>(dual: &DualGeometry<T>, deficit: &[T]) -> Result<Vec<T>> {
    deficit
        .iter()
        .zip(&dual.dual_polygon_area)
        .map(|(&eps, &area)| Ok(T::lit(2.0) * sectional_curvature(eps, area)?))
        .collect()
}

/// `R_v = 6 Σ ε_h h_v / Σ h*_h h_v` over edges at `v`.
pub fn scalar_vertex<T: Real>(
    top: &ComplexTopology3,
    metric: &MetricAssignment<T>,
    dual: &DualGeometry<T>,
    deficit: &[T],
) -> Result<Vec<T>> {
    curvature_on_sites(top, metric, dual, deficit, CurvatureKind::Scalar, Site::Vertex)
}

/// `Rc_λ` per triangle: average of `Rc_h = 2 ε_h / h*` over the triangle's
/// three edges, weighted by the fan piece `½ λ m` of each edge's dual polygon
/// that borders `λ`.
pub fn rc_dual_edge<T: Real>(top: &ComplexTopology3, dual: &DualGeometry<T>, deficit: &[T]) -> Result<Vec<T>> {
    let two = T::lit(2.0);
    (0..top.triangle_count())
        .map(|f| {
            let edges = top.triangle_edges(f);
            let mut num = T::zero();
            let mut den = T::zero();
            let mut abs = T::zero();
            for (k, &e) in edges.iter().enumerate() {
                let w = dual.fan_area(f, k);
                let rc_h = two * sectional_curvature(deficit[e], dual.dual_polygon_area[e])?;
                num = num + rc_h * w;
                den = den + w;
                abs = abs + w.abs();
            }
            if abs == T::zero() || den.abs() <= T::epsilon() * abs {
                return Err(Error::ZeroWeightSum { site: format!("triangle {:?}", top.triangles()[f]) });
            }
            Ok(num / den)
        })
        .collect()
}

/// Regge–Hilbert action `(1/8π) Σ_ℓ ε_ℓ ℓ`.
pub fn regge_action<T: Real>(top: &ComplexTopology3, metric: &MetricAssignment<T>, deficit: &[T]) -> T {
    let sum = (0..top.edge_count()).fold(T::zero(), |acc, e| acc + deficit[e] * metric.lengths_sq[e].sqrt());
    sum / (T::lit(8.0) * T::PI())
}

/// Every curvature quantity of a complex under a metric.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField<T> {
    pub deficit: Vec<T>,
    pub sectional: Vec<T>,
    pub rc_edge: Vec<T>,
    pub rc_dual: Vec<T>,
    pub scalar_vertex: Vec<T>,
    pub regge_action: T,
}

impl<T: Real> CurvatureField<T> {
    pub fn compute(top: &ComplexTopology3, metric: &MetricAssignment<T>) -> Result<(Self, DualGeometry<T>)> {
        let dual = dual_geometry(top, metric)?;
        let field = Self::from_dual(top, metric, &dual)?;
        Ok((field, dual))
    }

    pub fn from_dual(top: &ComplexTopology3, metric: &MetricAssignment<T>, dual: &DualGeometry<T>) -> Result<Self> {
        let deficit = deficit_angles(top, metric)?;
        let sectional = (0..top.edge_count())
            .map(|e| {
                sectional_curvature(deficit[e], dual.dual_polygon_area[e])
                    .map_err(|_| Error::ZeroDualArea(format!("edge {}", top.edge_key(e))))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            rc_edge: rc_edge(top, metric, dual, &deficit)?,
            rc_dual: rc_dual_edge(top, dual, &deficit)?,
            scalar_vertex: scalar_vertex(top, metric, dual, &deficit)?,
            regge_action: regge_action(top, metric, &deficit),
            sectional,
            deficit,
        })
    }
}
