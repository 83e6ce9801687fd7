//! Circumcentric dual of a simplicial 3-complex.
//!
//! For every triangle `f` the dual edge `λ_f` joins the circumcenters of the
//! (at most two) tetrahedra containing `f`; it is orthogonal to `f` and
//! passes through the circumcenter of `f`, so it splits into two signed face
//! segments. For every edge `ℓ` the dual polygon `ℓ*` lies in the plane
//! bisecting `ℓ` and fans out from the midpoint of `ℓ` into triangles of
//! area `½ λ m`, where the moment arm `m` runs from the midpoint of `ℓ` to the
//! circumcenter of the triangle dual to `λ`.

use super::{Tetrahedron, Triangle};
use crate::complex::{annotate, ComplexTopology3, MetricAssignment};
use crate::error::Result;
use crate::scalar::Real;
use rayon::prelude::*;

/// All circumcentric-dual quantities of a complex under a metric.
#[derive(Debug, Clone, PartialEq)]
pub struct DualGeometry<T> {
    /// Volume of each tetrahedron.
    pub tet_volume: Vec<T>,
    /// Signed segment from the tetrahedron circumcenter to each face
    /// circumcenter, indexed `[tet][local face]`.
    pub face_segment: Vec<[T; 4]>,
    /// `λ` per triangle: sum of the face segments from its tetrahedra.
    pub dual_edge_len: Vec<T>,
    /// `m` per triangle and local edge slot (see `ComplexTopology3::triangle_edges`).
    pub moment_arm: Vec<[T; 3]>,
    /// `ℓ*` per edge.
    pub dual_polygon_area: Vec<T>,
    /// `V_ℓ = ℓ ℓ* / 3` per edge.
    pub hybrid_volume: Vec<T>,
    /// `V_ℓλ = ℓ λ m / 6` per triangle and local edge slot.
    pub reduced_hybrid_volume: Vec<[T; 3]>,
    pub tet_well_centered: Vec<bool>,
    pub triangle_well_centered: Vec<bool>,
}

impl<T: Real> DualGeometry<T> {
    pub fn is_well_centered(&self) -> bool {
        self.tet_well_centered.iter().all(|&w| w) && self.triangle_well_centered.iter().all(|&w| w)
    }

    pub fn total_volume(&self) -> T {
        self.tet_volume.iter().copied().sum()
    }

    pub fn total_hybrid_volume(&self) -> T {
        self.hybrid_volume.iter().copied().sum()
    }

    /// Fan piece `½ λ m` of the dual polygon of the edge in slot `slot` of `tri`.
    pub fn fan_area(&self, tri: usize, slot: usize) -> T {
        T::lit(0.5) * self.dual_edge_len[tri] * self.moment_arm[tri][slot]
    }
}

pub(crate) fn tetrahedron_of<T: Real>(
    top: &ComplexTopology3,
    metric: &MetricAssignment<T>,
    tet: usize,
) -> Result<Tetrahedron<T>> {
    Tetrahedron::new(top.tet_squared_lengths(tet, metric))
        .map_err(|e| annotate(e, &format!("tetrahedron {:?}", top.tetrahedra()[tet])))
}

/// Computes every dual quantity. Non-well-centered simplices yield signed
/// (possibly negative) lengths and are flagged rather than rejected.
pub fn dual_geometry<T: Real>(top: &ComplexTopology3, metric: &MetricAssignment<T>) -> Result<DualGeometry<T>> {
    metric.check_against(top)?;
    let tets: Vec<Tetrahedron<T>> =
        (0..top.tet_count()).into_par_iter().map(|t| tetrahedron_of(top, metric, t)).collect::<Result<_>>()?;
    let tris: Vec<Triangle<T>> = (0..top.triangle_count())
        .into_par_iter()
        .map(|f| {
            Triangle::new(top.triangle_squared_lengths(f, metric))
                .map_err(|e| annotate(e, &format!("triangle {:?}", top.triangles()[f])))
        })
        .collect::<Result<_>>()?;

    let face_segment: Vec<[T; 4]> = tets.iter().map(|t| std::array::from_fn(|i| t.face_segment(i))).collect();
    let dual_edge_len: Vec<T> = (0..top.triangle_count())
        .map(|f| {
            top.triangle_tets(f)
                .iter()
                .map(|&t| face_segment[t][top.face_slot(t, f).expect("face of tet")])
                .fold(T::zero(), |a, b| a + b)
        })
        .collect();
    let moment_arm: Vec<[T; 3]> = tris.iter().map(|t| std::array::from_fn(|k| t.moment_arm(k))).collect();
    let sixth = T::lit(1.0 / 6.0);
    let reduced_hybrid_volume: Vec<[T; 3]> = (0..top.triangle_count())
        .map(|f| {
            let edges = top.triangle_edges(f);
            std::array::from_fn(|k| sixth * metric.lengths_sq[edges[k]].sqrt() * dual_edge_len[f] * moment_arm[f][k])
        })
        .collect();
    let half = T::lit(0.5);
    let dual_polygon_area: Vec<T> = (0..top.edge_count())
        .map(|e| {
            top.edge_triangles(e).iter().fold(T::zero(), |acc, &f| {
                let k = top.edge_slot_in_triangle(f, e).expect("edge of triangle");
                acc + half * dual_edge_len[f] * moment_arm[f][k]
            })
        })
        .collect();
    let third = T::lit(1.0 / 3.0);
    let hybrid_volume: Vec<T> =
        dual_polygon_area.iter().zip(&metric.lengths_sq).map(|(&a, &l2)| third * l2.sqrt() * a).collect();

    Ok(DualGeometry {
        tet_volume: tets.iter().map(|t| t.volume()).collect(),
        face_segment,
        dual_edge_len,
        moment_arm,
        dual_polygon_area,
        hybrid_volume,
        reduced_hybrid_volume,
        tet_well_centered: tets.iter().map(|t| t.is_well_centered()).collect(),
        triangle_well_centered: tris.iter().map(|t| t.is_well_centered()).collect(),
    })
}

/// `λ` of a single triangle, recomputed from the squared lengths of its
/// tetrahedra only. `lengths_sq` is indexed by edge id.
pub fn dual_edge_length<T: Real>(top: &ComplexTopology3, lengths_sq: &[T], tri: usize) -> Result<T> {
    let mut lambda = T::zero();
    for &t in top.triangle_tets(tri) {
        let sq = top.tet_edges(t).map(|e| lengths_sq[e]);
        let slot = top.face_slot(t, tri).expect("face of tet");
        lambda = lambda + Tetrahedron::new(sq)?.face_segment(slot);
    }
    Ok(lambda)
}
