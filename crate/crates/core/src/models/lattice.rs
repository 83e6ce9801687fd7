//! Lattice generators.
//!
//! Vertex coordinates are used here only to discover combinatorics; every
//! metric produced is intrinsic (squared edge lengths).

use super::cylinder::{CylinderModel, PRISMS_PER_A_EDGE, PRISMS_PER_S_EDGE};
use crate::complex::{build_complex, ComplexTopology3, MetricAssignment};
use crate::error::{Error, Result};
use crate::geometry::Triangle;
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;

/// Boundary of the 4-simplex (`p = 3`), 16-cell (`p = 4`) or 600-cell
/// (`p = 5`), every squared length 1.
pub fn generate_pcell_lattice<T: Real>(p: usize) -> Result<(ComplexTopology3, MetricAssignment<T>)> {
    let tets = match p {
        3 => (0..5)
            .map(|skip| {
                let v: Vec<usize> = (0..5).filter(|&v| v != skip).collect();
                [v[0], v[1], v[2], v[3]]
            })
            .collect(),
        4 => {
            let pts: Vec<[f64; 4]> = (0..8)
                .map(|i| {
                    let mut x = [0.0; 4];
                    x[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
                    x
                })
                .collect();
            clique_tetrahedra(&pts, 2.0)
        }
        5 => {
            let phi = (1.0 + 5f64.sqrt()) / 2.0;
            clique_tetrahedra(&six_hundred_cell_vertices(), 1.0 / (phi * phi))
        }
        _ => return Err(Error::InvalidArgument(format!("p = {p}: only 3, 4 and 5 tetrahedra per edge exist"))),
    };
    let top = build_complex(&tets)?;
    let metric = MetricAssignment::uniform(&top, T::one());
    Ok((top, metric))
}

/// The 120 unit icosians.
fn six_hundred_cell_vertices() -> Vec<[f64; 4]> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts = Vec::with_capacity(120);
    for i in 0..4 {
        for s in [1.0, -1.0] {
            let mut x = [0.0; 4];
            x[i] = s;
            pts.push(x);
        }
    }
    for mask in 0..16 {
        pts.push(std::array::from_fn(|i| if mask >> i & 1 == 1 { -0.5 } else { 0.5 }));
    }
    let base = [phi / 2.0, 0.5, 0.5 / phi, 0.0];
    let even_perms = (0..4usize)
        .flat_map(|a| (0..4).flat_map(move |b| (0..4).flat_map(move |c| (0..4).map(move |d| [a, b, c, d]))))
        .filter(|q| {
            let distinct = q.iter().collect::<BTreeSet<_>>().len() == 4;
            let inversions = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| q[i] > q[j]).count();
            distinct && inversions % 2 == 0
        });
    for perm in even_perms {
        for mask in 0..8 {
            // signs on the three non-zero entries
            let signed: [f64; 4] =
                std::array::from_fn(|k| if k < 3 && mask >> k & 1 == 1 { -base[k] } else { base[k] });
            let mut x = [0.0; 4];
            for k in 0..4 {
                x[perm[k]] = signed[k];
            }
            pts.push(x);
        }
    }
    pts
}

/// All 4-cliques of the graph joining points at squared distance `edge_sq`.
fn clique_tetrahedra(pts: &[[f64; 4]], edge_sq: f64) -> Vec<[usize; 4]> {
    let n = pts.len();
    let dist = |a: usize, b: usize| (0..4).map(|k| (pts[a][k] - pts[b][k]).powi(2)).sum::<f64>();
    let adj: Vec<Vec<bool>> =
        (0..n).map(|a| (0..n).map(|b| a != b && (dist(a, b) - edge_sq).abs() < 1e-9).collect()).collect();
    let mut tets = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !adj[a][b] {
                continue;
            }
            for c in b + 1..n {
                if !(adj[a][c] && adj[b][c]) {
                    continue;
                }
                for d in c + 1..n {
                    if adj[a][d] && adj[b][d] && adj[c][d] {
                        tets.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    tets
}

/// Flat 3-torus tiled by the body-centred-cubic tetrahedral honeycomb:
/// `n³` cube-corner vertices and `n³` body centres, `12 n³` congruent
/// disphenoids with edges `1, 1` (corner–corner, centre–centre) and `√3/2`
/// (corner–centre). Every simplex is acute, so the lattice is well-centred.
pub fn generate_flat_torus<T: Real>(n: usize) -> Result<(ComplexTopology3, MetricAssignment<T>)> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("torus needs n >= 3 cells per side, got {n}")));
    }
    let wrap = |i: usize, d: isize| ((i as isize + d).rem_euclid(n as isize)) as usize;
    let corner = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let centre = |i: usize, j: usize, k: usize| n * n * n + corner(i, j, k);
    let mut tets = Vec::with_capacity(12 * n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for axis in 0..3 {
                    // corner–corner edge from (i,j,k) along `axis`; the centres around
                    // it form a square in the perpendicular plane
                    let mut far = [i, j, k];
                    far[axis] = wrap(far[axis], 1);
                    let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
                    let ring = [(0, 0), (-1, 0), (-1, -1), (0, -1)];
                    let centre_at = |du: isize, dv: isize| {
                        let mut c = [i, j, k];
                        c[u] = wrap(c[u], du);
                        c[v] = wrap(c[v], dv);
                        centre(c[0], c[1], c[2])
                    };
                    for q in 0..4 {
                        let (a, b) = (ring[q], ring[(q + 1) % 4]);
                        tets.push([
                            corner(i, j, k),
                            corner(far[0], far[1], far[2]),
                            centre_at(a.0, a.1),
                            centre_at(b.0, b.1),
                        ]);
                    }
                }
            }
        }
    }
    let top = build_complex(&tets)?;
    let half = n * n * n;
    let three_quarters = T::lit(0.75);
    let lengths_sq =
        top.edges().iter().map(|&[a, b]| if (a < half) == (b < half) { T::one() } else { three_quarters }).collect();
    Ok((top, MetricAssignment::new(lengths_sq)))
}

/// The flat torus of [`generate_flat_torus`] with every vertex displaced by
/// an independent uniform offset in `[-amplitude, amplitude]³` (units of the
/// cube edge). The metric stays exactly flat but loses the lattice symmetry,
/// which makes the flow matrix nonsingular.
pub fn generate_jittered_flat_torus<T: Real>(
    n: usize,
    amplitude: f64,
    seed: u64,
) -> Result<(ComplexTopology3, MetricAssignment<T>)> {
    if !(0.0..0.1).contains(&amplitude) {
        return Err(Error::InvalidArgument(format!("jitter amplitude must lie in [0, 0.1), got {amplitude}")));
    }
    let (top, _) = generate_flat_torus::<T>(n)?;
    let half = n * n * n;
    let position = |v: usize| {
        let (c, offset) = if v < half { (v, 0.0) } else { (v - half, 0.5) };
        [(c / (n * n)) as f64 + offset, ((c / n) % n) as f64 + offset, (c % n) as f64 + offset]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter: Vec<[f64; 3]> =
        (0..2 * half).map(|_| std::array::from_fn(|_| amplitude * rng.random_range(-1.0..=1.0))).collect();
    let period = n as f64;
    let lengths_sq = top
        .edges()
        .iter()
        .map(|&[a, b]| {
            let (pa, pb) = (position(a), position(b));
            let sq: f64 = (0..3)
                .map(|k| {
                    // nearest periodic image of the unjittered edge
                    let d = pb[k] - pa[k];
                    let d = d - (d / period).round() * period;
                    (d + jitter[b][k] - jitter[a][k]).powi(2)
                })
                .sum();
            T::lit(sq)
        })
        .collect();
    Ok((top, MetricAssignment::new(lengths_sq)))
}

/// Icosahedron: 12 vertices, 30 edges, 20 faces (vertex ids into its own list).
pub fn icosahedron() -> (Vec<[usize; 2]>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<[f64; 3]> = Vec::with_capacity(12);
    for axis in 0..3 {
        for s1 in [1.0, -1.0] {
            for s2 in [phi, -phi] {
                let mut x = [0.0; 3];
                x[(axis + 1) % 3] = s1;
                x[(axis + 2) % 3] = s2;
                pts.push(x);
            }
        }
    }
    let adjacent = |a: usize, b: usize| {
        let d: f64 = (0..3).map(|k| (pts[a][k] - pts[b][k]).powi(2)).sum();
        (d - 4.0).abs() < 1e-9
    };
    let mut edges = Vec::new();
    let mut faces = Vec::new();
    for a in 0..12 {
        for b in a + 1..12 {
            if !adjacent(a, b) {
                continue;
            }
            edges.push([a, b]);
            for c in b + 1..12 {
                if adjacent(a, c) && adjacent(b, c) {
                    faces.push([a, b, c]);
                }
            }
        }
    }
    (edges, faces)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrismEdgeKind {
    /// Icosahedral edge `s`, within a ring.
    Icosahedral,
    /// Axial edge `a`, joining a vertex to its copy in the next ring.
    Axial,
}

/// Periodic ring of icosahedra joined by regular triangular prisms. Ring `r`
/// owns vertices `12 r .. 12 r + 12`; ring `n_rings − 1` connects back to ring 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrismComplex {
    pub n_rings: usize,
    pub vertex_count: usize,
    pub edges: Vec<[usize; 2]>,
    pub edge_kinds: Vec<PrismEdgeKind>,
    /// `[bottom triangle, top triangle]`, vertex `k` of the top above vertex `k` of the bottom.
    pub prisms: Vec<[[usize; 3]; 2]>,
}

impl PrismComplex {
    pub fn new(n_rings: usize) -> Result<Self> {
        if n_rings < 3 {
            return Err(Error::InvalidArgument(format!("need at least 3 rings, got {n_rings}")));
        }
        let (ico_edges, ico_faces) = icosahedron();
        let shift = |v: usize, r: usize| 12 * (r % n_rings) + v;
        let mut edges = Vec::new();
        let mut edge_kinds = Vec::new();
        let mut prisms = Vec::new();
        for r in 0..n_rings {
            for &[a, b] in &ico_edges {
                edges.push([shift(a, r), shift(b, r)]);
                edge_kinds.push(PrismEdgeKind::Icosahedral);
            }
            for v in 0..12 {
                let mut e = [shift(v, r), shift(v, r + 1)];
                e.sort_unstable();
                edges.push(e);
                edge_kinds.push(PrismEdgeKind::Axial);
            }
            for f in &ico_faces {
                prisms.push([f.map(|v| shift(v, r)), f.map(|v| shift(v, r + 1))]);
            }
        }
        Ok(Self { n_rings, vertex_count: 12 * n_rings, edges, edge_kinds, prisms })
    }

    /// Prisms containing each edge, counted from the incidence structure.
    pub fn prisms_per_edge(&self) -> Vec<usize> {
        self.edges
            .iter()
            .map(|&[a, b]| {
                self.prisms
                    .iter()
                    .filter(|[bot, top]| {
                        let has = |v: usize| bot.contains(&v) || top.contains(&v);
                        let vertical = (0..3).any(|k| [bot[k], top[k]] == [a, b] || [top[k], bot[k]] == [a, b]);
                        let in_cap = (bot.contains(&a) && bot.contains(&b)) || (top.contains(&a) && top.contains(&b));
                        has(a) && has(b) && (vertical || in_cap)
                    })
                    .count()
            })
            .collect()
    }

    /// Deficit of every edge: `2π − Σ θ` over the prisms at the edge, with
    /// `θ = π/2` at cap edges and the cap's interior angle at axial edges.
    pub fn deficit_angles<T: Real>(&self, s: T) -> Result<Vec<T>> {
        let theta_a = Triangle::new([s * s; 3])?.angle(0);
        let counts = self.prisms_per_edge();
        Ok(self
            .edge_kinds
            .iter()
            .zip(counts)
            .map(|(kind, c)| {
                let theta = match kind {
                    PrismEdgeKind::Icosahedral => T::FRAC_PI_2(),
                    PrismEdgeKind::Axial => theta_a,
                };
                T::TAU() - T::lit(c as f64) * theta
            })
            .collect())
    }
}

/// Prism lattice with all icosahedral edges `s0` and all axial edges `a0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderLattice {
    pub kind: &'static str,
    #[serde(flatten)]
    pub complex: PrismComplex,
    pub lengths_sq: Vec<f64>,
}

pub fn generate_cylinder_lattice(n_rings: usize, s0: f64, a0: f64) -> Result<CylinderLattice> {
    CylinderModel::new(s0, a0, n_rings)?;
    let complex = PrismComplex::new(n_rings)?;
    debug_assert!(complex.prisms_per_edge().iter().zip(&complex.edge_kinds).all(|(&c, k)| c
        == match k {
            PrismEdgeKind::Icosahedral => PRISMS_PER_S_EDGE,
            PrismEdgeKind::Axial => PRISMS_PER_A_EDGE,
        }));
    let lengths_sq = complex
        .edge_kinds
        .iter()
        .map(|k| match k {
            PrismEdgeKind::Icosahedral => s0 * s0,
            PrismEdgeKind::Axial => a0 * a0,
        })
        .collect();
    Ok(CylinderLattice { kind: "prism_cylinder", complex, lengths_sq })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pcell_counts() {
        for (p, edges, tris, tets) in [(3, 10, 10, 5), (4, 24, 32, 16), (5, 720, 1200, 600)] {
            let (top, _) = generate_pcell_lattice::<f64>(p).unwrap();
            assert_eq!((top.edge_count(), top.triangle_count(), top.tet_count()), (edges, tris, tets));
            assert!(top.is_compact());
            assert!((0..top.edge_count()).all(|e| top.edge_tets(e).len() == p));
            assert_eq!(top.euler_characteristic(), 0);
        }
        assert!(generate_pcell_lattice::<f64>(6).is_err());
    }

    #[test]
    fn flat_torus_counts() {
        let (top, m) = generate_flat_torus::<f64>(3).unwrap();
        assert_eq!((top.vertex_count(), top.edge_count(), top.tet_count()), (54, 378, 324));
        assert!(top.is_compact());
        assert_eq!(top.euler_characteristic(), 0);
        assert_eq!(m.lengths_sq.iter().filter(|&&l| l == 1.0).count(), 2 * 81);
    }

    #[test]
    fn icosahedron_and_prisms() {
        let (e, f) = icosahedron();
        assert_eq!((e.len(), f.len()), (30, 20));
        let c = PrismComplex::new(4).unwrap();
        assert_eq!((c.vertex_count, c.edges.len(), c.prisms.len()), (48, 4 * 42, 80));
        let eps = c.deficit_angles(1.0f64).unwrap();
        for (k, e) in c.edge_kinds.iter().zip(eps) {
            match k {
                PrismEdgeKind::Icosahedral => assert!(e.abs() < 1e-15),
                PrismEdgeKind::Axial => assert!((e - std::f64::consts::PI / 3.0).abs() < 1e-14),
            }
        }
    }
}
