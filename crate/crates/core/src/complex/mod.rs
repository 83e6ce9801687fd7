//! Combinatorial simplicial 3-complexes and the edge-length metric living on them.

pub mod json;

pub use json::{parse_mesh, read_mesh, write_mesh, MeshDocument};

use crate::error::{Error, Result};
use crate::geometry::{Tetrahedron, Triangle};
use crate::scalar::Real;
use std::collections::VecDeque;
use std::collections::{HashMap, HashSet};

/// Local edge order of a tetrahedron `[a, b, c, d]` (sorted vertex ids).
pub const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Local edge `k` of a triangle is the one opposite local vertex `k`.
pub const TRI_EDGES: [[usize; 2]; 3] = [[1, 2], [0, 2], [0, 1]];

/// Local vertices of the face opposite local vertex `i` of a tetrahedron.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];

/// Index into [`TET_EDGES`] of the local edge `{i, j}`.
pub fn tet_local_edge(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    TET_EDGES.iter().position(|e| e[0] == a && e[1] == b).expect("local tetrahedron edge")
}

/// Immutable combinatorial 3-complex with canonical simplex indexing.
///
/// Vertices, edges, triangles and tetrahedra are stored as sorted vertex
/// tuples, each list sorted lexicographically, so that identical input
/// (up to order) always yields identical ids.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTopology3 {
    vertex_count: usize,
    tets: Vec<[usize; 4]>,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    edge_index: HashMap<[usize; 2], usize>,
    triangle_index: HashMap<[usize; 3], usize>,
    tet_edges: Vec<[usize; 6]>,
    tet_triangles: Vec<[usize; 4]>,
    triangle_edges: Vec<[usize; 3]>,
    edge_triangles: Vec<Vec<usize>>,
    edge_tets: Vec<Vec<usize>>,
    triangle_tets: Vec<Vec<usize>>,
    vertex_edges: Vec<Vec<usize>>,
    compact: bool,
}

/// Builds the complex from its tetrahedra.
///
/// Vertex ids need not be contiguous; `vertex_count` is one past the largest id.
pub fn build_complex(tetrahedra: &[[usize; 4]]) -> Result<ComplexTopology3> {
    if tetrahedra.is_empty() {
        return Err(Error::EmptyComplex);
    }
    let mut tets = Vec::with_capacity(tetrahedra.len());
    for t in tetrahedra {
        let mut s = *t;
        s.sort_unstable();
        if let Some(w) = s.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DegenerateSimplex { simplex: t.to_vec(), vertex: w[0] });
        }
        tets.push(s);
    }
    tets.sort_unstable();
    if let Some(w) = tets.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateTetrahedron(w[0]));
    }
    let vertex_count = tets.iter().map(|t| t[3]).max().unwrap_or(0) + 1;

    let mut edge_set = HashSet::new();
    let mut tri_set = HashSet::new();
    for t in &tets {
        for e in TET_EDGES {
            edge_set.insert([t[e[0]], t[e[1]]]);
        }
        for f in TET_FACES {
            tri_set.insert([t[f[0]], t[f[1]], t[f[2]]]);
        }
    }
    let mut edges: Vec<_> = edge_set.into_iter().collect();
    edges.sort_unstable();
    let mut triangles: Vec<_> = tri_set.into_iter().collect();
    triangles.sort_unstable();

    let edge_index: HashMap<_, _> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let triangle_index: HashMap<_, _> = triangles.iter().enumerate().map(|(i, f)| (*f, i)).collect();

    let triangle_edges: Vec<[usize; 3]> =
        triangles.iter().map(|f| TRI_EDGES.map(|e| edge_index[&[f[e[0]], f[e[1]]]])).collect();
    let tet_edges: Vec<[usize; 6]> = tets.iter().map(|t| TET_EDGES.map(|e| edge_index[&[t[e[0]], t[e[1]]]])).collect();
    let tet_triangles: Vec<[usize; 4]> =
        tets.iter().map(|t| TET_FACES.map(|f| triangle_index[&[t[f[0]], t[f[1]], t[f[2]]]])).collect();

    let mut edge_triangles = vec![Vec::new(); edges.len()];
    for (fi, fe) in triangle_edges.iter().enumerate() {
        for &e in fe {
            edge_triangles[e].push(fi);
        }
    }
    let mut edge_tets = vec![Vec::new(); edges.len()];
    for (ti, te) in tet_edges.iter().enumerate() {
        for &e in te {
            edge_tets[e].push(ti);
        }
    }
    let mut triangle_tets = vec![Vec::new(); triangles.len()];
    for (ti, tf) in tet_triangles.iter().enumerate() {
        for &f in tf {
            triangle_tets[f].push(ti);
        }
    }
    let mut vertex_edges = vec![Vec::new(); vertex_count];
    for (ei, e) in edges.iter().enumerate() {
        vertex_edges[e[0]].push(ei);
        vertex_edges[e[1]].push(ei);
    }
    let compact = triangle_tets.iter().all(|c| c.len() == 2);

    Ok(ComplexTopology3 {
        vertex_count,
        tets,
        edges,
        triangles,
        edge_index,
        triangle_index,
        tet_edges,
        tet_triangles,
        triangle_edges,
        edge_triangles,
        edge_tets,
        triangle_tets,
        vertex_edges,
        compact,
    })
}

impl ComplexTopology3 {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }
    pub fn tetrahedra(&self) -> &[[usize; 4]] {
        &self.tets
    }
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }
    pub fn tet_count(&self) -> usize {
        self.tets.len()
    }

    /// True iff every triangle is shared by exactly two tetrahedra.
    pub fn is_compact(&self) -> bool {
        self.compact
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { [a, b] } else { [b, a] };
        self.edge_index.get(&key).copied()
    }

    pub fn triangle_id(&self, mut verts: [usize; 3]) -> Option<usize> {
        verts.sort_unstable();
        self.triangle_index.get(&verts).copied()
    }

    /// Edge ids of a tetrahedron in [`TET_EDGES`] order.
    pub fn tet_edges(&self, tet: usize) -> &[usize; 6] {
        &self.tet_edges[tet]
    }

    /// Triangle ids of a tetrahedron; entry `i` is the face opposite local vertex `i`.
    pub fn tet_triangles(&self, tet: usize) -> &[usize; 4] {
        &self.tet_triangles[tet]
    }

    /// Edge ids of a triangle; entry `k` is the edge opposite local vertex `k`.
    pub fn triangle_edges(&self, tri: usize) -> &[usize; 3] {
        &self.triangle_edges[tri]
    }

    pub fn edge_triangles(&self, edge: usize) -> &[usize] {
        &self.edge_triangles[edge]
    }
    pub fn edge_tets(&self, edge: usize) -> &[usize] {
        &self.edge_tets[edge]
    }
    pub fn triangle_tets(&self, tri: usize) -> &[usize] {
        &self.triangle_tets[tri]
    }
    pub fn vertex_edges(&self, vertex: usize) -> &[usize] {
        &self.vertex_edges[vertex]
    }

    /// Position of `tri` among the faces of `tet`, i.e. the local vertex it is opposite to.
    pub fn face_slot(&self, tet: usize, tri: usize) -> Option<usize> {
        self.tet_triangles[tet].iter().position(|&f| f == tri)
    }

    /// Position of `edge` inside `tri` (the local vertex it is opposite to).
    pub fn edge_slot_in_triangle(&self, tri: usize, edge: usize) -> Option<usize> {
        self.triangle_edges[tri].iter().position(|&e| e == edge)
    }

    /// Number of vertices that appear in at least one tetrahedron.
    pub fn used_vertex_count(&self) -> usize {
        self.vertex_edges.iter().filter(|e| !e.is_empty()).count()
    }

    /// V − E + F − T over the vertices actually used.
    pub fn euler_characteristic(&self) -> i64 {
        self.used_vertex_count() as i64 - self.edges.len() as i64 + self.triangles.len() as i64 - self.tets.len() as i64
    }

    /// Whether the tetrahedra admit a coherent orientation.
    ///
    /// Orientation signs are propagated across shared triangles; a conflict
    /// means the complex is non-orientable.
    pub fn is_orientable(&self) -> bool {
        let mut sign: Vec<i8> = vec![0; self.tets.len()];
        for start in 0..self.tets.len() {
            if sign[start] != 0 {
                continue;
            }
            sign[start] = 1;
            let mut queue = VecDeque::from([start]);
            while let Some(t) = queue.pop_front() {
                for (slot, &f) in self.tet_triangles[t].iter().enumerate() {
                    let induced = sign[t] * if slot % 2 == 0 { 1 } else { -1 };
                    for &u in &self.triangle_tets[f] {
                        if u == t {
                            continue;
                        }
                        let uslot = self.face_slot(u, f).expect("shared face");
                        let parity = if uslot % 2 == 0 { 1 } else { -1 };
                        let want = -induced * parity;
                        if sign[u] == 0 {
                            sign[u] = want;
                            queue.push_back(u);
                        } else if sign[u] != want {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// The six squared lengths of a tetrahedron in [`TET_EDGES`] order.
    pub fn tet_squared_lengths<T: Real>(&self, tet: usize, metric: &MetricAssignment<T>) -> [T; 6] {
        self.tet_edges[tet].map(|e| metric.lengths_sq[e])
    }

    /// The three squared lengths of a triangle in [`TRI_EDGES`] order.
    pub fn triangle_squared_lengths<T: Real>(&self, tri: usize, metric: &MetricAssignment<T>) -> [T; 3] {
        self.triangle_edges[tri].map(|e| metric.lengths_sq[e])
    }

    /// Edge key used by the mesh file format: sorted ids joined by `-`.
    pub fn edge_key(&self, edge: usize) -> String {
        let [a, b] = self.edges[edge];
        format!("{a}-{b}")
    }
}

/// Squared edge lengths (indexed by edge id) at flow time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricAssignment<T> {
    pub lengths_sq: Vec<T>,
    pub time: T,
}

impl<T: Real> MetricAssignment<T> {
    pub fn new(lengths_sq: Vec<T>) -> Self {
        Self { lengths_sq, time: T::zero() }
    }

    /// Every edge of `top` gets the same squared length.
    pub fn uniform(top: &ComplexTopology3, length_sq: T) -> Self {
        Self::new(vec![length_sq; top.edge_count()])
    }

    pub fn from_lengths(lengths: &[T]) -> Self {
        Self::new(lengths.iter().map(|&l| l * l).collect())
    }

    pub fn lengths(&self) -> Vec<T> {
        self.lengths_sq.iter().map(|l| l.sqrt()).collect()
    }

    /// Multiplies every squared length by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self { lengths_sq: self.lengths_sq.iter().map(|&l| l * factor).collect(), time: self.time }
    }

    /// Checks the size against `top` and that every entry is strictly positive.
    pub fn check_against(&self, top: &ComplexTopology3) -> Result<()> {
        if self.lengths_sq.len() != top.edge_count() {
            return Err(Error::MetricSizeMismatch { expected: top.edge_count(), found: self.lengths_sq.len() });
        }
        for (edge, &l) in self.lengths_sq.iter().enumerate() {
            if !(l > T::zero()) || !l.is_finite() {
                return Err(Error::NonPositiveLength { edge, value: l.to_f64_lossy() });
            }
        }
        Ok(())
    }
}

/// Outcome of [`validate_metric`]. Non-well-centered simplices are warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub tet_count: usize,
    pub non_well_centered_tets: Vec<usize>,
    pub non_well_centered_triangles: Vec<usize>,
    pub orientable: bool,
}

impl ValidationReport {
    pub fn is_well_centered(&self) -> bool {
        self.non_well_centered_tets.is_empty() && self.non_well_centered_triangles.is_empty()
    }

    pub fn well_centered_fraction(&self) -> f64 {
        if self.tet_count == 0 {
            return 1.0;
        }
        1.0 - self.non_well_centered_tets.len() as f64 / self.tet_count as f64
    }
}

/// Checks realizability of every tetrahedron and collects well-centeredness warnings.
pub fn validate_metric<T: Real>(top: &ComplexTopology3, metric: &MetricAssignment<T>) -> Result<ValidationReport> {
    metric.check_against(top)?;
    let mut non_wc_tets = Vec::new();
    for t in 0..top.tet_count() {
        let tet = Tetrahedron::new(top.tet_squared_lengths(t, metric))
            .map_err(|e| annotate(e, &format!("tetrahedron {:?}", top.tetrahedra()[t])))?;
        if !tet.is_well_centered() {
            non_wc_tets.push(t);
        }
    }
    let mut non_wc_tris = Vec::new();
    for f in 0..top.triangle_count() {
        let tri = Triangle::new(top.triangle_squared_lengths(f, metric))?;
        if !tri.is_well_centered() {
            non_wc_tris.push(f);
        }
    }
    Ok(ValidationReport {
        tet_count: top.tet_count(),
        non_well_centered_tets: non_wc_tets,
        non_well_centered_triangles: non_wc_tris,
        orientable: top.is_orientable(),
    })
}

pub(crate) fn annotate(err: Error, context: &str) -> Error {
    match err {
        Error::NonRealizable(msg) => Error::NonRealizable(format!("{context}: {msg}")),
        Error::DegenerateFace(msg) => Error::DegenerateFace(format!("{context}: {msg}")),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_cell() -> Vec<[usize; 4]> {
        (0..5)
            .map(|skip| {
                let v: Vec<usize> = (0..5).filter(|&v| v != skip).collect();
                [v[0], v[1], v[2], v[3]]
            })
            .collect()
    }

    #[test]
    fn single_tetrahedron() {
        let top = build_complex(&[[0, 1, 2, 3]]).unwrap();
        assert_eq!(top.edge_count(), 6);
        assert_eq!(top.triangle_count(), 4);
        assert!(!top.is_compact());
        assert_eq!(top.euler_characteristic(), 1);
    }

    #[test]
    fn boundary_of_four_simplex() {
        let top = build_complex(&five_cell()).unwrap();
        assert_eq!(top.edge_count(), 10);
        assert_eq!(top.triangle_count(), 10);
        assert!(top.is_compact());
        assert!((0..10).all(|f| top.triangle_tets(f).len() == 2));
        assert!((0..10).all(|e| top.edge_tets(e).len() == 3));
        assert_eq!(top.euler_characteristic(), 0);
        assert!(top.is_orientable());
    }

    #[test]
    fn rejects_repeated_vertex() {
        let err = build_complex(&[[0, 1, 1, 3]]).unwrap_err();
        assert!(matches!(err, Error::DegenerateSimplex { vertex: 1, .. }));
    }

    #[test]
    fn rejects_duplicate_tetrahedron() {
        let err = build_complex(&[[0, 1, 2, 3], [3, 2, 1, 0]]).unwrap_err();
        assert_eq!(err, Error::DuplicateTetrahedron([0, 1, 2, 3]));
    }

    #[test]
    fn indexing_is_order_independent() {
        let mut tets = five_cell();
        let a = build_complex(&tets).unwrap();
        tets.reverse();
        for t in &mut tets {
            t.reverse();
        }
        let b = build_complex(&tets).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn incidence_maps_are_consistent() {
        let top = build_complex(&five_cell()).unwrap();
        for f in 0..top.triangle_count() {
            for &e in top.triangle_edges(f) {
                assert!(top.edge_triangles(e).contains(&f));
                for &t in top.triangle_tets(f) {
                    assert!(top.edge_tets(e).contains(&t));
                }
            }
        }
        let cofaces: usize = (0..top.triangle_count()).map(|f| top.triangle_tets(f).len()).sum();
        assert_eq!(cofaces, 2 * top.triangle_count());
    }

    #[test]
    fn regular_five_cell_is_valid_and_well_centered() {
        let top = build_complex(&five_cell()).unwrap();
        let m = MetricAssignment::uniform(&top, 1.0_f64);
        let report = validate_metric(&top, &m).unwrap();
        assert!(report.is_well_centered());
        assert!(report.orientable);
    }

    #[test]
    fn long_edge_is_not_realizable() {
        let top = build_complex(&[[0, 1, 2, 3]]).unwrap();
        let mut m = MetricAssignment::uniform(&top, 1.0_f64);
        m.lengths_sq[5] = 100.0;
        assert!(matches!(validate_metric(&top, &m), Err(Error::NonRealizable(_))));
    }

    #[test]
    fn metric_size_is_checked() {
        let top = build_complex(&[[0, 1, 2, 3]]).unwrap();
        let m = MetricAssignment::new(vec![1.0_f64; 5]);
        assert!(matches!(validate_metric(&top, &m), Err(Error::MetricSizeMismatch { .. })));
    }
}
