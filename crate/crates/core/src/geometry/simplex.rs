//! Intrinsic Euclidean simplex geometry from squared edge lengths.
//!
//! Nothing here sees coordinates. A `k`-simplex is described by its matrix
//! of pairwise squared distances; volumes come from the Gram determinant
//! (equivalent to the Cayley–Menger determinant), circumcenters from the
//! Gram system `G α = ½ diag(G)`.

use crate::complex::{TET_EDGES, TET_FACES};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * T::lit(i as f64))
}

/// Gram matrix of the edge vectors from vertex 0, row-major `k × k`.
fn gram<T: Real, const N: usize>(sq: &[[T; N]; N]) -> Result<Vec<T>> {
    let half = T::lit(0.5);
    for i in 0..N {
        if sq[i][i] != T::zero() {
            return Err(Error::InvalidArgument("squared-distance matrix needs a zero diagonal".into()));
        }
        for j in 0..i {
            if sq[i][j] != sq[j][i] {
                return Err(Error::InvalidArgument("squared-distance matrix is not symmetric".into()));
            }
            if sq[i][j] < T::zero() {
                return Err(Error::NonRealizable("negative squared length".into()));
            }
        }
    }
    let k = N - 1;
    let mut g = vec![T::zero(); k * k];
    for i in 0..k {
        for j in 0..k {
            g[i * k + j] = half * (sq[0][i + 1] + sq[0][j + 1] - sq[i + 1][j + 1]);
        }
    }
    Ok(g)
}

/// Determinant by Gaussian elimination with partial pivoting (consumes `a`).
fn determinant<T: Real>(mut a: Vec<T>, n: usize) -> T {
    let mut det = T::one();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x * n + c].abs().partial_cmp(&a[y * n + c].abs()).unwrap()).unwrap();
        if a[p * n + c] == T::zero() {
            return T::zero();
        }
        if p != c {
            for j in 0..n {
                a.swap(p * n + j, c * n + j);
            }
            det = -det;
        }
        let pivot = a[c * n + c];
        det = det * pivot;
        for r in (c + 1)..n {
            let f = a[r * n + c] / pivot;
            for j in c..n {
                let v = a[c * n + j];
                a[r * n + j] = a[r * n + j] - f * v;
            }
        }
    }
    det
}

fn max_entry<T: Real, const N: usize>(sq: &[[T; N]; N]) -> T {
    sq.iter().flatten().fold(T::zero(), |m, &x| m.max(x))
}

/// Volume of the `(N-1)`-simplex with the given squared pairwise distances.
///
/// Returns zero for degenerate simplices (within relative tolerance) and
/// `NonRealizable` when the Cayley–Menger determinant has the wrong sign.
pub fn cm_volume<T: Real, const N: usize>(sq: &[[T; N]; N]) -> Result<T> {
    if N < 2 {
        return Err(Error::InvalidArgument("a simplex needs at least two vertices".into()));
    }
    let k = N - 1;
    let det = determinant(gram(sq)?, k);
    let scale = max_entry(sq).powi(k as i32);
    let tol = T::geometric_tolerance() * scale;
    if det < -tol {
        return Err(Error::NonRealizable(format!("Gram determinant {det} < 0")));
    }
    if det <= tol {
        return Ok(T::zero());
    }
    Ok(det.sqrt() / factorial::<T>(k))
}

/// Circumradius of a non-degenerate simplex.
pub fn circumradius<T: Real, const N: usize>(sq: &[[T; N]; N]) -> Result<T> {
    if cm_volume(sq)? == T::zero() {
        return Err(Error::NonRealizable("degenerate simplex has no circumsphere".into()));
    }
    let k = N - 1;
    let g = gram(sq)?;
    let rhs: Vec<T> = (0..k).map(|i| T::lit(0.5) * g[i * k + i]).collect();
    let alpha = solve_small(g, rhs.clone(), k).ok_or_else(|| Error::NonRealizable("singular Gram matrix".into()))?;
    let r2: T = alpha.iter().zip(&rhs).map(|(&a, &b)| a * b).sum();
    Ok(r2.sqrt())
}

fn solve_small<T: Real>(mut a: Vec<T>, mut b: Vec<T>, n: usize) -> Option<Vec<T>> {
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x * n + c].abs().partial_cmp(&a[y * n + c].abs()).unwrap()).unwrap();
        if a[p * n + c] == T::zero() {
            return None;
        }
        if p != c {
            for j in 0..n {
                a.swap(p * n + j, c * n + j);
            }
            b.swap(p, c);
        }
        for r in (c + 1)..n {
            let f = a[r * n + c] / a[c * n + c];
            for j in c..n {
                let v = a[c * n + j];
                a[r * n + j] = a[r * n + j] - f * v;
            }
            let v = b[c];
            b[r] = b[r] - f * v;
        }
    }
    for r in (0..n).rev() {
        let mut s = b[r];
        for j in (r + 1)..n {
            s = s - a[r * n + j] * b[j];
        }
        b[r] = s / a[r * n + r];
    }
    Some(b)
}

/// Triangle described by its squared lengths; entry `k` is opposite local vertex `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle<T> {
    sq: [T; 3],
    area: T,
}

impl<T: Real> Triangle<T> {
    pub fn new(sq: [T; 3]) -> Result<Self> {
        let [a, b, c] = sq;
        if !(a > T::zero() && b > T::zero() && c > T::zero()) {
            return Err(Error::NonRealizable(format!("triangle squared lengths {sq:?}")));
        }
        // 16 A² = 4 a² b² − (a² + b² − c²)²
        let s = a + b - c;
        let sixteen_a2 = T::lit(4.0) * a * b - s * s;
        let scale = a.max(b).max(c);
        let tol = T::geometric_tolerance() * scale * scale;
        if sixteen_a2 < -tol {
            return Err(Error::NonRealizable(format!("triangle inequality violated by {sq:?}")));
        }
        if sixteen_a2 <= tol {
            return Err(Error::DegenerateFace(format!("triangle {sq:?} has zero area")));
        }
        Ok(Self { sq, area: T::lit(0.25) * sixteen_a2.sqrt() })
    }

    pub fn area(&self) -> T {
        self.area
    }

    pub fn squared_lengths(&self) -> [T; 3] {
        self.sq
    }

    pub fn circumradius(&self) -> T {
        let [a, b, c] = self.sq;
        (a * b * c).sqrt() / (T::lit(4.0) * self.area)
    }

    /// Cotangent of the angle at local vertex `k` (opposite edge `k`).
    pub fn cot_angle(&self, k: usize) -> T {
        let a = self.sq[k];
        let b = self.sq[(k + 1) % 3];
        let c = self.sq[(k + 2) % 3];
        (b + c - a) / (T::lit(4.0) * self.area)
    }

    pub fn angle(&self, k: usize) -> T {
        let a = self.sq[k];
        let b = self.sq[(k + 1) % 3];
        let c = self.sq[(k + 2) % 3];
        (T::lit(4.0) * self.area).atan2(b + c - a)
    }

    /// Signed distance from the midpoint of edge `k` to the circumcenter,
    /// `(ℓ/2) cot θ` with `θ` the angle opposite the edge. Negative when that
    /// angle is obtuse.
    pub fn moment_arm(&self, k: usize) -> T {
        T::lit(0.5) * self.sq[k].sqrt() * self.cot_angle(k)
    }

    /// Barycentric coordinates of the circumcenter.
    pub fn circumcenter_barycentric(&self) -> [T; 3] {
        let w: [T; 3] = std::array::from_fn(|k| {
            let a = self.sq[k];
            let b = self.sq[(k + 1) % 3];
            let c = self.sq[(k + 2) % 3];
            a * (b + c - a)
        });
        let s = w[0] + w[1] + w[2];
        w.map(|x| x / s)
    }

    /// Circumcenter strictly inside (all angles acute).
    pub fn is_well_centered(&self) -> bool {
        self.circumcenter_barycentric().iter().all(|&b| b > T::geometric_tolerance())
    }
}

/// Tetrahedron described by its six squared lengths in `TET_EDGES` order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tetrahedron<T> {
    sq: [T; 6],
    volume: T,
    circumradius_sq: T,
    barycentric: [T; 4],
    faces: [Triangle<T>; 4],
}

impl<T: Real> Tetrahedron<T> {
    pub fn new(sq: [T; 6]) -> Result<Self> {
        let d = |i: usize, j: usize| -> T {
            if i == j {
                T::zero()
            } else {
                sq[crate::complex::tet_local_edge(i, j)]
            }
        };
        let faces = TET_FACES.map(|f| [d(f[1], f[2]), d(f[0], f[2]), d(f[0], f[1])]);
        let faces =
            [Triangle::new(faces[0])?, Triangle::new(faces[1])?, Triangle::new(faces[2])?, Triangle::new(faces[3])?];
        let half = T::lit(0.5);
        let g = |i: usize, j: usize| half * (d(0, i) + d(0, j) - d(i, j));
        let (g11, g22, g33) = (g(1, 1), g(2, 2), g(3, 3));
        let (g12, g13, g23) = (g(1, 2), g(1, 3), g(2, 3));
        // adjugate of the symmetric Gram matrix
        let c11 = g22 * g33 - g23 * g23;
        let c12 = g13 * g23 - g12 * g33;
        let c13 = g12 * g23 - g13 * g22;
        let c22 = g11 * g33 - g13 * g13;
        let c23 = g12 * g13 - g11 * g23;
        let c33 = g11 * g22 - g12 * g12;
        let det = g11 * c11 + g12 * c12 + g13 * c13;
        let scale = sq.iter().fold(T::zero(), |m, &x| m.max(x));
        let tol = T::geometric_tolerance() * scale * scale * scale;
        if det < -tol {
            return Err(Error::NonRealizable(format!("tetrahedron {sq:?}: Gram determinant {det} < 0")));
        }
        if det <= tol {
            return Err(Error::NonRealizable(format!("tetrahedron {sq:?} is flat")));
        }
        let (r1, r2, r3) = (half * g11, half * g22, half * g33);
        let a1 = (c11 * r1 + c12 * r2 + c13 * r3) / det;
        let a2 = (c12 * r1 + c22 * r2 + c23 * r3) / det;
        let a3 = (c13 * r1 + c23 * r2 + c33 * r3) / det;
        let circumradius_sq = a1 * r1 + a2 * r2 + a3 * r3;
        Ok(Self {
            sq,
            volume: det.sqrt() / T::lit(6.0),
            circumradius_sq,
            barycentric: [T::one() - a1 - a2 - a3, a1, a2, a3],
            faces,
        })
    }

    pub fn squared_lengths(&self) -> [T; 6] {
        self.sq
    }

    pub fn volume(&self) -> T {
        self.volume
    }

    pub fn circumradius(&self) -> T {
        self.circumradius_sq.sqrt()
    }

    /// Face opposite local vertex `i`, with its squared lengths in local triangle order.
    pub fn face(&self, i: usize) -> &Triangle<T> {
        &self.faces[i]
    }

    pub fn circumcenter_barycentric(&self) -> [T; 4] {
        self.barycentric
    }

    pub fn is_well_centered(&self) -> bool {
        self.barycentric.iter().all(|&b| b > T::geometric_tolerance())
    }

    /// Distance from local vertex `i` to the plane of the opposite face.
    pub fn height(&self, i: usize) -> T {
        T::lit(3.0) * self.volume / self.faces[i].area()
    }

    /// Signed distance from the tetrahedron's circumcenter to the circumcenter
    /// of the face opposite local vertex `i`; positive on the interior side.
    ///
    /// Its magnitude is `√(R_tet² − R_face²)`; the sign is that of the
    /// circumcenter's barycentric coordinate for vertex `i`.
    pub fn face_segment(&self, i: usize) -> T {
        self.barycentric[i] * self.height(i)
    }

    /// Interior dihedral angle at local edge `edge` (index into `TET_EDGES`).
    pub fn dihedral_angle(&self, edge: usize) -> T {
        let [i, j] = TET_EDGES[edge];
        let others: Vec<usize> = (0..4).filter(|&v| v != i && v != j).collect();
        let (k, l) = (others[0], others[1]);
        let d = |a: usize, b: usize| -> T {
            if a == b {
                T::zero()
            } else {
                self.sq[crate::complex::tet_local_edge(a, b)]
            }
        };
        let half = T::lit(0.5);
        let dot = |a: usize, b: usize| half * (d(i, a) + d(i, b) - d(a, b));
        let lij = d(i, j);
        let pkl = dot(k, l) - dot(k, j) * dot(l, j) / lij;
        // common factor 4·A_ijk·A_ijl dropped from both
        let cos_num = pkl * lij;
        let sin_num = T::lit(6.0) * self.volume * lij.sqrt();
        sin_num.atan2(cos_num)
    }
}

/// Dihedral angle of the tetrahedron `tet_sq` (TET_EDGES order) at local edge `edge_index`.
pub fn dihedral_angle<T: Real>(tet_sq: [T; 6], edge_index: usize) -> Result<T> {
    if edge_index >= 6 {
        return Err(Error::InvalidArgument(format!("edge index {edge_index} out of range")));
    }
    Ok(Tetrahedron::new(tet_sq)?.dihedral_angle(edge_index))
}

/// Signed circumcenter-to-face-circumcenter distance for the face opposite `face_index`.
pub fn face_segment<T: Real>(tet_sq: [T; 6], face_index: usize) -> Result<T> {
    if face_index >= 4 {
        return Err(Error::InvalidArgument(format!("face index {face_index} out of range")));
    }
    Ok(Tetrahedron::new(tet_sq)?.face_segment(face_index))
}

/// Hybrid `d`-volume spanned by a `k`-simplex and its orthogonal dual:
/// `k!(d−k)!/d! · |σ_k| |σ*_k|`.
pub fn hybrid_volume_general<T: Real>(d: usize, k: usize, vol_simplex: T, vol_dual: T) -> Result<T> {
    if d == 0 || k > d {
        return Err(Error::InvalidArgument(format!("need d ≥ 1 and 0 ≤ k ≤ d, got d={d}, k={k}")));
    }
    let weight = factorial::<T>(k) * factorial::<T>(d - k) / factorial::<T>(d);
    Ok(weight * vol_simplex * vol_dual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    const REGULAR: [f64; 6] = [1.0; 6];

    #[test]
    fn regular_tetrahedron_volume() {
        let sq = [[0.0, 1.0, 1.0, 1.0], [1.0, 0.0, 1.0, 1.0], [1.0, 1.0, 0.0, 1.0], [1.0, 1.0, 1.0, 0.0]];
        assert_relative_eq!(cm_volume(&sq).unwrap(), 2f64.sqrt() / 12.0, max_relative = 1e-14);
        assert_relative_eq!(circumradius(&sq).unwrap(), (3.0f64 / 8.0).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn right_triangle_area() {
        // legs 3 and 4, hypotenuse 5
        let sq = [[0.0, 9.0, 16.0], [9.0, 0.0, 25.0], [16.0, 25.0, 0.0]];
        assert_relative_eq!(cm_volume(&sq).unwrap(), 6.0, max_relative = 1e-14);
        assert_relative_eq!(circumradius(&sq).unwrap(), 2.5, max_relative = 1e-14);
    }

    #[test]
    fn collinear_points_have_zero_volume() {
        // points at 0, 1, 2, 3 on a line
        let p = [0.0f64, 1.0, 2.0, 3.0];
        let sq: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| (p[i] - p[j]).powi(2)));
        assert_eq!(cm_volume(&sq).unwrap(), 0.0);
        assert!(matches!(circumradius(&sq), Err(Error::NonRealizable(_))));
    }

    #[test]
    fn segment_and_equilateral_triangle_circumradius() {
        assert_relative_eq!(circumradius(&[[0.0, 4.0], [4.0, 0.0]]).unwrap(), 1.0);
        let eq = [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]];
        assert_relative_eq!(circumradius(&eq).unwrap(), 1.0 / 3f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn non_realizable_matrix_rejected() {
        let sq = [[0.0, 1.0, 100.0], [1.0, 0.0, 1.0], [100.0, 1.0, 0.0]];
        assert!(matches!(cm_volume(&sq), Err(Error::NonRealizable(_))));
        let asym = [[0.0, 1.0], [2.0, 0.0]];
        assert!(matches!(cm_volume(&asym), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn regular_dihedral_is_arcsec_three() {
        for e in 0..6 {
            let theta = dihedral_angle(REGULAR, e).unwrap();
            assert_relative_eq!(theta, (1.0f64 / 3.0).acos(), max_relative = 1e-14);
        }
        assert_relative_eq!((1.0f64 / 3.0).acos(), 1.2309594, epsilon = 1e-7);
    }

    #[test]
    fn trirectangular_corner_dihedral() {
        // vertices O, e1, e2, e3: legs are edges 0-1, 0-2, 0-3
        let tet = [1.0, 1.0, 1.0, 2.0, 2.0, 2.0];
        for leg in 0..3 {
            assert_relative_eq!(dihedral_angle(tet, leg).unwrap(), PI / 2.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn regular_face_segment() {
        let seg = face_segment(REGULAR, 0).unwrap();
        assert_relative_eq!(seg, (1.0f64 / 24.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(2.0 * seg, 6f64.sqrt() / 6.0, max_relative = 1e-14);
    }

    #[test]
    fn circumcenter_on_face_gives_zero_segment() {
        // base: equilateral triangle of circumradius 1; apex above its circumcenter at height 1
        let tet = [3.0f64, 3.0, 2.0, 3.0, 2.0, 2.0];
        let t = Tetrahedron::new(tet).unwrap();
        assert!(t.face_segment(3).abs() < 1e-14);
        assert!(!t.is_well_centered());
        assert_relative_eq!(t.circumradius(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn obtuse_sliver_has_negative_segment() {
        // flattened tetrahedron: apex barely above the midpoint of a long base edge
        let pts: [[f64; 3]; 4] = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 0.3, 0.2]];
        let d = |a: usize, b: usize| -> f64 { (0..3).map(|c| (pts[a][c] - pts[b][c]).powi(2)).sum() };
        let tet = TET_EDGES.map(|e| d(e[0], e[1]));
        let t = Tetrahedron::new(tet).unwrap();
        assert!(!t.is_well_centered());
        assert!((0..4).any(|i| t.face_segment(i) < 0.0));
    }

    #[test]
    fn triangle_moment_arm() {
        // right triangle: hypotenuse opposite vertex 0
        let t = Triangle::new([25.0f64, 16.0, 9.0]).unwrap();
        assert!(t.moment_arm(0).abs() < 1e-14);
        let eq = Triangle::new([1.0, 1.0, 1.0]).unwrap();
        assert_relative_eq!(eq.moment_arm(2), 3f64.sqrt() / 6.0, max_relative = 1e-14);
        let obtuse = Triangle::new([3.0, 1.0, 1.0]).unwrap();
        assert!(obtuse.moment_arm(0) < 0.0);
        assert!(!obtuse.is_well_centered());
    }

    #[test]
    fn hybrid_volume_weights() {
        let v = hybrid_volume_general(3, 1, 1.0, 5.0 * 2f64.sqrt() / 24.0).unwrap();
        assert_relative_eq!(v, 5.0 * 2f64.sqrt() / 72.0, max_relative = 1e-14);
        assert_relative_eq!(v, 0.098209, epsilon = 1e-6);
        assert_eq!(hybrid_volume_general(3, 0, 1.0, 0.7).unwrap(), 0.7);
        assert_relative_eq!(hybrid_volume_general(4, 2, 1.0, 1.0).unwrap(), 1.0 / 6.0);
        assert!(hybrid_volume_general::<f64>(3, 4, 1.0, 1.0).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let theta = dihedral_angle([1.0f32; 6], 2).unwrap();
        assert!((theta - (1.0f32 / 3.0).acos()).abs() < 1e-6);
    }
}
