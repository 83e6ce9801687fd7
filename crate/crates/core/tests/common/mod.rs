//! Coordinate-embedding oracle: the same quantities the library derives from
//! squared lengths, computed from explicit points in E³.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regge_flow::complex::TET_EDGES;

pub type P3 = [f64; 3];

pub fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
pub fn add(a: P3, b: P3) -> P3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}
pub fn scale(a: P3, s: f64) -> P3 {
    [a[0] * s, a[1] * s, a[2] * s]
}
pub fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
pub fn cross(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
pub fn norm(a: P3) -> f64 {
    dot(a, a).sqrt()
}
pub fn dist2(a: P3, b: P3) -> f64 {
    let d = sub(a, b);
    dot(d, d)
}

/// Squared lengths in library edge order.
pub fn tet_sq(p: &[P3; 4]) -> [f64; 6] {
    TET_EDGES.map(|[i, j]| dist2(p[i], p[j]))
}

pub fn tet_volume(p: &[P3; 4]) -> f64 {
    dot(sub(p[1], p[0]), cross(sub(p[2], p[0]), sub(p[3], p[0]))).abs() / 6.0
}

/// Circumcenter of a triangle in space.
pub fn tri_circumcenter(a: P3, b: P3, c: P3) -> P3 {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let n = cross(ab, ac);
    let num = add(scale(cross(n, ab), dot(ac, ac)), scale(cross(ac, n), dot(ab, ab)));
    add(a, scale(num, 1.0 / (2.0 * dot(n, n))))
}

/// Circumcenter of a tetrahedron (Cramer on the bisector equations).
pub fn tet_circumcenter(p: &[P3; 4]) -> P3 {
    let a = sub(p[1], p[0]);
    let b = sub(p[2], p[0]);
    let c = sub(p[3], p[0]);
    let det = dot(a, cross(b, c));
    let num = add(add(scale(cross(b, c), dot(a, a)), scale(cross(c, a), dot(b, b))), scale(cross(a, b), dot(c, c)));
    add(p[0], scale(num, 1.0 / (2.0 * det)))
}

/// Dihedral angle at the edge `{i, j}`.
pub fn dihedral(p: &[P3; 4], i: usize, j: usize) -> f64 {
    let others: Vec<usize> = (0..4).filter(|&v| v != i && v != j).collect();
    let e = sub(p[j], p[i]);
    let e = scale(e, 1.0 / norm(e));
    let perp = |v: P3| {
        let d = sub(v, p[i]);
        sub(d, scale(e, dot(d, e)))
    };
    let u = perp(p[others[0]]);
    let w = perp(p[others[1]]);
    norm(cross(u, w)).atan2(dot(u, w))
}

/// Signed distance from the tetrahedron circumcenter to the circumcenter of
/// the face opposite `i`; positive when it lies on the side of vertex `i`.
pub fn face_segment(p: &[P3; 4], i: usize) -> f64 {
    let f: Vec<usize> = (0..4).filter(|&v| v != i).collect();
    let (a, b, c) = (p[f[0]], p[f[1]], p[f[2]]);
    let n = cross(sub(b, a), sub(c, a));
    let n = scale(n, 1.0 / norm(n));
    let side = dot(sub(p[i], a), n).signum();
    side * dot(sub(tet_circumcenter(p), tri_circumcenter(a, b, c)), n)
}

/// Distance from the midpoint of `ab` to the circumcenter of `abc`, signed
/// positive when the circumcenter is on the side of `c`.
pub fn moment_arm(a: P3, b: P3, c: P3) -> f64 {
    let mid = scale(add(a, b), 0.5);
    let cc = tri_circumcenter(a, b, c);
    let ab = sub(b, a);
    // in-plane direction perpendicular to ab, pointing towards c
    let n = cross(ab, sub(c, a));
    let dir = cross(n, ab);
    let dir = scale(dir, 1.0 / norm(dir));
    dot(sub(cc, mid), dir)
}

/// A random tetrahedron with volume bounded away from zero.
pub fn random_tet(rng: &mut ChaCha8Rng) -> [P3; 4] {
    loop {
        let p: [P3; 4] = std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
        let longest = TET_EDGES.iter().map(|&[i, j]| dist2(p[i], p[j])).fold(0.0, f64::max);
        if tet_volume(&p) > 0.02 * longest.powf(1.5) {
            return p;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Places a point at the given distances from three points on the plane
/// `z = 0`, on the side `sign` of it.
fn trilaterate(base: [P3; 3], d2: [f64; 3], sign: f64) -> P3 {
    // base[0] at the origin, base[1] on the x axis, base[2] in the xy plane
    let (x1, x2, y2) = (base[1][0], base[2][0], base[2][1]);
    let x = (d2[0] - d2[1] + x1 * x1) / (2.0 * x1);
    let y = (d2[0] - d2[2] + x2 * x2 + y2 * y2 - 2.0 * x2 * x) / (2.0 * y2);
    let z2 = d2[0] - x * x - y * y;
    assert!(z2 > 0.0, "trilateration: point is not realizable");
    [x, y, sign * z2.sqrt()]
}

/// Two tetrahedra `{0,1,2,3}` and `{0,1,2,4}` glued along `{0,1,2}`, from
/// squared lengths keyed by vertex pair, embedded with 3 and 4 on opposite
/// sides of the shared face. Returns the five points.
pub fn embed_pair(sq: &dyn Fn(usize, usize) -> f64) -> [P3; 5] {
    let p0 = [0.0; 3];
    let x1 = sq(0, 1).sqrt();
    let p1 = [x1, 0.0, 0.0];
    let x2 = (sq(0, 2) - sq(1, 2) + x1 * x1) / (2.0 * x1);
    let p2 = [x2, (sq(0, 2) - x2 * x2).sqrt(), 0.0];
    let base = [p0, p1, p2];
    let p3 = trilaterate(base, [sq(0, 3), sq(1, 3), sq(2, 3)], 1.0);
    let p4 = trilaterate(base, [sq(0, 4), sq(1, 4), sq(2, 4)], -1.0);
    [p0, p1, p2, p3, p4]
}

/// `λ` of the shared face of an embedded pair: signed distance between the
/// two circumcenters along the face normal pointing towards vertex 3.
pub fn pair_lambda(p: &[P3; 5]) -> f64 {
    let n = cross(sub(p[1], p[0]), sub(p[2], p[0]));
    let n = scale(n, 1.0 / norm(n));
    let n = if dot(sub(p[3], p[0]), n) > 0.0 { n } else { scale(n, -1.0) };
    let ca = tet_circumcenter(&[p[0], p[1], p[2], p[3]]);
    let cb = tet_circumcenter(&[p[0], p[1], p[2], p[4]]);
    dot(sub(ca, cb), n)
}

/// Five random points with 3 and 4 on opposite sides of the plane of 0, 1, 2.
pub fn random_pair(seed: u64) -> [P3; 5] {
    let mut r = rng(seed);
    loop {
        let a = random_tet(&mut r);
        let b = random_tet(&mut r);
        let p = [a[0], a[1], a[2], a[3], b[3]];
        let n = cross(sub(p[1], p[0]), sub(p[2], p[0]));
        let s3 = dot(sub(p[3], p[0]), n);
        let s4 = dot(sub(p[4], p[0]), n);
        let shape = |q: [P3; 4]| tet_volume(&q) / tet_sq(&q).iter().fold(0.0f64, |m, &x| m.max(x)).powf(1.5);
        if s3 * s4 < 0.0 && shape([p[0], p[1], p[2], p[4]]) > 0.02 {
            return p;
        }
    }
}

/// `∂λ/∂ℓ` of the embedded pair by Richardson-extrapolated central
/// differences on the coordinate construction.
pub fn oracle_gradient(p: &[P3; 5], a: usize, b: usize) -> f64 {
    let lambda = |da: f64| {
        let sq = |i: usize, j: usize| {
            let d = dist2(p[i], p[j]);
            if (i, j) == (a, b) || (j, i) == (a, b) {
                (d.sqrt() + da).powi(2)
            } else {
                d
            }
        };
        pair_lambda(&embed_pair(&sq))
    };
    let h = 1e-3 * dist2(p[a], p[b]).sqrt();
    let d1 = (lambda(h) - lambda(-h)) / (2.0 * h);
    let d2 = (lambda(h / 2.0) - lambda(-h / 2.0)) / h;
    (4.0 * d2 - d1) / 3.0
}

/// Eight tetrahedra filling an octahedron around its centre (vertex 0): a
/// flat block whose six edges at the centre are interior.
pub fn flat_octahedron() -> (Vec<[usize; 4]>, Vec<P3>) {
    let pts = vec![
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    let mut tets = Vec::new();
    for k in 0..4 {
        let a = 1 + k;
        let b = 1 + (k + 1) % 4;
        tets.push([0, a, b, 5]);
        tets.push([0, a, b, 6]);
    }
    (tets, pts)
}

/// Multiplies every edge length by an independent factor in `1 ± frac`.
pub fn perturbed(
    metric: &regge_flow::MetricAssignment<f64>,
    frac: f64,
    seed: u64,
) -> regge_flow::MetricAssignment<f64> {
    let mut r = rng(seed);
    let lengths: Vec<f64> = metric.lengths().iter().map(|l| l * (1.0 + frac * r.random_range(-1.0..=1.0))).collect();
    regge_flow::MetricAssignment::from_lengths(&lengths)
}
