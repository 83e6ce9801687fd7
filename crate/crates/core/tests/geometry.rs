mod common;

use approx::assert_relative_eq;
use common::*;
use proptest::prelude::*;
use regge_flow::complex::{build_complex, validate_metric, MetricAssignment, TET_EDGES};
use regge_flow::geometry::{dual_geometry, Tetrahedron, Triangle};

/// Tolerance relative to the natural scale of each quantity.
fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(1.0)
}

#[test]
fn hundred_random_tetrahedra_match_the_embedding() {
    let mut rng = rng(7);
    for _ in 0..200 {
        let p = random_tet(&mut rng);
        let tet = Tetrahedron::new(tet_sq(&p)).unwrap();
        let r = norm(sub(tet_circumcenter(&p), p[0]));
        assert_relative_eq!(tet.volume(), tet_volume(&p), max_relative = 1e-10);
        assert_relative_eq!(tet.circumradius(), r, max_relative = 1e-10);
        for (k, &[i, j]) in TET_EDGES.iter().enumerate() {
            assert_relative_eq!(tet.dihedral_angle(k), dihedral(&p, i, j), max_relative = 1e-10);
        }
        for i in 0..4 {
            assert!(close(tet.face_segment(i), face_segment(&p, i), r, 1e-10));
        }
    }
}

#[test]
fn triangle_moment_arms_match_the_embedding() {
    let mut rng = rng(11);
    for _ in 0..100 {
        let p = random_tet(&mut rng);
        let (a, b, c) = (p[0], p[1], p[2]);
        // local edge k is opposite local vertex k
        let tri = Triangle::new([dist2(b, c), dist2(a, c), dist2(a, b)]).unwrap();
        let scale = tri.circumradius();
        assert!(close(tri.moment_arm(0), moment_arm(b, c, a), scale, 1e-10));
        assert!(close(tri.moment_arm(1), moment_arm(a, c, b), scale, 1e-10));
        assert!(close(tri.moment_arm(2), moment_arm(a, b, c), scale, 1e-10));
        let area = norm(cross(sub(b, a), sub(c, a))) / 2.0;
        assert_relative_eq!(tri.area(), area, max_relative = 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn intrinsic_geometry_agrees_with_coordinates(seed in any::<u64>()) {
        let p = random_tet(&mut rng(seed));
        let tet = Tetrahedron::new(tet_sq(&p)).unwrap();
        let r = tet.circumradius();
        prop_assert!((tet.volume() - tet_volume(&p)).abs() <= 1e-10 * tet_volume(&p));
        for (k, &[i, j]) in TET_EDGES.iter().enumerate() {
            prop_assert!((tet.dihedral_angle(k) - dihedral(&p, i, j)).abs() <= 1e-10);
        }
        for i in 0..4 {
            prop_assert!(close(tet.face_segment(i), face_segment(&p, i), r, 1e-10));
        }
    }

    #[test]
    fn dihedrals_scale_invariant_volume_cubic(seed in any::<u64>(), c in 0.1f64..10.0) {
        let sq = tet_sq(&random_tet(&mut rng(seed)));
        let a = Tetrahedron::new(sq).unwrap();
        let b = Tetrahedron::new(sq.map(|x| x * c * c)).unwrap();
        prop_assert!((b.volume() - c.powi(3) * a.volume()).abs() <= 1e-12 * c.powi(3) * a.volume());
        for k in 0..6 {
            prop_assert!((b.dihedral_angle(k) - a.dihedral_angle(k)).abs() <= 1e-12);
        }
        for i in 0..4 {
            prop_assert!((b.face_segment(i) - c * a.face_segment(i)).abs() <= 1e-12 * c * a.circumradius());
        }
    }

    #[test]
    fn hybrid_volumes_tile_a_tetrahedron(seed in any::<u64>()) {
        // the six signed edge-hybrid cells partition the tetrahedron
        let p = random_tet(&mut rng(seed));
        let top = build_complex(&[[0, 1, 2, 3]]).unwrap();
        let m = MetricAssignment::new(tet_sq(&p).to_vec());
        let dual = dual_geometry(&top, &m).unwrap();
        let total: f64 = dual.hybrid_volume.iter().sum();
        prop_assert!((total - tet_volume(&p)).abs() <= 1e-10 * tet_volume(&p));
    }
}

#[test]
fn sliver_is_flagged_not_well_centered() {
    // circumcenter outside: flattened apex over an obtuse base
    let p = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [1.0, 0.2, 0.0], [1.0, 0.1, 0.3]];
    let top = build_complex(&[[0, 1, 2, 3]]).unwrap();
    let m = MetricAssignment::new(tet_sq(&p).to_vec());
    let report = validate_metric(&top, &m).unwrap();
    assert!(!report.is_well_centered());
    let tet = Tetrahedron::new(tet_sq(&p)).unwrap();
    assert!((0..4).any(|i| tet.face_segment(i) < 0.0));
    for i in 0..4 {
        assert!(close(tet.face_segment(i), face_segment(&p, i), tet.circumradius(), 1e-10));
    }
}
