mod common;

use approx::assert_relative_eq;
use common::*;
use proptest::prelude::*;
use regge_flow::complex::{build_complex, MetricAssignment};
use regge_flow::curvature::deficit_angles;
use regge_flow::flow::{
    assemble_rrf_system, dual_length_jacobian, evaluate_state, run_flow, stability_report, step, velocity,
    Differentiation, FlowConfig, Integrator, Termination,
};
use regge_flow::geometry::dual_geometry;
use regge_flow::models::{generate_flat_torus, generate_jittered_flat_torus, generate_pcell_lattice, PCellModel};
use regge_flow::Error;

const EXACT: Differentiation<f64> = Differentiation::Exact;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dual_length_partials_match_coordinate_oracle(seed in any::<u64>()) {
        let p = random_pair(seed);
        let top = build_complex(&[[0, 1, 2, 3], [0, 1, 2, 4]]).unwrap();
        let m = MetricAssignment::new(top.edges().iter().map(|&[a, b]| dist2(p[a], p[b])).collect());
        let tri = top.triangle_id([0, 1, 2]).unwrap();
        let exact = dual_length_jacobian(&top, &m, tri, EXACT).unwrap();
        let central = dual_length_jacobian(&top, &m, tri, Differentiation::Central(1e-6)).unwrap();
        prop_assert_eq!(exact.len(), 9);
        let scale = exact.iter().fold(0.0f64, |s, &(_, d)| s.max(d.abs()));
        for (&(e, dx), &(_, dc)) in exact.iter().zip(&central) {
            let [a, b] = top.edges()[e];
            let want = oracle_gradient(&p, a, b);
            prop_assert!((dx - want).abs() <= 1e-5 * scale, "exact {} vs {}", dx, want);
            prop_assert!((dc - want).abs() <= 1e-5 * scale, "central {} vs {}", dc, want);
        }
    }
}

#[test]
fn uniform_lattice_velocity_matches_closed_form() {
    for p in [3, 5] {
        let (top, m) = generate_pcell_lattice::<f64>(p).unwrap();
        let rate = PCellModel::new(p, 1.0).unwrap().ell_sq_rate();
        for diff in [EXACT, Differentiation::Central(1e-6)] {
            let state = evaluate_state(&top, &m, diff, 1e12).unwrap();
            for &v in &state.velocity {
                // d(ℓ²)/dt = 2 ℓ ℓ̇
                assert_relative_eq!(2.0 * v, rate, max_relative = 1e-7);
            }
        }
    }
}

#[test]
fn cross_polytope_mass_matrix_is_singular() {
    let (top, m) = generate_pcell_lattice::<f64>(4).unwrap();
    let err = evaluate_state(&top, &m, EXACT, 1e12).unwrap_err();
    assert!(matches!(err, Error::MatrixSingular { .. }), "{err}");
    let traj = run_flow(&top, &m, &FlowConfig::default()).unwrap();
    assert_eq!(traj.termination, Termination::MatrixSingular);
    assert_eq!(traj.snapshots.len(), 1);
}

#[test]
fn row_sums_match_uniform_mode() {
    let (top, m) = generate_pcell_lattice::<f64>(5).unwrap();
    let dual = dual_geometry(&top, &m).unwrap();
    let eps = deficit_angles(&top, &m).unwrap();
    let sys = assemble_rrf_system(&top, &m, &dual, &eps, EXACT).unwrap();
    for r in 0..sys.n {
        let s: f64 = (0..sys.n).map(|c| sys.entry(r, c)).sum();
        assert_relative_eq!(s, 2.0 * 2f64.sqrt() * 5.0 / 24.0, max_relative = 1e-12);
        assert_relative_eq!(sys.rhs[r], -4.0 * eps[r], max_relative = 1e-15);
    }
    // projected on the uniform mode: (√2·5/24)·d(ℓ²)/dt = −4ε
    let v = sys.solve(1e12).unwrap();
    assert_relative_eq!(2f64.sqrt() * 5.0 / 24.0 * 2.0 * v[0], -4.0 * eps[0], max_relative = 1e-12);
}

#[test]
fn exact_and_central_velocities_agree_off_symmetry() {
    let (top, m) = generate_pcell_lattice::<f64>(5).unwrap();
    let m = perturbed(&m, 0.01, 5);
    let a = velocity(&top, &m.lengths(), EXACT, 1e12).unwrap();
    let b = velocity(&top, &m.lengths(), Differentiation::Central(1e-5), 1e12).unwrap();
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-6 * scale, "{x} vs {y}");
    }
}

#[test]
fn flat_torus_is_a_fixed_point() {
    let (top, m) = generate_flat_torus::<f64>(3).unwrap();
    let state = evaluate_state(&top, &m, EXACT, 1e12).unwrap();
    assert!(state.system.rhs_norm() < 1e-12);
    assert!(state.velocity.iter().all(|v| v.abs() < 1e-12));

    let config = FlowConfig { t_end: 1.0, dt_initial: 0.1, ..FlowConfig::default() };
    let traj = run_flow(&top, &m, &config).unwrap();
    assert_eq!(traj.termination, Termination::ReachedTEnd);
    assert!(traj.snapshots.len() > 2);
    // the state is evolved in ℓ; ℓ² is only rederived from it
    let first = traj.snapshots[0].metric.lengths();
    for s in &traj.snapshots {
        assert_eq!(s.metric.lengths(), first);
    }
    for (a, b) in first.iter().zip(m.lengths()) {
        assert_relative_eq!(*a, b, max_relative = 1e-15);
    }
}

#[test]
fn euler_step_is_one_velocity_solve() {
    let (top, m) = generate_pcell_lattice::<f64>(3).unwrap();
    let m = perturbed(&m, 0.05, 3);
    let dt = 1e-3;
    let config = FlowConfig { integrator: Integrator::ExplicitEuler, dt_initial: dt, ..FlowConfig::default() };
    let out = step(&top, &m, &config).unwrap();
    let l = m.lengths();
    let v = velocity(&top, &l, EXACT, 1e12).unwrap();
    for ((new, l), v) in out.metric.lengths().iter().zip(&l).zip(&v) {
        assert_relative_eq!(*new, l + dt * v, max_relative = 1e-15);
    }
    assert_eq!(out.metric.time, m.time + dt);
}

#[test]
fn uniform_600_cell_collapses_on_schedule() {
    let (top, m) = generate_pcell_lattice::<f64>(5).unwrap();
    let model = PCellModel::new(5, 1.0).unwrap();
    let fraction = 0.5;
    // ℓ² = ℓ₀² + rate·t reaches (fraction ℓ₀)²
    let t_collapse = (1.0 - fraction * fraction) / -model.ell_sq_rate();
    let config =
        FlowConfig { t_end: 10.0, dt_initial: 1e-2, stop_min_edge_fraction: fraction, ..FlowConfig::default() };
    let traj = run_flow(&top, &m, &config).unwrap();
    assert_eq!(traj.termination, Termination::EdgeCollapse);
    let n = traj.snapshots.len();
    let (t_prev, t_stop) = (traj.snapshots[n - 2].t, traj.snapshots[n - 1].t);
    assert!(t_prev < t_collapse && t_collapse <= t_stop, "{t_prev} {t_collapse} {t_stop}");
    // monotone collapse of every edge
    for w in traj.snapshots.windows(2) {
        for (a, b) in w[0].metric.lengths_sq.iter().zip(&w[1].metric.lengths_sq) {
            assert!(b < a);
        }
    }
}

#[test]
fn runs_are_bit_identical() {
    let (top, m) = generate_pcell_lattice::<f64>(3).unwrap();
    let m = perturbed(&m, 0.05, 8);
    let config = FlowConfig { t_end: 0.05, dt_initial: 1e-3, ..FlowConfig::default() };
    let a = run_flow(&top, &m, &config).unwrap();
    let b = run_flow(&top, &m, &config).unwrap();
    assert_eq!(a.snapshots, b.snapshots);
    assert_eq!(a.accepted_steps, b.accepted_steps);
}

#[test]
fn spectrum_scales_inversely_with_area() {
    let (top, m) = generate_pcell_lattice::<f64>(3).unwrap();
    let m = perturbed(&m, 0.05, 2);
    let c2 = 2.25;
    let a = stability_report(&top, &m, EXACT, 1e12).unwrap();
    let b = stability_report(&top, &m.scaled(c2), EXACT, 1e12).unwrap();
    assert_eq!(a.eigenvalues.len(), 10);
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((y * c2 - x).norm() < 1e-5 * a.spectral_radius, "{x} vs {y}");
    }
}

#[test]
fn fixed_point_spectrum() {
    // the symmetric torus has singular M; jitter the vertices instead
    let (top, m) = generate_jittered_flat_torus::<f64>(3, 0.03, 4).unwrap();
    let report = stability_report(&top, &m, EXACT, 1e12).unwrap();
    assert!(report.velocity_norm < 1e-12);
    assert_eq!(report.eigenvalues.len(), top.edge_count());
    // the kernel is the space of flat deformations: vertex displacements
    // modulo translations (3V − 3) plus the six moduli of the flat torus
    let kernel = report.eigenvalues.iter().filter(|z| z.norm() < 1e-6).count();
    assert_eq!(kernel, 3 * top.vertex_count() + 3);
}

#[test]
fn non_closed_complex_is_rejected() {
    let top = build_complex(&[[0, 1, 2, 3]]).unwrap();
    let m = MetricAssignment::uniform(&top, 1.0);
    assert!(matches!(run_flow(&top, &m, &FlowConfig::default()), Err(Error::NotCompact)));
}
