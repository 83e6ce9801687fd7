use crate::output::{ensure_dir, num, write_json, Csv};
use crate::{termination_code, Exit, FlowArgs, GenerateArgs, ModelArg};
use anyhow::Context;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regge_flow::complex::json::{read_mesh, write_mesh};
use regge_flow::flow::{run_flow, stability_report, Differentiation};
use regge_flow::models::{
    generate_cylinder_lattice, generate_flat_torus, generate_jittered_flat_torus, generate_pcell_lattice,
};
use regge_flow::{validate_metric, ComplexTopology3, Config, Curvature, Metric};
use serde_json::json;
use std::path::Path;

fn load(mesh: &Path) -> Result<(ComplexTopology3, Metric), Exit> {
    Ok(read_mesh(mesh)?)
}

pub fn curvature(mesh: &Path, out: &Path) -> Result<(), Exit> {
    let (top, metric) = load(mesh)?;
    let report = validate_metric(&top, &metric)?;
    let (field, dual) = Curvature::compute(&top, &metric)?;
    ensure_dir(out)?;

    let mut edges = Csv::new(&["edge_id", "v0", "v1", "length", "deficit", "dual_area", "sectional", "rc_edge"]);
    for (e, &[a, b]) in top.edges().iter().enumerate() {
        edges.row(&[
            e.to_string(),
            a.to_string(),
            b.to_string(),
            num(metric.lengths_sq[e].sqrt()),
            num(field.deficit[e]),
            num(dual.dual_polygon_area[e]),
            num(field.sectional[e]),
            num(field.rc_edge[e]),
        ]);
    }
    edges.write(&out.join("edges.csv"))?;

    let mut duals = Csv::new(&["triangle_id", "v0", "v1", "v2", "lambda", "rc_dual"]);
    for (f, &[a, b, c]) in top.triangles().iter().enumerate() {
        duals.row(&[
            f.to_string(),
            a.to_string(),
            b.to_string(),
            c.to_string(),
            num(dual.dual_edge_len[f]),
            num(field.rc_dual[f]),
        ]);
    }
    duals.write(&out.join("duals.csv"))?;

    let mut vertices = Csv::new(&["vertex", "scalar_curvature"]);
    for (v, &r) in field.scalar_vertex.iter().enumerate() {
        if !top.vertex_edges(v).is_empty() {
            vertices.row(&[v.to_string(), num(r)]);
        }
    }
    vertices.write(&out.join("vertices.csv"))?;

    write_json(
        &out.join("summary.json"),
        &json!({
            "regge_action": field.regge_action,
            "well_centered_fraction": report.well_centered_fraction(),
            "well_centered": report.is_well_centered(),
            "non_well_centered_triangles": report.non_well_centered_triangles.len(),
            "compact": top.is_compact(),
            "orientable": report.orientable,
            "vertices": top.used_vertex_count(),
            "edges": top.edge_count(),
            "triangles": top.triangle_count(),
            "tetrahedra": top.tet_count(),
            "total_volume": dual.total_volume(),
            "max_abs_deficit": field.deficit.iter().fold(0.0f64, |m, e| m.max(e.abs())),
        }),
    )?;
    Ok(())
}

pub fn flow(args: &FlowArgs) -> Result<u8, Exit> {
    let (top, metric) = load(&args.mesh)?;
    let config = Config {
        dt_initial: args.dt,
        dt_min: args.dt_min,
        dt_max: args.dt_max.max(args.dt),
        integrator: args.integrator.into(),
        rel_tol: args.rel_tol,
        abs_tol: args.abs_tol,
        t_end: args.t_end,
        stop_min_edge_fraction: args.stop_min_edge,
        stop_on_nonrealizable: !args.retry_nonrealizable,
        record_every: args.record_every,
        differentiation: (&args.derivatives).into(),
        ..Config::default()
    };
    let traj = run_flow(&top, &metric, &config)?;
    ensure_dir(&args.out)?;

    let mut rows = Csv::new(&["t", "edge_id", "length", "deficit", "rc_edge"]);
    let mut summary = Csv::new(&["t", "min_len", "max_len", "action", "termination", "length_cv"]);
    let last = traj.snapshots.len() - 1;
    for (i, snap) in traj.snapshots.iter().enumerate() {
        let nan = vec![f64::NAN; top.edge_count()];
        let (deficit, rc) = match Curvature::compute(&top, &snap.metric) {
            Ok((c, _)) => (c.deficit, c.rc_edge),
            Err(_) => (nan.clone(), nan),
        };
        for e in 0..top.edge_count() {
            rows.row(&[num(snap.t), e.to_string(), num(snap.metric.lengths_sq[e].sqrt()), num(deficit[e]), num(rc[e])]);
        }
        let term = if i == last { traj.termination.as_str() } else { "" };
        summary.row(&[
            num(snap.t),
            num(snap.min_len),
            num(snap.max_len),
            num(snap.regge_action),
            term.to_string(),
            num(snap.length_cv),
        ]);
    }
    rows.write(&args.out.join("trajectory.csv"))?;
    summary.write(&args.out.join("summary.csv"))?;
    let code = termination_code(traj.termination);
    write_json(
        &args.out.join("summary.json"),
        &json!({
            "termination": traj.termination.as_str(),
            "exit_code": code,
            "message": traj.message,
            "accepted_steps": traj.accepted_steps,
            "rejected_steps": traj.rejected_steps,
            "t_final": traj.last().t,
            "integrator": config.integrator.as_str(),
        }),
    )?;
    if let Some(msg) = &traj.message {
        eprintln!("flow stopped ({}): {msg}", traj.termination);
    }
    Ok(code)
}

pub fn stability(mesh: &Path, out: &Path, diff: Differentiation<f64>) -> Result<(), Exit> {
    let (top, metric) = load(mesh)?;
    let report = stability_report(&top, &metric, diff, 1e12)?;
    ensure_dir(out)?;
    let mut csv = Csv::new(&["index", "re", "im"]);
    for (i, z) in report.eigenvalues.iter().enumerate() {
        csv.row(&[i.to_string(), num(z.re), num(z.im)]);
    }
    csv.write(&out.join("spectrum.csv"))?;
    write_json(
        &out.join("stability.json"),
        &json!({
            "eigenvalues": report.eigenvalues.len(),
            "positive_real_count": report.positive_real_count,
            "tolerance": report.tolerance,
            "spectral_radius": report.spectral_radius,
            "velocity_norm": report.velocity_norm,
            "max_real_part": report.eigenvalues.first().map(|z| z.re),
        }),
    )?;
    println!(
        "{} eigenvalues, {} with real part > {:.3e}; |F| = {:.3e}",
        report.eigenvalues.len(),
        report.positive_real_count,
        report.tolerance,
        report.velocity_norm
    );
    Ok(())
}

pub fn generate(args: &GenerateArgs) -> Result<(), Exit> {
    if !(args.scale > 0.0) || !(0.0..1.0).contains(&args.perturb) {
        return Err(regge_flow::Error::InvalidArgument("need scale > 0 and 0 <= perturb < 1".into()).into());
    }
    if args.model == ModelArg::Cylinder {
        let lattice = generate_cylinder_lattice(args.rings, args.s0, args.a0)?;
        let text = serde_json::to_string_pretty(&lattice).context("serializing prism lattice")?;
        std::fs::write(&args.out, text + "\n").with_context(|| format!("writing {}", args.out.display()))?;
        return Ok(());
    }
    let (top, metric) = match args.model {
        ModelArg::FiveCell => generate_pcell_lattice(3)?,
        ModelArg::SixteenCell => generate_pcell_lattice(4)?,
        ModelArg::SixHundredCell => generate_pcell_lattice(5)?,
        ModelArg::FlatTorus if args.jitter > 0.0 => generate_jittered_flat_torus(args.cells, args.jitter, args.seed)?,
        ModelArg::FlatTorus => generate_flat_torus(args.cells)?,
        ModelArg::Cylinder => unreachable!(),
    };
    let mut metric = metric.scaled(args.scale);
    if args.perturb > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        for l in &mut metric.lengths_sq {
            let f = 1.0 + args.perturb * rng.random_range(-1.0..=1.0);
            *l *= f * f;
        }
    }
    std::fs::write(&args.out, write_mesh(&top, &metric) + "\n")
        .with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}
