//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p plantsim-core --release --test acceptance`. Set
//! `PLANTSIM_BLESS=1` to rewrite the stored trend baseline instead of
//! comparing against it.

use std::collections::{BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::{Matrix3, Rotation3, UnitQuaternion};
use plantsim::collision::broadphase::cell_size;
use plantsim::collision::{closest_point_pair, spatial_hash_pairs, Primitive};
use plantsim::compiler::{build_sim_state, sample_curves, PlantEdge};
use plantsim::prelude::*;
use plantsim::rod::{BendTwistPair, DarbouxVector, Particle};
use plantsim::scene::{self, Monotonicity, SceneConfig, SweepParameter};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn scenes_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

fn load(rel: &str) -> Result<SceneConfig, String> {
    scene::load_scene(&scenes_dir().join(rel)).map_err(|e| format!("{rel}: {e}"))
}

fn unit_quat() -> impl Strategy<Value = Quat> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("non-degenerate", |(w, x, y, z)| w * w + x * x + y * y + z * z > 1e-3)
        .prop_map(|(w, x, y, z)| {
            let n = (w * w + x * x + y * y + z * z).sqrt();
            Quat::new(w / n, x / n, y / n, z / n)
        })
}

/// Hamilton product written out component by component.
fn hamilton(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    let [aw, ax, ay, az] = a;
    let [bw, bx, by, bz] = b;
    [
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ]
}

fn criterion_1() -> Outcome {
    let mut r = runner(2000);
    r.run(&(unit_quat(), unit_quat(), 0.01..0.5f64), |(a, b, l)| {
        let got = compute_darboux(&a, &b, l).unwrap().0;
        let p = hamilton([a.w, -a.i, -a.j, -a.k], [b.w, b.i, b.j, b.k]);
        let want = p.map(|c| c * 2.0 / l);
        for (g, w) in [got.w, got.i, got.j, got.k].iter().zip(want) {
            prop_assert!((g - w).abs() <= 1e-12, "darboux {got:?} vs oracle {want:?}");
        }
        Ok(())
    })
    .map_err(|e| e.to_string())?;

    // Straight, aligned: the segment lies along d3 and both frames agree.
    let mut r = runner(2000);
    r.run(&(unit_quat(), 0u32..6), |(q, k)| {
        let l0 = 2f64.powi(-(k as i32) - 1);
        let p2 = director(&q, 3) * l0;
        let cs = stretch_shear_constraint(&Vec3::zeros(), &p2, &q, l0).unwrap();
        prop_assert!(cs == Vec3::zeros(), "C_s = {cs:?}");
        let pair = BendTwistPair {
            segment_a: 0,
            segment_b: 1,
            mean_length: l0,
            rest_darboux: DarbouxVector(Quat::new(2.0 / l0, 0.0, 0.0, 0.0)),
            alive: true,
        };
        let cb = bend_twist_constraint(&pair, &q, &q).0;
        prop_assert!(cb.i == 0.0 && cb.j == 0.0 && cb.k == 0.0, "C_b = {cb:?}");
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    Ok("2000 random pairs within 1e-12 of the Hamilton-product oracle; aligned configurations give exact zeros".into())
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

/// Frenet frame of the helix (a cos t, a sin t, b t) at arc length `s`, as
/// a quaternion with columns (normal, binormal, tangent).
fn helix_frame(a: f64, b: f64, s: f64) -> Quat {
    let c = (a * a + b * b).sqrt();
    let t = s / c;
    let tangent = Vec3::new(-a * t.sin(), a * t.cos(), b) / c;
    let normal = Vec3::new(-t.cos(), -t.sin(), 0.0);
    let binormal = tangent.cross(&normal);
    let m = Matrix3::from_columns(&[normal, binormal, tangent]);
    *UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(m)).quaternion()
}

fn criterion_2() -> Outcome {
    let (a, b) = (0.1, 0.05);
    let c2 = a * a + b * b;
    // Darboux vector of the Frenet frame in its own basis: (0, kappa, tau).
    let exact = Vec3::new(0.0, a / c2, b / c2);
    let total = 0.4;
    let mut errors = Vec::new();
    for l in [0.1, 0.05, 0.025] {
        let n = (total / l as f64).round() as usize;
        let mut frames: Vec<Quat> = Vec::new();
        for i in 0..=n {
            let mut q = helix_frame(a, b, i as f64 * l);
            if let Some(prev) = frames.last() {
                if prev.coords.dot(&q.coords) < 0.0 {
                    q = -q;
                }
            }
            frames.push(q);
        }
        let err = frames
            .windows(2)
            .map(|w| {
                let d = compute_darboux(&w[0], &w[1], l).unwrap().0;
                (Vec3::new(d.i, d.j, d.k) - exact).norm()
            })
            .fold(0.0f64, f64::max);
        errors.push(err);
    }
    if errors.windows(2).all(|w| w[1] < w[0]) {
        Ok(format!("errors {} at l = 0.1, 0.05, 0.025 m", sci(&errors)))
    } else {
        Err(format!("errors not strictly decreasing: {}", sci(&errors)))
    }
}

fn free_rod() -> Result<SimState, String> {
    let curves = CurveSet {
        curves: vec![Curve::constant(vec![vec3(0.0, 0.0, 0.0), vec3(0.1, 0.05, 0.2)], 0.005)],
        root_curve: 0,
        root_end: CurveEnd::Start,
    };
    let params = CompilerParams { step: 0.005, sigma_connect: 0.02, sigma_distance: 0.02 };
    let plant = compile_plant(&curves, &params, &[]).map_err(|e| e.to_string())?;
    let material = Material::new(2e7, 0.3, 300.0).map_err(|e| e.to_string())?;
    build_sim_state(&plant.graph, &material, &[], &LeafLibrary::builtin()).map_err(|e| e.to_string())
}

fn criterion_3() -> Outcome {
    let mut state = free_rod()?;
    for (i, p) in state.particles.iter_mut().enumerate() {
        let f = i as f64;
        p.velocity = vec3((0.7 * f).sin(), (1.3 * f).cos(), 0.2 * (0.4 * f).sin()) * 0.1;
    }
    for (i, o) in state.orientations.iter_mut().enumerate() {
        o.angular_velocity = vec3(0.5, -0.3 * i as f64, 0.2);
    }
    let params = SolverParams { gravity: Vec3::zeros(), velocity_damping: 0.0, ..SolverParams::default() };
    let p0 = state.linear_momentum();
    let mut solver = Solver::new();
    let mut worst_norm = 0.0f64;
    for _ in 0..1000 {
        solver
            .step(&mut state, &params, &CollisionParams::default(), &[], &FracturePolicy::disabled())
            .map_err(|e| e.to_string())?;
        for o in &state.orientations {
            worst_norm = worst_norm.max((o.rotation.norm() - 1.0).abs());
        }
    }
    let drift = (state.linear_momentum() - p0).norm();
    if drift >= 1e-10 {
        return Err(format!("momentum drift {drift:.3e}"));
    }
    if worst_norm > 1e-9 {
        return Err(format!("quaternion norm off by {worst_norm:.3e}"));
    }

    let cfg = load("cantilever/scene.toml")?;
    let dt = cfg.solver_params().dt * cfg.file.output.stride as f64;
    let masses = scene::Simulation::new(&cfg).map_err(|e| e.to_string())?.masses();
    let out = scene::run(&cfg, None).map_err(|e| e.to_string())?;
    let energies = scene::frame_energies(&out.frames, &masses, dt);
    let peak = energies.iter().cloned().fold(0.0f64, f64::max);
    if !(peak > 0.0) {
        return Err("cantilever never moved".into());
    }
    // Energy entry k belongs to frame k + 1; rest starts after the last loud frame.
    let last_loud = energies.iter().rposition(|e| *e >= 1e-6 * peak).unwrap_or(0);
    let settled_at = (last_loud + 2) as f64 * dt;
    if last_loud + 1 >= energies.len() || settled_at > 5.0 {
        return Err(format!("cantilever still moving at {settled_at:.3} s (KE >= 1e-6 of peak)"));
    }
    Ok(format!(
        "momentum drift {drift:.2e} over 1000 steps, max | |q| - 1 | {worst_norm:.1e}, cantilever quiet from {settled_at:.3} s"
    ))
}

/// Baseline sags for the trend sweeps, `parameter value sag` per line.
fn baseline_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/baselines/trends.txt")
}

fn read_baseline() -> Vec<(String, f64, f64)> {
    let Ok(text) = std::fs::read_to_string(baseline_path()) else { return Vec::new() };
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .filter_map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            Some((f.first()?.to_string(), f.get(1)?.parse().ok()?, f.get(2)?.parse().ok()?))
        })
        .collect()
}

struct Trend {
    parameter: SweepParameter,
    values: Vec<f64>,
    sag: Monotonicity,
    nodes: Option<Monotonicity>,
}

fn trend(t: &Trend, baseline: &[(String, f64, f64)], blessed: &mut Vec<String>) -> Outcome {
    let cfg = load("branching/scene.toml")?;
    let result = scene::sweep(&cfg, t.parameter, &t.values, None).map_err(|e| e.to_string())?;
    let sags: Vec<Option<f64>> = result.rows.iter().map(|r| r.tip_sag).collect();
    let verdict = scene::monotonicity(&sags);
    if verdict != t.sag {
        return Err(format!("sag {verdict} ({sags:?}), expected {}", t.sag));
    }
    if let Some(expected) = t.nodes {
        let nodes: Vec<Option<f64>> = result.rows.iter().map(|r| Some(r.node_count as f64)).collect();
        let v = scene::monotonicity(&nodes);
        if v != expected {
            return Err(format!("node count {v} ({nodes:?}), expected {expected}"));
        }
    }
    let name = t.parameter.name();
    let mut notes = Vec::new();
    for row in &result.rows {
        let sag = row.tip_sag.ok_or("missing sag")?;
        blessed.push(format!("{name} {} {sag:.9e}", row.value));
        match baseline.iter().find(|(p, v, _)| p == name && *v == row.value) {
            Some((_, _, base)) => {
                let rel = (sag - base).abs() / base.abs().max(1e-12);
                if rel > 1e-3 {
                    return Err(format!("{name} = {}: sag {sag:.6e} departs from baseline {base:.6e}", row.value));
                }
            }
            None if std::env::var_os("PLANTSIM_BLESS").is_none() => {
                return Err(format!("no baseline for {name} = {}", row.value));
            }
            None => {}
        }
        notes.push(format!("{:.4}", sag));
    }
    Ok(format!("{name} {:?}: sag {} m, {}", t.values, notes.join(" / "), t.sag))
}

fn criterion_7() -> Outcome {
    let values = [0.05, 0.1, 0.15, 0.25, 0.35];
    let mut notes = Vec::new();
    for rel in ["harvest_up/scene.toml", "harvest_horizontal/scene.toml"] {
        let cfg = load(rel)?;
        let result = scene::sweep(&cfg, SweepParameter::CSMax, &values, None).map_err(|e| e.to_string())?;
        let times: Vec<Option<f64>> = result.rows.iter().map(|r| r.detach_time).collect();
        let v = scene::monotonicity(&times);
        if v != Monotonicity::StrictlyIncreasing {
            return Err(format!("{rel}: detach times {v} ({times:?})"));
        }
        let shown: Vec<String> = times.iter().map(|t| format!("{:.4}", t.unwrap_or(f64::NAN))).collect();
        notes.push(format!("{}: {} s", rel.split('/').next().unwrap_or(rel), shown.join(" < ")));
    }
    Ok(notes.join("; "))
}

fn criterion_8() -> Outcome {
    let cfg = load("harvest_bend/scene.toml")?;
    let sim = scene::Simulation::new(&cfg).map_err(|e| e.to_string())?;
    let out = scene::run(&cfg, None).map_err(|e| e.to_string())?;
    if out.events.len() != 1 {
        return Err(format!("expected exactly one fracture, got {:?}", out.events));
    }
    let ev = &out.events[0];
    let kind = sim.state.segments[ev.segment].kind;
    if kind != SegmentKind::Pedicel {
        return Err(format!("segment {} ({kind:?}) broke instead of the pedicel", ev.segment));
    }
    let fruit = *sim.state.spheres.first().ok_or("scene has no fruit")?;
    let dt = cfg.solver_params().dt * cfg.file.output.stride as f64;
    let t0 = sim.state.time;
    // Quadratic fit of the fruit height from two frames after the break to the end.
    let pts: Vec<(f64, f64)> = out
        .frames
        .iter()
        .enumerate()
        .map(|(k, f)| (t0 + k as f64 * dt, f.positions[fruit].z))
        .filter(|(t, _)| *t >= ev.time + 2.0 * dt)
        .collect();
    if pts.len() < 10 {
        return Err(format!("only {} frames after detachment", pts.len()));
    }
    let accel = 2.0 * quadratic_coefficient(&pts);
    let g = cfg.solver_params().gravity.norm();
    let rel = (accel.abs() - g).abs() / g;
    if accel < 0.0 && rel <= 0.02 {
        Ok(format!("pedicel segment {} broke at {:.4} s; fruit accelerates at {accel:.4} m/s^2 ({:.2}% off g)", ev.segment, ev.time, rel * 100.0))
    } else {
        Err(format!("post-detach acceleration {accel:.4} m/s^2 vs g = {g}"))
    }
}

/// Least-squares `c` in `z = a + b t + c t²`.
fn quadratic_coefficient(pts: &[(f64, f64)]) -> f64 {
    let t_mean = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let mut m = Matrix3::zeros();
    let mut rhs = Vec3::zeros();
    for (t, z) in pts {
        let u = t - t_mean;
        let row = Vec3::new(1.0, u, u * u);
        m += row * row.transpose();
        rhs += row * *z;
    }
    m.lu().solve(&rhs).map_or(f64::NAN, |x| x.z)
}

fn chain(n: usize, spacing: f64) -> PlantGraph {
    let nodes = (0..n).map(|i| (vec3(0.0, 0.0, i as f64 * spacing), 0.005)).collect();
    let edges = (1..n).map(|i| PlantEdge { parent: i - 1, child: i, length: spacing }).collect();
    PlantGraph::new(nodes, edges, 0)
}

fn is_spanning_tree(g: &PlantGraph) -> bool {
    let n = g.nodes.len();
    if g.edges.len() + 1 != n {
        return false;
    }
    let adj = g.adjacency();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([g.root]);
    seen[g.root] = true;
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.iter().all(|s| *s)
}

fn random_tree() -> impl Strategy<Value = PlantGraph> {
    proptest::collection::vec((any::<prop::sample::Index>(), 0.004..0.02f64, -1.0..1.0f64, -1.0..1.0f64), 1..60)
        .prop_map(|spec| {
            let mut nodes = vec![(Vec3::zeros(), 0.005)];
            let mut edges = Vec::new();
            for (parent, len, dx, dy) in spec {
                // Favour long chains: most nodes extend the newest one.
                let p = if parent.index(4) == 0 { parent.index(nodes.len()) } else { nodes.len() - 1 };
                let dir = vec3(dx, dy, 1.0).normalize();
                let pos = nodes[p].0 + dir * len;
                edges.push(PlantEdge { parent: p, child: nodes.len(), length: len });
                nodes.push((pos, 0.005));
            }
            PlantGraph::new(nodes, edges, 0)
        })
}

fn random_curves() -> impl Strategy<Value = CurveSet> {
    let branch = (any::<prop::sample::Index>(), any::<prop::sample::Index>(), -1.0..1.0f64, -1.0..1.0f64, 0.05..0.3f64);
    (0.2..0.6f64, proptest::collection::vec(branch, 0..8)).prop_map(|(stem, branches)| {
        let mut curves = vec![Curve::constant(vec![vec3(0.0, 0.0, 0.0), vec3(0.0, 0.0, stem)], 0.005)];
        for (host, at, dx, dy, len) in branches {
            let host = &curves[host.index(curves.len())].points;
            let (a, b) = (host[0], host[host.len() - 1]);
            let u = at.index(9) as f64 / 8.0;
            let base = a + (b - a) * u;
            let dir = vec3(dx, dy, 0.3).normalize();
            // Start a little off the host so the link must be made by the compiler.
            let start = base + dir * 0.006;
            curves.push(Curve::constant(vec![start, start + dir * len], 0.004));
        }
        CurveSet { curves, root_curve: 0, root_end: CurveEnd::Start }
    })
}

fn criterion_9() -> Outcome {
    let g = plantsim::compiler::simplify(&chain(11, 0.01), 0.02);
    let mut kept: Vec<f64> = g.nodes.iter().map(|n| (n.position.z * 1000.0).round() / 1000.0).collect();
    kept.sort_by(f64::total_cmp);
    let expected = vec![0.0, 0.02, 0.04, 0.06, 0.08, 0.10];
    if kept != expected {
        return Err(format!("chain simplified to {kept:?}, expected {expected:?}"));
    }
    if !is_spanning_tree(&g) {
        return Err("simplified chain is not a tree".into());
    }

    let mut r = runner(50);
    r.run(&(random_tree(), 0.01..0.05f64), |(tree, sigma)| {
        let once = plantsim::compiler::simplify(&tree, sigma);
        let twice = plantsim::compiler::simplify(&once, sigma);
        prop_assert_eq!(&once.nodes, &twice.nodes);
        let edges = |g: &PlantGraph| g.edges.iter().map(|e| (e.parent, e.child)).collect::<BTreeSet<_>>();
        prop_assert_eq!(edges(&once), edges(&twice));
        Ok(())
    })
    .map_err(|e| format!("simplify idempotence: {e}"))?;

    let mut r = runner(100);
    r.run(&random_curves(), |cs| {
        let samples = sample_curves(&cs, 0.005).unwrap();
        let g = connect_branches(&samples, 0.02).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(is_spanning_tree(&g), "{} nodes, {} edges", g.nodes.len(), g.edges.len());
        Ok(())
    })
    .map_err(|e| format!("connect_branches: {e}"))?;
    Ok("11-node chain keeps {0, 0.02, .., 0.10}; 50 random trees idempotent; 100 random curve sets give spanning trees".into())
}

fn random_primitive() -> impl Strategy<Value = Primitive> {
    let p = || (0.0..0.3f64, 0.0..0.3f64, 0.0..0.3f64).prop_map(|(x, y, z)| vec3(x, y, z));
    prop_oneof![
        (p(), 0.002..0.02f64).prop_map(|(center, radius)| Primitive::Sphere { center, radius }),
        (p(), -0.04..0.04f64, -0.04..0.04f64, -0.04..0.04f64, 0.001..0.01f64).prop_map(|(a, dx, dy, dz, radius)| {
            Primitive::Capsule { a, b: a + vec3(dx, dy, dz), radius }
        }),
    ]
}

fn criterion_10() -> Outcome {
    let mut r = runner(100);
    let exact_total = std::cell::Cell::new(0usize);
    r.run(&proptest::collection::vec(random_primitive(), 100), |prims| {
        let boxes: Vec<_> = prims.iter().map(|p| p.aabb(0.0)).collect();
        let max_r = prims.iter().map(|p| p.radius()).fold(0.0f64, f64::max);
        let found: BTreeSet<(usize, usize)> = spatial_hash_pairs(&boxes, cell_size(&boxes, 2.0 * max_r)).into_iter().collect();
        for i in 0..prims.len() {
            for j in i + 1..prims.len() {
                let d = closest_point_pair(&prims[i], &prims[j]).distance;
                if d < prims[i].radius() + prims[j].radius() {
                    exact_total.set(exact_total.get() + 1);
                    prop_assert!(found.contains(&(i, j)), "contact ({i}, {j}) missed by the broad phase");
                }
            }
        }
        Ok(())
    })
    .map_err(|e| e.to_string())?;

    // A sphere settling onto a box under gravity.
    let radius = 0.01;
    let mut state = SimState {
        particles: vec![Particle { position: vec3(0.0, 0.0, 0.05 + radius - 0.003), velocity: Vec3::zeros(), inverse_mass: 100.0, radius }],
        spheres: vec![0],
        ..SimState::default()
    };
    let obstacle = RigidObstacle {
        name: "box".into(),
        sdf: Sdf { primitives: vec![SdfPrimitive::Box { center: Vec3::zeros(), half_extents: vec3(0.05, 0.05, 0.05) }], grids: vec![] },
        trajectory: PoseTrajectory::stationary(Pose::IDENTITY),
    };
    let obstacles = [obstacle];
    let mut solver = Solver::new();
    let mut worst = 0.0f64;
    for _ in 0..120 {
        solver
            .step(&mut state, &SolverParams::default(), &CollisionParams::default(), &obstacles, &FracturePolicy::disabled())
            .map_err(|e| e.to_string())?;
        let (d, _) = sdf_query(&obstacles[0], &state.particles[0].position, state.time);
        worst = worst.max(radius - d);
    }
    if worst > 1e-5 {
        return Err(format!("sphere penetrates the box by {worst:.3e} m"));
    }
    Ok(format!("broad phase covers all {} exact contacts in 100 scenes; sphere-box penetration {:.1e} m", exact_total.get(), worst.max(0.0)))
}

fn criterion_11() -> Outcome {
    let cfg = load("reference/scene.toml")?;
    if cfg.solver_params() != &SolverParams::default() {
        return Err("reference scene overrides the default solver parameters".into());
    }
    let b = scene::bench(&cfg, scene::MIN_BENCH_WINDOW).map_err(|e| e.to_string())?;
    let line = format!("{} rods, ratio {:.3} over {:.1} s on {}", b.rods, b.ratio, b.simulated_seconds, b.hardware);
    if b.rods != 2242 {
        return Err(format!("expected 2242 rods: {line}"));
    }
    if b.ratio >= 0.25 {
        Ok(line)
    } else {
        Err(format!("below 0.25: {line}"))
    }
}

/// Longest simulated span used when checking reproducibility.
const DETERMINISM_SPAN: f64 = 2.0;

fn criterion_12() -> Outcome {
    let mut scenes: Vec<PathBuf> = Vec::new();
    for dir in std::fs::read_dir(scenes_dir()).map_err(|e| e.to_string())? {
        let dir = dir.map_err(|e| e.to_string())?.path();
        if !dir.is_dir() {
            continue;
        }
        for f in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
            let f = f.map_err(|e| e.to_string())?.path();
            let name = f.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            if name.starts_with("scene") && name.ends_with(".toml") {
                scenes.push(f);
            }
        }
    }
    scenes.sort();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (i, path) in scenes.iter().enumerate() {
        let cfg = scene::load_scene(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut file = cfg.file.clone();
        let span = cfg.duration().min(DETERMINISM_SPAN);
        file.run.duration = Some(span);
        let cfg = SceneConfig::from_file(file, &cfg.base_dir).map_err(|e| e.to_string())?;
        let dirs = [tmp.path().join(format!("{i}a")), tmp.path().join(format!("{i}b"))];
        for d in &dirs {
            scene::run(&cfg, Some(d)).map_err(|e| format!("{}: {e}", path.display()))?;
        }
        for name in ["frames.csv", "frames.bin", "events.csv"] {
            let a = std::fs::read(dirs[0].join(name));
            let b = std::fs::read(dirs[1].join(name));
            match (a, b) {
                (Ok(a), Ok(b)) if a == b => {}
                (Err(_), Err(_)) if name == "frames.bin" => {}
                _ => return Err(format!("{}: {name} differs between runs", path.display())),
            }
        }
    }
    Ok(format!("{} scenes reproduce byte for byte (first {DETERMINISM_SPAN} s of each)", scenes.len()))
}

fn main() {
    let baseline = read_baseline();
    let mut blessed = Vec::new();
    let trends = [
        Trend { parameter: SweepParameter::Stiffness, values: vec![1e7, 2e7, 3e7], sag: Monotonicity::StrictlyDecreasing, nodes: None },
        Trend { parameter: SweepParameter::Density, values: vec![300.0, 600.0, 900.0], sag: Monotonicity::StrictlyIncreasing, nodes: None },
        Trend {
            parameter: SweepParameter::SigmaDistance,
            values: vec![0.02, 0.035, 0.05],
            sag: Monotonicity::StrictlyDecreasing,
            nodes: Some(Monotonicity::StrictlyDecreasing),
        },
    ];

    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut record = |n: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {n:>2} {tag} {name}: {detail} [{secs:.1} s]");
        results.push((n, name, outcome, secs));
    };

    record(1, "constraint correctness", &mut criterion_1);
    record(2, "Darboux convergence on a helix", &mut criterion_2);
    record(3, "solver invariants", &mut criterion_3);
    let [t4, t5, t6] = &trends;
    record(4, "stiffness trend", &mut || trend(t4, &baseline, &mut blessed));
    record(5, "density trend", &mut || trend(t5, &baseline, &mut blessed));
    record(6, "simplification trend", &mut || trend(t6, &baseline, &mut blessed));
    record(7, "stretch calibration protocol", &mut criterion_7);
    record(8, "bending harvest", &mut criterion_8);
    record(9, "compiler oracles", &mut criterion_9);
    record(10, "collision oracles", &mut criterion_10);
    record(11, "real-time ratio", &mut criterion_11);
    record(12, "determinism", &mut criterion_12);

    if std::env::var_os("PLANTSIM_BLESS").is_some() {
        let path = baseline_path();
        let text = format!("# parameter value tip_sag (branching scene)\n{}\n", blessed.join("\n"));
        std::fs::create_dir_all(path.parent().expect("baseline has a parent")).expect("create baseline dir");
        std::fs::write(&path, text).expect("write baseline");
        println!("wrote {}", path.display());
    }

    let failed: Vec<u32> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    println!("{} of {} criteria passed", results.len() - failed.len(), results.len());
    // The real-time ratio depends on the machine; it is reported but does
    // not fail the run.
    if failed.iter().any(|n| *n != 11) {
        std::process::exit(1);
    }
}
