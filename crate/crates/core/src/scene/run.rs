use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::SceneConfig;
use super::files::{write_events_csv, write_frames_binary, write_frames_csv, Frame};
use super::metrics::{monotonicity, tip_sag, Metrics, Monotonicity};
use crate::collision::{CollisionParams, RigidObstacle};
use crate::compiler::{build_sim_state, compile_plant, CompiledPlant, LeafLibrary, PlantGraph};
use crate::error::{Error, Result};
use crate::fracture::{detach_time, FractureEvent, FracturePolicy};
use crate::solver::{SimState, Solver, SolverParams};

/// Compiles the scene's plant (sampling, joining, simplification, organs).
pub fn compile_scene(cfg: &SceneConfig) -> Result<CompiledPlant> {
    compile_plant(&cfg.plant.curve_set(), &cfg.compiler_params(), &cfg.plant.organs)
}

/// A compiled scene ready to be stepped.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub state: SimState,
    pub graph: PlantGraph,
    pub solver: Solver,
    pub params: SolverParams,
    pub collision: CollisionParams,
    pub fracture: FracturePolicy,
    pub obstacles: Vec<RigidObstacle>,
    /// Particle used for the sag metric.
    pub tip: usize,
    pub events: Vec<FractureEvent>,
    pub warnings: Vec<String>,
}

impl Simulation {
    pub fn new(cfg: &SceneConfig) -> Result<Self> {
        let compiled = compile_scene(cfg)?;
        let graph = compiled.graph;
        let mut pins = Vec::new();
        if cfg.file.pin_root {
            pins.push(graph.root);
        }
        for p in &cfg.file.pins {
            pins.extend(graph.nearest_node(p));
        }
        let mut state = build_sim_state(&graph, &cfg.material(), &pins, &LeafLibrary::builtin())?;
        let start = cfg.trajectory_start().min(0.0);
        state.time = start;
        let tip = match &cfg.file.tip {
            Some(p) => graph.nearest_node(p).unwrap_or(graph.root),
            None => farthest_node(&graph),
        };
        Ok(Simulation {
            state,
            graph,
            solver: Solver::new(),
            params: cfg.solver_params().clone(),
            collision: cfg.file.collision.clone(),
            fracture: cfg.fracture_policy(),
            obstacles: cfg.obstacles.clone(),
            tip,
            events: Vec::new(),
            warnings: compiled.warnings,
        })
    }

    /// Advances one step; returns the fracture events of that step.
    pub fn step(&mut self) -> Result<&[FractureEvent]> {
        let new = self
            .solver
            .step(&mut self.state, &self.params, &self.collision, &self.obstacles, &self.fracture)?;
        let from = self.events.len();
        self.events.extend(new);
        Ok(&self.events[from..])
    }

    /// Lumped particle masses (0 for pinned particles).
    pub fn masses(&self) -> Vec<f64> {
        (0..self.state.particles.len()).map(|i| self.state.mass(i)).collect()
    }

    pub fn rod_count(&self) -> usize {
        self.state.segments.len()
    }
}

/// Node with the greatest path distance from the root; ties go to the lower
/// index.
fn farthest_node(g: &PlantGraph) -> usize {
    let adj = g.adjacency();
    let mut dist = vec![f64::NAN; g.nodes.len()];
    dist[g.root] = 0.0;
    let mut stack = vec![g.root];
    while let Some(u) = stack.pop() {
        for &(v, len) in &adj[u] {
            if dist[v].is_nan() {
                dist[v] = dist[u] + len;
                stack.push(v);
            }
        }
    }
    let mut best = g.root;
    for (i, d) in dist.iter().enumerate() {
        if *d > dist[best] {
            best = i;
        }
    }
    best
}

/// Frames, fracture events and metrics of one run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub frames: Vec<Frame>,
    pub events: Vec<FractureEvent>,
    pub metrics: Metrics,
    pub dir: Option<PathBuf>,
}

/// Number of steps covering `duration`.
pub fn step_count(duration: f64, dt: f64) -> u64 {
    (duration / dt - 1e-9).ceil().max(0.0) as u64
}

/// Compiles the plant, steps to the end of the run and, with an output
/// directory, writes `frames.csv` (plus `frames.bin` if requested),
/// `events.csv` and `metrics.toml`. A non-finite state aborts the run after
/// the frames recorded so far are written.
pub fn run(cfg: &SceneConfig, out_dir: Option<&Path>) -> Result<RunOutput> {
    let mut sim = Simulation::new(cfg)?;
    let stride = cfg.file.output.stride as u64;
    let dt = sim.params.dt;
    let steps = step_count(cfg.duration(), dt);
    let detach_stop = cfg.file.run.stop_after_detach;

    let wall = Instant::now();
    let mut frames = vec![Frame::capture(&sim.state)];
    let mut done = 0u64;
    let mut stop_at: Option<u64> = None;
    let mut failure = None;
    for k in 1..=steps {
        if let Err(e) = sim.step() {
            failure = Some(e);
            break;
        }
        done = k;
        if k % stride == 0 {
            frames.push(Frame::capture(&sim.state));
        }
        if let (Some(extra), None, false) = (detach_stop, stop_at, sim.events.is_empty()) {
            stop_at = Some(k + step_count(extra, dt));
        }
        if stop_at.is_some_and(|s| k >= s) {
            break;
        }
    }
    let wall_time = wall.elapsed().as_secs_f64();

    let masses = sim.masses();
    let frame_dt = dt * stride as f64;
    let sag = tip_sag(&frames, &masses, frame_dt, sim.tip, cfg.file.run.quiescence_horizon);
    let simulated = done as f64 * dt;
    let metrics = Metrics {
        tip_node: sim.tip,
        tip_sag: sag.map(|s| s.sag),
        sag_time: sag.map(|s| s.time),
        quiescent: sag.is_some_and(|s| s.quiescent),
        detach_time: detach_time(&sim.events, cfg.trajectory_start()),
        fracture_count: sim.events.len(),
        node_count: sim.graph.nodes.len(),
        rod_count: sim.rod_count(),
        particle_count: sim.state.particles.len(),
        steps: done,
        frames: frames.len(),
        simulated_time: simulated,
        wall_time,
        wall_time_per_simulated_second: if simulated > 0.0 { wall_time / simulated } else { 0.0 },
    };
    let out = RunOutput { frames, events: sim.events, metrics, dir: out_dir.map(Path::to_path_buf) };
    if let Some(dir) = out_dir {
        write_run(dir, cfg, &out)?;
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn write_run(dir: &Path, cfg: &SceneConfig, out: &RunOutput) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_frames_csv(&dir.join("frames.csv"), &out.frames)?;
    if cfg.file.output.binary_frames {
        write_frames_binary(&dir.join("frames.bin"), &out.frames)?;
    }
    write_events_csv(&dir.join("events.csv"), &out.events)?;
    write_toml(&dir.join("metrics.toml"), &out.metrics)?;
    let scene = cfg.to_toml()?;
    let p = dir.join("scene.resolved.toml");
    std::fs::write(&p, scene).map_err(|e| Error::io(&p, e))
}

fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = toml::to_string(value).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_metrics(path: &Path) -> Result<Metrics> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    SigmaDistance,
    Stiffness,
    Density,
    CSMax,
    CBMax,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 5] = [
        SweepParameter::SigmaDistance,
        SweepParameter::Stiffness,
        SweepParameter::Density,
        SweepParameter::CSMax,
        SweepParameter::CBMax,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::SigmaDistance => "sigma_distance",
            SweepParameter::Stiffness => "stiffness",
            SweepParameter::Density => "density",
            SweepParameter::CSMax => "c_s_max",
            SweepParameter::CBMax => "c_b_max",
        }
    }

    /// Copy of `cfg` with this parameter set to `value`, revalidated.
    pub fn apply(&self, cfg: &SceneConfig, value: f64) -> Result<SceneConfig> {
        let mut file = cfg.file.clone();
        match self {
            SweepParameter::SigmaDistance => {
                let mut c = file.compiler.expect("filled in on load");
                c.sigma_distance = Some(value);
                file.compiler = Some(c);
            }
            SweepParameter::Stiffness => file.material.young_modulus = value,
            SweepParameter::Density => file.material.density = value,
            SweepParameter::CSMax => file.fracture.organ.c_s_max = value,
            SweepParameter::CBMax => file.fracture.organ.c_b_max = value,
        }
        SceneConfig::from_file(file, &cfg.base_dir)
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepParameter::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep parameter `{s}`")))
    }
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub tip_sag: Option<f64>,
    pub detach_time: Option<f64>,
    pub node_count: usize,
    pub rod_count: usize,
    pub fracture_count: usize,
    pub wall_time_per_simulated_second: f64,
}

impl SweepRow {
    fn new(value: f64, m: &Metrics) -> Self {
        SweepRow {
            value,
            tip_sag: m.tip_sag,
            detach_time: m.detach_time,
            node_count: m.node_count,
            rod_count: m.rod_count,
            fracture_count: m.fracture_count,
            wall_time_per_simulated_second: m.wall_time_per_simulated_second,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn verdicts(&self) -> Vec<(&'static str, Monotonicity)> {
        let col = |f: &dyn Fn(&SweepRow) -> Option<f64>| monotonicity(&self.rows.iter().map(f).collect::<Vec<_>>());
        vec![
            ("tip_sag", col(&|r| r.tip_sag)),
            ("detach_time", col(&|r| r.detach_time)),
            ("node_count", col(&|r| Some(r.node_count as f64))),
            ("rod_count", col(&|r| Some(r.rod_count as f64))),
        ]
    }

    pub fn summary(&self) -> String {
        let mut s = format!("sweep over {}\n", self.parameter);
        s.push_str(&format!(
            "{:>14} {:>14} {:>12} {:>7} {:>7} {:>9}\n",
            self.parameter.name(),
            "tip_sag",
            "detach_time",
            "nodes",
            "rods",
            "breaks"
        ));
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
        for r in &self.rows {
            s.push_str(&format!(
                "{:>14} {:>14} {:>12} {:>7} {:>7} {:>9}\n",
                r.value,
                opt(r.tip_sag),
                opt(r.detach_time),
                r.node_count,
                r.rod_count,
                r.fracture_count
            ));
        }
        for (name, v) in self.verdicts() {
            s.push_str(&format!("{name}: {v}\n"));
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut w = csv::Writer::from_path(dir.join("sweep.csv"))?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io(dir, e))?;
        let p = dir.join("summary.txt");
        std::fs::write(&p, self.summary()).map_err(|e| Error::io(&p, e))
    }
}

/// One run per value with an otherwise identical scene. Member runs go to
/// `run_<i>` under `out_dir`. If a run fails, the rows finished so far are
/// still written before the error is returned.
pub fn sweep(cfg: &SceneConfig, parameter: SweepParameter, values: &[f64], out_dir: Option<&Path>) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let mut result = SweepResult { parameter, rows: Vec::new() };
    for (i, &v) in values.iter().enumerate() {
        let outcome = parameter
            .apply(cfg, v)
            .and_then(|c| run(&c, out_dir.map(|d| d.join(format!("run_{i}"))).as_deref()));
        match outcome {
            Ok(out) => result.rows.push(SweepRow::new(v, &out.metrics)),
            Err(e) => {
                if let Some(d) = out_dir {
                    result.write(d)?;
                }
                return Err(e);
            }
        }
    }
    if let Some(d) = out_dir {
        result.write(d)?;
    }
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub rods: usize,
    pub particles: usize,
    pub steps: u64,
    pub simulated_seconds: f64,
    pub wall_seconds: f64,
    /// Simulated seconds per wall-clock second.
    pub ratio: f64,
    pub hardware: String,
}

pub const MIN_BENCH_WINDOW: f64 = 10.0;

/// Steps the scene for `window` simulated seconds (at least
/// [`MIN_BENCH_WINDOW`]) without recording frames.
pub fn bench(cfg: &SceneConfig, window: f64) -> Result<BenchResult> {
    let window = window.max(MIN_BENCH_WINDOW);
    let mut sim = Simulation::new(cfg)?;
    let steps = step_count(window, sim.params.dt);
    let start = Instant::now();
    for _ in 0..steps {
        sim.step()?;
    }
    let wall = start.elapsed().as_secs_f64();
    let simulated = steps as f64 * sim.params.dt;
    Ok(BenchResult {
        rods: sim.rod_count(),
        particles: sim.state.particles.len(),
        steps,
        simulated_seconds: simulated,
        wall_seconds: wall,
        ratio: if wall > 0.0 { simulated / wall } else { f64::INFINITY },
        hardware: hardware_descriptor(),
    })
}

/// CPU model, logical core count, OS and architecture.
pub fn hardware_descriptor() -> String {
    let cpuinfo = std::fs::read_to_string("/proc/cpuinfo").unwrap_or_default();
    let model = cpuinfo
        .lines()
        .find_map(|l| l.strip_prefix("model name").and_then(|r| r.split_once(':')).map(|(_, m)| m.trim().to_string()))
        .unwrap_or_else(|| "unknown CPU".to_string());
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    format!("{model}; {cores} logical core(s); {}-{}", std::env::consts::OS, std::env::consts::ARCH)
}
