//! Python bindings: load scenes, step simulations, run, sweep and bench.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use plantsim::fracture::{FractureEvent, FractureTrigger};
use plantsim::scene::{self, SceneConfig, SweepParameter};
use plantsim::Error;

create_exception!(plantsim, PlantsimError, PyException);
create_exception!(plantsim, ConfigError, PlantsimError);
create_exception!(plantsim, SimulationError, PlantsimError);
create_exception!(plantsim, DisconnectedPlantError, PlantsimError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::DisconnectedPlant { .. } => DisconnectedPlantError::new_err(msg),
        Error::NonFinite { .. } => SimulationError::new_err(msg),
        _ => ConfigError::new_err(msg),
    }
}

type Point = (f64, f64, f64);

fn point(v: &plantsim::math::Vec3) -> Point {
    (v.x, v.y, v.z)
}

/// A loaded and validated scene.
#[pyclass(name = "Scene", module = "plantsim", from_py_object)]
#[derive(Clone)]
struct PyScene {
    cfg: SceneConfig,
}

#[pymethods]
impl PyScene {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        scene::load_scene(&path).map(|cfg| PyScene { cfg }).map_err(to_py)
    }

    /// Simulated duration of a run, s.
    #[getter]
    fn duration(&self) -> f64 {
        self.cfg.duration()
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.cfg.solver_params().dt
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.cfg.warnings.clone()
    }

    /// Copy of the scene with one sweep parameter changed.
    fn with_value(&self, parameter: &str, value: f64) -> PyResult<Self> {
        let p: SweepParameter = parameter.parse().map_err(to_py)?;
        p.apply(&self.cfg, value).map(|cfg| PyScene { cfg }).map_err(to_py)
    }

    /// Copy of the scene with a different run duration.
    fn with_duration(&self, duration: f64) -> PyResult<Self> {
        let mut file = self.cfg.file.clone();
        file.run.duration = Some(duration);
        SceneConfig::from_file(file, &self.cfg.base_dir).map(|cfg| PyScene { cfg }).map_err(to_py)
    }

    fn to_toml(&self) -> PyResult<String> {
        self.cfg.to_toml().map_err(to_py)
    }
}

/// The compiled plant graph.
#[pyclass(name = "PlantGraph", module = "plantsim", get_all)]
struct PyPlantGraph {
    /// (x, y, z, radius) per node.
    nodes: Vec<(f64, f64, f64, f64)>,
    /// (parent, child, length) per edge.
    edges: Vec<(usize, usize, f64)>,
    root: usize,
}

#[pymethods]
impl PyPlantGraph {
    fn __len__(&self) -> usize {
        self.nodes.len()
    }
}

#[pyclass(name = "FractureEvent", module = "plantsim", get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyFractureEvent {
    time: f64,
    segment: usize,
    /// "stretch" or "bend".
    trigger: &'static str,
    magnitude: f64,
}

impl From<&FractureEvent> for PyFractureEvent {
    fn from(e: &FractureEvent) -> Self {
        let trigger = match e.trigger {
            FractureTrigger::Stretch => "stretch",
            FractureTrigger::Bend => "bend",
        };
        PyFractureEvent { time: e.time, segment: e.segment, trigger, magnitude: e.magnitude }
    }
}

#[pymethods]
impl PyFractureEvent {
    fn __repr__(&self) -> String {
        format!("FractureEvent(time={}, segment={}, trigger={:?}, magnitude={})", self.time, self.segment, self.trigger, self.magnitude)
    }
}

/// A simulation that can be stepped from Python.
#[pyclass(name = "Simulation", module = "plantsim", unsendable)]
struct PySimulation {
    sim: scene::Simulation,
}

#[pymethods]
impl PySimulation {
    #[new]
    fn new(scene: &PyScene) -> PyResult<Self> {
        scene::Simulation::new(&scene.cfg).map(|sim| PySimulation { sim }).map_err(to_py)
    }

    /// Advances `n` steps and returns the fracture events they produced.
    #[pyo3(signature = (n = 1))]
    fn step(&mut self, n: u64) -> PyResult<Vec<PyFractureEvent>> {
        let from = self.sim.events.len();
        for _ in 0..n {
            self.sim.step().map_err(to_py)?;
        }
        Ok(self.sim.events[from..].iter().map(PyFractureEvent::from).collect())
    }

    #[getter]
    fn time(&self) -> f64 {
        self.sim.state.time
    }

    #[getter]
    fn tip(&self) -> usize {
        self.sim.tip
    }

    #[getter]
    fn rod_count(&self) -> usize {
        self.sim.rod_count()
    }

    fn positions(&self) -> Vec<Point> {
        self.sim.state.particles.iter().map(|p| point(&p.position)).collect()
    }

    fn velocities(&self) -> Vec<Point> {
        self.sim.state.particles.iter().map(|p| point(&p.velocity)).collect()
    }

    /// Segment orientations as (w, x, y, z).
    fn rotations(&self) -> Vec<(f64, f64, f64, f64)> {
        self.sim.state.orientations.iter().map(|o| (o.rotation.w, o.rotation.i, o.rotation.j, o.rotation.k)).collect()
    }

    fn kinetic_energy(&self) -> f64 {
        self.sim.state.kinetic_energy()
    }

    fn events(&self) -> Vec<PyFractureEvent> {
        self.sim.events.iter().map(PyFractureEvent::from).collect()
    }
}

/// Frames, events and metrics of a finished run.
#[pyclass(name = "RunResult", module = "plantsim")]
struct PyRunResult {
    out: scene::RunOutput,
}

#[pymethods]
impl PyRunResult {
    #[getter]
    fn frame_count(&self) -> usize {
        self.out.frames.len()
    }

    fn positions(&self, frame: usize) -> PyResult<Vec<Point>> {
        let f = self
            .out
            .frames
            .get(frame)
            .ok_or_else(|| pyo3::exceptions::PyIndexError::new_err(format!("no frame {frame}")))?;
        Ok(f.positions.iter().map(point).collect())
    }

    #[getter]
    fn events(&self) -> Vec<PyFractureEvent> {
        self.out.events.iter().map(PyFractureEvent::from).collect()
    }

    #[getter]
    fn tip_sag(&self) -> Option<f64> {
        self.out.metrics.tip_sag
    }

    #[getter]
    fn detach_time(&self) -> Option<f64> {
        self.out.metrics.detach_time
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.out.metrics.node_count
    }

    #[getter]
    fn rod_count(&self) -> usize {
        self.out.metrics.rod_count
    }

    #[getter]
    fn output_dir(&self) -> Option<PathBuf> {
        self.out.dir.clone()
    }
}

#[pyclass(name = "SweepRow", module = "plantsim", get_all)]
struct PySweepRow {
    value: f64,
    tip_sag: Option<f64>,
    detach_time: Option<f64>,
    node_count: usize,
    rod_count: usize,
    fracture_count: usize,
}

#[pyclass(name = "BenchResult", module = "plantsim", get_all)]
struct PyBenchResult {
    rods: usize,
    particles: usize,
    steps: u64,
    simulated_seconds: f64,
    wall_seconds: f64,
    ratio: f64,
    hardware: String,
}

#[pyfunction]
fn load_scene(path: PathBuf) -> PyResult<PyScene> {
    PyScene::load(path)
}

/// Compiles the scene's plant without simulating it.
#[pyfunction]
fn compile(scene: &PyScene) -> PyResult<PyPlantGraph> {
    let g = scene::compile_scene(&scene.cfg).map_err(to_py)?.graph;
    Ok(PyPlantGraph {
        nodes: g.nodes.iter().map(|n| (n.position.x, n.position.y, n.position.z, n.radius)).collect(),
        edges: g.edges.iter().map(|e| (e.parent, e.child, e.length)).collect(),
        root: g.root,
    })
}

/// Runs a scene, writing its output files when `out_dir` is given.
#[pyfunction]
#[pyo3(signature = (scene, out_dir = None))]
fn run(py: Python<'_>, scene: &PyScene, out_dir: Option<PathBuf>) -> PyResult<PyRunResult> {
    let cfg = scene.cfg.clone();
    py.detach(move || scene::run(&cfg, out_dir.as_deref()))
        .map(|out| PyRunResult { out })
        .map_err(to_py)
}

/// Runs the scene once per value of `parameter`.
#[pyfunction]
#[pyo3(signature = (scene, parameter, values, out_dir = None))]
fn sweep(py: Python<'_>, scene: &PyScene, parameter: &str, values: Vec<f64>, out_dir: Option<PathBuf>) -> PyResult<Vec<PySweepRow>> {
    let p: SweepParameter = parameter.parse().map_err(to_py)?;
    let cfg = scene.cfg.clone();
    let result = py.detach(move || scene::sweep(&cfg, p, &values, out_dir.as_deref())).map_err(to_py)?;
    Ok(result
        .rows
        .into_iter()
        .map(|r| PySweepRow {
            value: r.value,
            tip_sag: r.tip_sag,
            detach_time: r.detach_time,
            node_count: r.node_count,
            rod_count: r.rod_count,
            fracture_count: r.fracture_count,
        })
        .collect())
}

/// Measures simulated seconds per wall-clock second over `window` seconds.
#[pyfunction]
#[pyo3(signature = (scene, window = scene::MIN_BENCH_WINDOW))]
fn bench(py: Python<'_>, scene: &PyScene, window: f64) -> PyResult<PyBenchResult> {
    let cfg = scene.cfg.clone();
    let b = py.detach(move || scene::bench(&cfg, window)).map_err(to_py)?;
    Ok(PyBenchResult {
        rods: b.rods,
        particles: b.particles,
        steps: b.steps,
        simulated_seconds: b.simulated_seconds,
        wall_seconds: b.wall_seconds,
        ratio: b.ratio,
        hardware: b.hardware,
    })
}

#[pymodule(name = "plantsim")]
mod plantsim_module {
    #[pymodule_export]
    use super::{
        bench, compile, load_scene, run, sweep, ConfigError, DisconnectedPlantError, PlantsimError, PyBenchResult,
        PyFractureEvent, PyPlantGraph, PyRunResult, PyScene, PySimulation, PySweepRow, SimulationError,
    };
}
