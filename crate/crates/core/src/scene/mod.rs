//! Scene files, runs, sweeps and benchmarks.

mod config;
mod files;
mod metrics;
mod run;

use std::path::PathBuf;

pub use config::{
    load_scene, CompilerOverrides, FractureSection, ObstacleSection, OutputSection, PlantFile, RunSection,
    SceneConfig, SceneFile, SegmentOverride, DEFAULT_QUIESCENCE_HORIZON, DENSITY_WARNING_BAND, YOUNG_MODULUS_RANGE,
};
pub use files::{
    read_events_csv, read_frames_binary, read_frames_csv, read_trajectory_csv, write_events_csv, write_frames_binary,
    write_frames_csv, write_graph_csv, write_trajectory_csv, Frame,
};
pub use metrics::{frame_energies, monotonicity, tip_sag, Metrics, Monotonicity, SagMeasurement, QUIESCENT_ENERGY, QUIESCENT_WINDOW};
pub use run::{
    bench, compile_scene, hardware_descriptor, read_metrics, run, step_count, sweep, BenchResult, RunOutput,
    Simulation, SweepParameter, SweepResult, SweepRow, MIN_BENCH_WINDOW,
};

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "PLANTSIM_OUT";

/// Output root from [`OUTPUT_ROOT_ENV`], or `./plantsim-out`.
pub fn default_output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("plantsim-out"))
}
