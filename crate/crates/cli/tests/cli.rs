use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenes() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

fn plantsim(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plantsim"))
        .args(args)
        .env("PLANTSIM_OUT", out)
        .output()
        .expect("run plantsim")
}

const BEAM: &str = "[[curves]]\npoints = [[0.0, 0.0, 0.0], [0.2, 0.0, 0.0]]\nradii = [0.005]\n";

#[test]
fn validate_succeeds_on_bundled_scene() {
    let out = tempfile::tempdir().unwrap();
    let scene = scenes().join("cantilever/scene.toml");
    let o = plantsim(out.path(), &["validate", scene.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn run_writes_into_output_root_from_env() {
    let out = tempfile::tempdir().unwrap();
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("plant.toml"), BEAM).unwrap();
    let scene = dir.path().join("beam.toml");
    std::fs::write(&scene, "plant = \"plant.toml\"\n[run]\nduration = 0.05\n").unwrap();
    let o = plantsim(out.path(), &["run", scene.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["frames.csv", "events.csv", "metrics.toml"] {
        assert!(out.path().join("beam").join(f).exists(), "{f}");
    }
}

#[test]
fn config_errors_exit_2() {
    let out = tempfile::tempdir().unwrap();
    let o = plantsim(out.path(), &["run", "/nonexistent/scene.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let scene = scenes().join("cantilever/scene.toml");
    let o = plantsim(out.path(), &["sweep", scene.to_str().unwrap(), "--param", "colour", "--values", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = plantsim(out.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn blown_up_simulation_exits_3() {
    // Gravity this large overflows the velocities within the first step.
    let out = tempfile::tempdir().unwrap();
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("plant.toml"), BEAM).unwrap();
    let scene = dir.path().join("scene.toml");
    std::fs::write(&scene, "plant = \"plant.toml\"\n[solver]\ndt = 10.0\ngravity = [0.0, 0.0, -1e308]\n[fracture]\nenabled = false\n[run]\nduration = 100.0\n").unwrap();
    let o = plantsim(out.path(), &["run", scene.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn disconnected_plant_exits_4() {
    let out = tempfile::tempdir().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let plant = format!("{BEAM}\n[[curves]]\npoints = [[1.0, 1.0, 1.0], [1.2, 1.0, 1.0]]\nradii = [0.005]\n");
    std::fs::write(dir.path().join("plant.toml"), plant).unwrap();
    let scene = dir.path().join("scene.toml");
    std::fs::write(&scene, "plant = \"plant.toml\"\n").unwrap();
    let o = plantsim(out.path(), &["validate", scene.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    let o = plantsim(out.path(), &["compile", dir.path().join("plant.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}
