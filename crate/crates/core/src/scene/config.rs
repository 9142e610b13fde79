//! Scene and plant files.
//!
//! Both are TOML. Unknown keys are rejected everywhere. Relative paths inside
//! a scene resolve against the scene file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::collision::{CollisionParams, GridSdf, Pose, PoseTrajectory, RigidObstacle, Sdf, SdfPrimitive};
use crate::compiler::{CompilerParams, Curve, CurveEnd, CurveSet, OrganSpec};
use crate::error::{Error, Result};
use crate::fracture::{BendMeasure, FracturePolicy, FractureThresholds};
use crate::math::{Quat, Vec3};
use crate::rod::Material;
use crate::solver::SolverParams;

use super::files::read_trajectory_csv;

/// Young's modulus range accepted by the loader, Pa.
pub const YOUNG_MODULUS_RANGE: (f64, f64) = (1e5, 1e11);
/// Densities outside this band load with a warning, kg/m³.
pub const DENSITY_WARNING_BAND: (f64, f64) = (100.0, 1500.0);
/// Default horizon for quiescence detection, s.
pub const DEFAULT_QUIESCENCE_HORIZON: f64 = 5.0;

fn default_step() -> f64 {
    0.005
}
fn default_sigma_connect() -> f64 {
    0.02
}
fn default_sigma_distance() -> f64 {
    0.02
}

/// Plant description: drawn curves, joining and simplification parameters,
/// and organs placed by position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantFile {
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_sigma_connect")]
    pub sigma_connect: f64,
    #[serde(default = "default_sigma_distance")]
    pub sigma_distance: f64,
    #[serde(default)]
    pub root_curve: usize,
    #[serde(default)]
    pub root_end: CurveEnd,
    pub curves: Vec<Curve>,
    #[serde(default)]
    pub organs: Vec<OrganSpec>,
}

impl PlantFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let f: PlantFile = toml::from_str(text).map_err(|e| parse_error(path, e))?;
        f.curve_set().validate()?;
        Ok(f)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn curve_set(&self) -> CurveSet {
        CurveSet { curves: self.curves.clone(), root_curve: self.root_curve, root_end: self.root_end }
    }

    pub fn compiler_params(&self) -> CompilerParams {
        CompilerParams { step: self.step, sigma_connect: self.sigma_connect, sigma_distance: self.sigma_distance }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize plant: {e}")))
    }
}

fn parse_error(path: &Path, e: toml::de::Error) -> Error {
    Error::Parse { path: path.to_path_buf(), message: e.to_string().trim_end().to_string() }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompilerOverrides {
    pub step: Option<f64>,
    pub sigma_connect: Option<f64>,
    pub sigma_distance: Option<f64>,
}

fn default_material() -> Material {
    Material { young_modulus: 2e7, poisson_ratio: 0.3, density: 300.0 }
}

fn yes() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentOverride {
    pub segment: usize,
    pub c_s_max: f64,
    pub c_b_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FractureSection {
    pub enabled: bool,
    pub bend_measure: BendMeasure,
    /// Pedicel thresholds.
    pub organ: FractureThresholds,
    /// Branch and leaf thresholds.
    pub structural: FractureThresholds,
    pub overrides: Vec<SegmentOverride>,
}

impl Default for FractureSection {
    fn default() -> Self {
        let p = FracturePolicy::default();
        FractureSection {
            enabled: p.enabled,
            bend_measure: p.bend_measure,
            organ: p.organ,
            structural: p.structural,
            overrides: Vec::new(),
        }
    }
}

impl FractureSection {
    pub fn policy(&self) -> FracturePolicy {
        FracturePolicy {
            enabled: self.enabled,
            organ: self.organ,
            structural: self.structural,
            overrides: self
                .overrides
                .iter()
                .map(|o| (o.segment, FractureThresholds { c_s_max: o.c_s_max, c_b_max: o.c_b_max }))
                .collect::<BTreeMap<_, _>>(),
            bend_measure: self.bend_measure,
        }
    }
}

fn identity_wxyz() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSection {
    pub name: String,
    /// Pose trajectory CSV; without one the obstacle stays at
    /// `position`/`rotation`.
    #[serde(default)]
    pub trajectory: Option<PathBuf>,
    #[serde(default)]
    pub position: Vec3,
    /// Unit quaternion as `[w, x, y, z]`.
    #[serde(default = "identity_wxyz")]
    pub rotation: [f64; 4],
    #[serde(default)]
    pub primitives: Vec<SdfPrimitive>,
    /// Grid SDF files, text or binary.
    #[serde(default)]
    pub grids: Vec<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// Simulated seconds; defaults to the latest trajectory end, or the
    /// quiescence horizon when there is no trajectory.
    pub duration: Option<f64>,
    pub quiescence_horizon: f64,
    /// Stop this many seconds after the first fracture.
    pub stop_after_detach: Option<f64>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { duration: None, quiescence_horizon: DEFAULT_QUIESCENCE_HORIZON, stop_after_detach: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Write every n-th step as a frame.
    pub stride: u32,
    /// Also write `frames.bin`.
    pub binary_frames: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { stride: 1, binary_frames: false }
    }
}

/// On-disk scene. After loading, every optional section is filled in, so
/// serializing a loaded scene gives its canonical form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub plant: PathBuf,
    #[serde(default = "default_material")]
    pub material: Material,
    #[serde(default)]
    pub compiler: Option<CompilerOverrides>,
    #[serde(default)]
    pub solver: SolverParams,
    #[serde(default)]
    pub collision: CollisionParams,
    #[serde(default)]
    pub fracture: FractureSection,
    /// Pin the root node (position and orientation).
    #[serde(default = "yes")]
    pub pin_root: bool,
    /// Extra pinned nodes, by position (nearest node).
    #[serde(default)]
    pub pins: Vec<Vec3>,
    /// Node whose drop is reported as tip sag, by position.
    #[serde(default)]
    pub tip: Option<Vec3>,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSection>,
}

/// A validated scene with its plant and obstacle resources loaded.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneConfig {
    pub file: SceneFile,
    pub base_dir: PathBuf,
    pub plant: PlantFile,
    pub obstacles: Vec<RigidObstacle>,
    pub warnings: Vec<String>,
}

impl SceneConfig {
    pub fn compiler_params(&self) -> CompilerParams {
        let o = self.file.compiler.expect("filled in on load");
        CompilerParams {
            step: o.step.unwrap_or(self.plant.step),
            sigma_connect: o.sigma_connect.unwrap_or(self.plant.sigma_connect),
            sigma_distance: o.sigma_distance.unwrap_or(self.plant.sigma_distance),
        }
    }

    pub fn material(&self) -> Material {
        self.file.material
    }

    pub fn solver_params(&self) -> &SolverParams {
        &self.file.solver
    }

    pub fn fracture_policy(&self) -> FracturePolicy {
        self.file.fracture.policy()
    }

    /// Earliest start of any obstacle trajectory (0 without trajectories).
    pub fn trajectory_start(&self) -> f64 {
        self.file
            .obstacles
            .iter()
            .zip(&self.obstacles)
            .filter(|(s, _)| s.trajectory.is_some())
            .map(|(_, o)| o.trajectory.start())
            .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.min(t))))
            .unwrap_or(0.0)
    }

    /// Simulated duration of a run.
    pub fn duration(&self) -> f64 {
        if let Some(d) = self.file.run.duration {
            return d;
        }
        self.file
            .obstacles
            .iter()
            .zip(&self.obstacles)
            .filter(|(s, _)| s.trajectory.is_some())
            .map(|(_, o)| o.trajectory.end())
            .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))))
            .unwrap_or(self.file.run.quiescence_horizon)
    }

    /// Canonical TOML text of the scene.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.file).map_err(|e| Error::Config(format!("cannot serialize scene: {e}")))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Validates a scene file and loads the resources it references.
    pub fn from_file(mut file: SceneFile, base_dir: &Path) -> Result<Self> {
        let mut warnings = Vec::new();
        validate_material(&file.material, &mut warnings)?;
        file.solver.validate()?;
        validate_collision(&file.collision)?;
        for t in [file.fracture.organ, file.fracture.structural] {
            t.validate()?;
        }
        for o in &file.fracture.overrides {
            FractureThresholds { c_s_max: o.c_s_max, c_b_max: o.c_b_max }.validate()?;
        }
        if file.output.stride < 1 {
            return Err(Error::Config("output.stride must be >= 1".into()));
        }
        if let Some(d) = file.run.duration {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::Config(format!("run.duration must be >= 0, got {d}")));
            }
        }
        if !(file.run.quiescence_horizon > 0.0) {
            return Err(Error::Config("run.quiescence_horizon must be > 0".into()));
        }
        if let Some(s) = file.run.stop_after_detach {
            if !(s >= 0.0) {
                return Err(Error::Config("run.stop_after_detach must be >= 0".into()));
            }
        }

        let plant_path = join(base_dir, &file.plant);
        let plant = PlantFile::load(&plant_path)?;
        let o = file.compiler.unwrap_or(CompilerOverrides { step: None, sigma_connect: None, sigma_distance: None });
        let filled = CompilerOverrides {
            step: Some(o.step.unwrap_or(plant.step)),
            sigma_connect: Some(o.sigma_connect.unwrap_or(plant.sigma_connect)),
            sigma_distance: Some(o.sigma_distance.unwrap_or(plant.sigma_distance)),
        };
        file.compiler = Some(filled);

        let mut obstacles = Vec::with_capacity(file.obstacles.len());
        for section in &file.obstacles {
            obstacles.push(load_obstacle(section, base_dir)?);
        }
        let cfg = SceneConfig { file, base_dir: base_dir.to_path_buf(), plant, obstacles, warnings };
        cfg.compiler_params().validate()?;
        for w in &cfg.warnings {
            log::warn!("{w}");
        }
        Ok(cfg)
    }
}

fn join(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn validate_material(m: &Material, warnings: &mut Vec<String>) -> Result<()> {
    m.validate()?;
    let (lo, hi) = YOUNG_MODULUS_RANGE;
    if !(lo..=hi).contains(&m.young_modulus) {
        return Err(Error::Config(format!(
            "material.young_modulus {} Pa is outside the supported range [{lo:e}, {hi:e}]",
            m.young_modulus
        )));
    }
    let (lo, hi) = DENSITY_WARNING_BAND;
    if !(lo..=hi).contains(&m.density) {
        warnings.push(format!(
            "material.density {} kg/m3 is outside the usual plant range [{lo}, {hi}]",
            m.density
        ));
    }
    Ok(())
}

fn validate_collision(c: &CollisionParams) -> Result<()> {
    if !(c.obstacle_slack >= 0.0) {
        return Err(Error::Config("collision.obstacle_slack must be >= 0".into()));
    }
    if !(c.capsule_sample_fraction > 0.0) {
        return Err(Error::Config("collision.capsule_sample_fraction must be > 0".into()));
    }
    Ok(())
}

fn load_obstacle(s: &ObstacleSection, base: &Path) -> Result<RigidObstacle> {
    if s.primitives.is_empty() && s.grids.is_empty() {
        return Err(Error::Config(format!("obstacle `{}` has no primitives or grids", s.name)));
    }
    for p in &s.primitives {
        p.validate()?;
    }
    let grids = s
        .grids
        .iter()
        .map(|g| GridSdf::load(&join(base, g)))
        .collect::<Result<Vec<_>>>()?;
    let [w, x, y, z] = s.rotation;
    let q = Quat::new(w, x, y, z);
    if !(q.norm() > 0.0) {
        return Err(Error::Config(format!("obstacle `{}` rotation is zero", s.name)));
    }
    let trajectory = match &s.trajectory {
        Some(p) => read_trajectory_csv(&join(base, p))?,
        None => PoseTrajectory::stationary(Pose { position: s.position, rotation: crate::math::normalized(q) }),
    };
    Ok(RigidObstacle { name: s.name.clone(), sdf: Sdf { primitives: s.primitives.clone(), grids }, trajectory })
}

/// Reads, validates and resolves a scene file.
pub fn load_scene(path: &Path) -> Result<SceneConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: SceneFile = toml::from_str(&text).map_err(|e| parse_error(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    SceneConfig::from_file(file, &base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    const PLANT: &str = r#"
sigma_distance = 0.02
[[curves]]
points = [[0.0, 0.0, 0.0], [0.3, 0.0, 0.0]]
radii = [0.005]
"#;

    #[test]
    fn minimal_scene_gets_defaults() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "plant.toml", PLANT);
        let cfg = load_scene(&write(dir.path(), "scene.toml", "plant = \"plant.toml\"\n")).unwrap();
        assert_eq!(cfg.material(), Material { young_modulus: 2e7, poisson_ratio: 0.3, density: 300.0 });
        assert_eq!(cfg.solver_params(), &SolverParams::default());
        assert_eq!(cfg.compiler_params(), CompilerParams { step: 0.005, sigma_connect: 0.02, sigma_distance: 0.02 });
        assert_eq!(cfg.duration(), 5.0);
        assert!(cfg.file.pin_root);
        assert!(cfg.warnings.is_empty());
    }

    #[test]
    fn canonical_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "plant.toml", PLANT);
        write(dir.path(), "traj.csv", "t,x,y,z,qw,qx,qy,qz\n0,0,0,0,1,0,0,0\n1,0,0,0.1,1,0,0,0\n");
        let scene = r#"
plant = "plant.toml"
tip = [0.3, 0.0, 0.0]
[material]
young_modulus = 3e7
density = 600
[[obstacles]]
name = "gripper"
trajectory = "traj.csv"
primitives = [{ type = "box", center = [0.0, 0.0, 0.0], half_extents = [0.01, 0.02, 0.03] }]
"#;
        let cfg = load_scene(&write(dir.path(), "scene.toml", scene)).unwrap();
        let text = cfg.to_toml().unwrap();
        let again = load_scene(&write(dir.path(), "again.toml", &text)).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(text, again.to_toml().unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "plant.toml", PLANT);
        let neg = write(dir.path(), "neg.toml", "plant = \"plant.toml\"\n[material]\nyoung_modulus = 2e7\ndensity = -1.0\n");
        assert!(matches!(load_scene(&neg), Err(Error::Config(_))));
        let typo = write(dir.path(), "typo.toml", "plant = \"plant.toml\"\n[solver]\nsubstep = 3\n");
        match load_scene(&typo) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("substep"), "{message}"),
            other => panic!("{other:?}"),
        }
        let soft = write(dir.path(), "soft.toml", "plant = \"plant.toml\"\n[material]\nyoung_modulus = 10.0\ndensity = 300.0\n");
        assert!(load_scene(&soft).is_err());
        let missing = write(dir.path(), "missing.toml", "plant = \"nope.toml\"\n");
        assert!(matches!(load_scene(&missing), Err(Error::Io { .. })));
        let light = write(dir.path(), "light.toml", "plant = \"plant.toml\"\n[material]\nyoung_modulus = 2e7\ndensity = 50.0\n");
        assert_eq!(load_scene(&light).unwrap().warnings.len(), 1);
    }
}
