//! Signed distance fields for the scripted end-effector.
//!
//! An obstacle's field is the union (pointwise minimum) of analytic primitives
//! and sampled grids, all expressed in the obstacle's local frame. The local
//! frame follows a time-parameterized pose trajectory.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::geometry::{closest_segment_params, Aabb};
use crate::error::{Error, Result};
use crate::math::{rotate, rotate_inverse, slerp, Quat, Vec3, IDENTITY};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SdfPrimitive {
    Sphere { center: Vec3, radius: f64 },
    Capsule { a: Vec3, b: Vec3, radius: f64 },
    /// Axis-aligned in the obstacle frame.
    Box { center: Vec3, half_extents: Vec3 },
}

impl SdfPrimitive {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            SdfPrimitive::Sphere { radius, .. } | SdfPrimitive::Capsule { radius, .. } => *radius > 0.0,
            SdfPrimitive::Box { half_extents, .. } => half_extents.iter().all(|h| *h > 0.0),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("SDF primitive has non-positive size: {self:?}")))
        }
    }

    /// Signed distance and outward unit normal at a local point.
    pub fn query(&self, p: &Vec3) -> (f64, Vec3) {
        match self {
            SdfPrimitive::Sphere { center, radius } => {
                let d = p - center;
                let n = d.norm();
                (n - radius, if n > 0.0 { d / n } else { Vec3::z() })
            }
            SdfPrimitive::Capsule { a, b, radius } => {
                let (t, _) = closest_segment_params(a, b, p, p);
                let c = a + (b - a) * t;
                let d = p - c;
                let n = d.norm();
                (n - radius, if n > 0.0 { d / n } else { Vec3::z() })
            }
            SdfPrimitive::Box { center, half_extents } => box_sdf(&(p - center), half_extents),
        }
    }

    pub fn local_aabb(&self) -> Aabb {
        match self {
            SdfPrimitive::Sphere { center, radius } => {
                Aabb { min: center.add_scalar(-radius), max: center.add_scalar(*radius) }
            }
            SdfPrimitive::Capsule { a, b, radius } => {
                Aabb { min: a.inf(b).add_scalar(-radius), max: a.sup(b).add_scalar(*radius) }
            }
            SdfPrimitive::Box { center, half_extents } => {
                Aabb { min: center - half_extents, max: center + half_extents }
            }
        }
    }
}

fn box_sdf(p: &Vec3, h: &Vec3) -> (f64, Vec3) {
    let q = p.abs() - h;
    let outside = q.sup(&Vec3::zeros());
    let out_len = outside.norm();
    if out_len > 0.0 {
        let n = Vec3::from_fn(|k, _| outside[k].copysign(p[k])) / out_len;
        return (out_len, n);
    }
    let mut axis = 0;
    for k in 1..3 {
        if q[k] > q[axis] {
            axis = k;
        }
    }
    let mut n = Vec3::zeros();
    n[axis] = 1.0f64.copysign(p[axis]);
    (q[axis], n)
}

/// Regular grid of signed distance samples; sample `(i, j, k)` sits at
/// `origin + spacing·(i, j, k)` and is stored at `i + nx·(j + ny·k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSdf {
    pub origin: Vec3,
    pub spacing: f64,
    pub dims: [usize; 3],
    pub values: Vec<f64>,
}

const GRID_TEXT_MAGIC: &str = "plantsim-sdf";
const GRID_BINARY_MAGIC: &[u8; 4] = b"PSDF";
const GRID_VERSION: u32 = 1;

impl GridSdf {
    pub fn new(origin: Vec3, spacing: f64, dims: [usize; 3], values: Vec<f64>) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::Config(format!("grid spacing must be > 0, got {spacing}")));
        }
        if dims.iter().any(|d| *d < 2) {
            return Err(Error::Config(format!("grid dims must be >= 2 per axis, got {dims:?}")));
        }
        if values.len() != dims[0] * dims[1] * dims[2] {
            return Err(Error::Config(format!(
                "grid has {} samples, dims {:?} need {}",
                values.len(),
                dims,
                dims[0] * dims[1] * dims[2]
            )));
        }
        Ok(GridSdf { origin, spacing, dims, values })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(origin: Vec3, spacing: f64, dims: [usize; 3], f: impl Fn(&Vec3) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    let p = origin + Vec3::new(i as f64, j as f64, k as f64) * spacing;
                    values.push(f(&p));
                }
            }
        }
        GridSdf::new(origin, spacing, dims, values)
    }

    #[inline]
    fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[i + self.dims[0] * (j + self.dims[1] * k)]
    }

    pub fn bounds(&self) -> Aabb {
        let ext = Vec3::new(
            (self.dims[0] - 1) as f64,
            (self.dims[1] - 1) as f64,
            (self.dims[2] - 1) as f64,
        ) * self.spacing;
        Aabb { min: self.origin, max: self.origin + ext }
    }

    /// Trilinear interpolation; `p` is clamped into the grid box.
    pub fn interpolate(&self, p: &Vec3) -> f64 {
        let mut idx = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..3 {
            let x = ((p[a] - self.origin[a]) / self.spacing).clamp(0.0, (self.dims[a] - 1) as f64);
            let i = (x.floor() as usize).min(self.dims[a] - 2);
            idx[a] = i;
            frac[a] = x - i as f64;
        }
        let [i, j, k] = idx;
        let [fx, fy, fz] = frac;
        let c00 = self.at(i, j, k) * (1.0 - fx) + self.at(i + 1, j, k) * fx;
        let c10 = self.at(i, j + 1, k) * (1.0 - fx) + self.at(i + 1, j + 1, k) * fx;
        let c01 = self.at(i, j, k + 1) * (1.0 - fx) + self.at(i + 1, j, k + 1) * fx;
        let c11 = self.at(i, j + 1, k + 1) * (1.0 - fx) + self.at(i + 1, j + 1, k + 1) * fx;
        let c0 = c00 * (1.0 - fy) + c10 * fy;
        let c1 = c01 * (1.0 - fy) + c11 * fy;
        c0 * (1.0 - fz) + c1 * fz
    }

    /// Distance and normal. Inside the box the normal is the central
    /// difference gradient with step half the spacing; outside, the distance
    /// is the distance to the box plus the field at the nearest box point and
    /// the normal points away from the box.
    pub fn query(&self, p: &Vec3) -> (f64, Vec3) {
        let b = self.bounds();
        let clamped = p.sup(&b.min).inf(&b.max);
        let out = p - clamped;
        let out_len = out.norm();
        if out_len > 0.0 {
            return (out_len + self.interpolate(&clamped), out / out_len);
        }
        let h = 0.5 * self.spacing;
        let grad = Vec3::from_fn(|a, _| {
            let mut lo = *p;
            let mut hi = *p;
            lo[a] -= h;
            hi[a] += h;
            (self.interpolate(&hi) - self.interpolate(&lo)) / (2.0 * h)
        });
        let n = grad.norm();
        (self.interpolate(p), if n > 0.0 { grad / n } else { Vec3::z() })
    }

    /// Lowest sample on the grid's boundary faces.
    pub fn boundary_min(&self) -> f64 {
        let [nx, ny, nz] = self.dims;
        let mut m = f64::INFINITY;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    if i == 0 || j == 0 || k == 0 || i == nx - 1 || j == ny - 1 || k == nz - 1 {
                        m = m.min(self.at(i, j, k));
                    }
                }
            }
        }
        m
    }

    pub fn write_text(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let o = self.origin;
        let res: std::io::Result<()> = (|| {
            writeln!(w, "{GRID_TEXT_MAGIC} {GRID_VERSION}")?;
            writeln!(w, "origin {:?} {:?} {:?}", o.x, o.y, o.z)?;
            writeln!(w, "spacing {:?}", self.spacing)?;
            writeln!(w, "dims {} {} {}", self.dims[0], self.dims[1], self.dims[2])?;
            for row in self.values.chunks(self.dims[0]) {
                let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
                writeln!(w, "{}", line.join(" "))?;
            }
            w.flush()
        })();
        res.map_err(|e| Error::io(path, e))
    }

    /// Binary layout, all little-endian: `PSDF`, u32 version, 3×f64 origin,
    /// f64 spacing, 3×u32 dims, then f64 samples in storage order.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(48 + 8 * self.values.len());
        buf.extend_from_slice(GRID_BINARY_MAGIC);
        buf.extend_from_slice(&GRID_VERSION.to_le_bytes());
        for a in 0..3 {
            buf.extend_from_slice(&self.origin[a].to_le_bytes());
        }
        buf.extend_from_slice(&self.spacing.to_le_bytes());
        for d in self.dims {
            buf.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    /// Loads either file variant, detected by its leading magic.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.starts_with(GRID_BINARY_MAGIC) {
            Self::parse_binary(&bytes).map_err(|m| Error::Parse { path: path.into(), message: m })
        } else {
            Self::parse_text(&bytes[..]).map_err(|m| Error::Parse { path: path.into(), message: m })
        }
    }

    fn parse_binary(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut r = bytes;
        let mut take = |n: usize| -> std::result::Result<&[u8], String> {
            if r.len() < n {
                return Err("truncated binary grid".into());
            }
            let (head, tail) = r.split_at(n);
            r = tail;
            Ok(head)
        };
        take(4)?;
        let version = u32::from_le_bytes(take(4)?.try_into().unwrap());
        if version != GRID_VERSION {
            return Err(format!("unsupported grid version {version}"));
        }
        let mut f = || -> std::result::Result<f64, String> { Ok(f64::from_le_bytes(take(8)?.try_into().unwrap())) };
        let origin = Vec3::new(f()?, f()?, f()?);
        let spacing = f()?;
        let mut dims = [0usize; 3];
        for d in dims.iter_mut() {
            *d = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
        }
        let n = dims.iter().product::<usize>();
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(f64::from_le_bytes(take(8)?.try_into().unwrap()));
        }
        if !r.is_empty() {
            return Err("trailing bytes after grid samples".into());
        }
        GridSdf::new(origin, spacing, dims, values).map_err(|e| e.to_string())
    }

    fn parse_text(input: impl Read) -> std::result::Result<Self, String> {
        let reader = BufReader::new(input);
        let mut lines = reader.lines().enumerate();
        let mut header = |key: &str, count: usize| -> std::result::Result<Vec<String>, String> {
            loop {
                let (no, line) = lines.next().ok_or_else(|| format!("missing `{key}` header"))?;
                let line = line.map_err(|e| e.to_string())?;
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let mut parts = line.split_whitespace();
                let k = parts.next().unwrap_or_default();
                if k != key {
                    return Err(format!("line {}: expected `{key}`, found `{k}`", no + 1));
                }
                let rest: Vec<String> = parts.map(str::to_owned).collect();
                if rest.len() != count {
                    return Err(format!("line {}: `{key}` takes {count} value(s)", no + 1));
                }
                return Ok(rest);
            }
        };
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}"));
        let version = header(GRID_TEXT_MAGIC, 1)?;
        if version[0] != GRID_VERSION.to_string() {
            return Err(format!("unsupported grid version {}", version[0]));
        }
        let o = header("origin", 3)?;
        let origin = Vec3::new(num(&o[0])?, num(&o[1])?, num(&o[2])?);
        let spacing = num(&header("spacing", 1)?[0])?;
        let d = header("dims", 3)?;
        let mut dims = [0usize; 3];
        for (slot, s) in dims.iter_mut().zip(&d) {
            *slot = s.parse().map_err(|e| format!("bad dim `{s}`: {e}"))?;
        }
        let mut values = Vec::new();
        for (no, line) in lines {
            let line = line.map_err(|e| e.to_string())?;
            let line = line.trim();
            if line.starts_with('#') {
                continue;
            }
            for tok in line.split_whitespace() {
                values.push(num(tok).map_err(|e| format!("line {}: {e}", no + 1))?);
            }
        }
        GridSdf::new(origin, spacing, dims, values).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sdf {
    pub primitives: Vec<SdfPrimitive>,
    pub grids: Vec<GridSdf>,
}

impl Sdf {
    pub fn query_local(&self, p: &Vec3) -> (f64, Vec3) {
        let mut best = (f64::INFINITY, Vec3::z());
        let candidates = self
            .primitives
            .iter()
            .map(|s| s.query(p))
            .chain(self.grids.iter().map(|g| g.query(p)));
        for (d, n) in candidates {
            if d < best.0 {
                best = (d, n);
            }
        }
        best
    }

    /// Local-frame sphere outside of which every point has positive distance.
    pub fn bounding_sphere(&self) -> Option<(Vec3, f64)> {
        let mut boxes: Vec<(Aabb, f64)> = self.primitives.iter().map(|p| (p.local_aabb(), 0.0)).collect();
        boxes.extend(self.grids.iter().map(|g| (g.bounds(), (-g.boundary_min()).max(0.0))));
        let first = boxes.first()?;
        let mut min = first.0.min;
        let mut max = first.0.max;
        let mut pad: f64 = 0.0;
        for (b, p) in &boxes {
            min = min.inf(&b.min);
            max = max.sup(&b.max);
            pad = pad.max(*p);
        }
        let center = (min + max) * 0.5;
        Some((center, (max - center).norm() + pad))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub position: Vec3,
    pub rotation: Quat,
}

impl Pose {
    pub const IDENTITY: Pose = Pose { position: Vec3::new(0.0, 0.0, 0.0), rotation: IDENTITY };

    pub fn to_local(&self, world: &Vec3) -> Vec3 {
        rotate_inverse(&self.rotation, &(world - self.position))
    }

    pub fn to_world(&self, local: &Vec3) -> Vec3 {
        rotate(&self.rotation, local) + self.position
    }

    pub fn direction_to_world(&self, local: &Vec3) -> Vec3 {
        rotate(&self.rotation, local)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoseSample {
    pub t: f64,
    pub pose: Pose,
}

/// Time-sorted poses, interpolated linearly in position and by slerp in
/// rotation.
#[derive(Clone, Debug, PartialEq)]
pub struct PoseTrajectory {
    samples: Vec<PoseSample>,
}

impl PoseTrajectory {
    pub fn new(samples: Vec<PoseSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Config("trajectory needs at least one pose".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::Config(format!(
                    "trajectory times must be strictly increasing ({} then {})",
                    w[0].t, w[1].t
                )));
            }
        }
        let samples = samples
            .into_iter()
            .map(|s| PoseSample { t: s.t, pose: Pose { position: s.pose.position, rotation: crate::math::normalized(s.pose.rotation) } })
            .collect();
        Ok(PoseTrajectory { samples })
    }

    pub fn stationary(pose: Pose) -> Self {
        PoseTrajectory { samples: vec![PoseSample { t: 0.0, pose }] }
    }

    pub fn samples(&self) -> &[PoseSample] {
        &self.samples
    }

    pub fn start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    /// Interpolated pose and whether `t` had to be clamped into the span.
    pub fn pose_at(&self, t: f64) -> (Pose, bool) {
        let s = &self.samples;
        if s.len() == 1 {
            return (s[0].pose, false);
        }
        if t <= s[0].t {
            return (s[0].pose, t < s[0].t);
        }
        if t >= s[s.len() - 1].t {
            return (s[s.len() - 1].pose, t > s[s.len() - 1].t);
        }
        let hi = s.partition_point(|p| p.t <= t);
        let (a, b) = (&s[hi - 1], &s[hi]);
        let u = (t - a.t) / (b.t - a.t);
        let pose = Pose {
            position: a.pose.position + (b.pose.position - a.pose.position) * u,
            rotation: slerp(&a.pose.rotation, &b.pose.rotation, u),
        };
        (pose, false)
    }
}

/// The scripted end-effector: one-way coupled, never moved by the plant.
#[derive(Clone, Debug, PartialEq)]
pub struct RigidObstacle {
    pub name: String,
    pub sdf: Sdf,
    pub trajectory: PoseTrajectory,
}

impl RigidObstacle {
    pub fn pose_at(&self, t: f64) -> Pose {
        self.trajectory.pose_at(t).0
    }
}

/// Signed distance and world-frame normal of `obstacle` at `world_point`,
/// time `t`.
pub fn sdf_query(obstacle: &RigidObstacle, world_point: &Vec3, t: f64) -> (f64, Vec3) {
    let (pose, clamped) = obstacle.trajectory.pose_at(t);
    if clamped {
        log::warn!(
            "obstacle `{}` queried at t = {t} outside its trajectory [{}, {}]; pose clamped",
            obstacle.name,
            obstacle.trajectory.start(),
            obstacle.trajectory.end()
        );
    }
    query_at_pose(obstacle, &pose, world_point)
}

pub(crate) fn query_at_pose(obstacle: &RigidObstacle, pose: &Pose, world_point: &Vec3) -> (f64, Vec3) {
    let (d, n) = obstacle.sdf.query_local(&pose.to_local(world_point));
    (d, pose.direction_to_world(&n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{axis_angle, vec3};
    use approx::assert_relative_eq;

    fn unit_sphere() -> RigidObstacle {
        RigidObstacle {
            name: "ball".into(),
            sdf: Sdf { primitives: vec![SdfPrimitive::Sphere { center: Vec3::zeros(), radius: 1.0 }], grids: vec![] },
            trajectory: PoseTrajectory::stationary(Pose::IDENTITY),
        }
    }

    #[test]
    fn analytic_sphere_queries() {
        let o = unit_sphere();
        let (d, n) = sdf_query(&o, &vec3(2.0, 0.0, 0.0), 0.0);
        assert_eq!(d, 1.0);
        assert_eq!(n, vec3(1.0, 0.0, 0.0));
        let (d, _) = sdf_query(&o, &vec3(0.0, 0.6, 0.8), 0.0);
        assert_relative_eq!(d, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn box_face_and_edge() {
        let b = SdfPrimitive::Box { center: Vec3::zeros(), half_extents: vec3(1.0, 2.0, 3.0) };
        let (d, n) = b.query(&vec3(0.5, 0.0, 2.99));
        assert_relative_eq!(d, -0.01, epsilon = 1e-12);
        assert_eq!(n, vec3(0.0, 0.0, 1.0));
        let (d, n) = b.query(&vec3(2.0, 3.0, 0.0));
        assert_relative_eq!(d, 2f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(n, vec3(1.0, 1.0, 0.0).normalize(), epsilon = 1e-12);
    }

    #[test]
    fn capsule_primitive() {
        let c = SdfPrimitive::Capsule { a: vec3(0.0, 0.0, -1.0), b: vec3(0.0, 0.0, 1.0), radius: 0.5 };
        let (d, n) = c.query(&vec3(0.0, 2.0, 0.3));
        assert_relative_eq!(d, 1.5, epsilon = 1e-12);
        assert_relative_eq!(n, vec3(0.0, 1.0, 0.0), epsilon = 1e-12);
        let (d, _) = c.query(&vec3(0.0, 0.0, 2.0));
        assert_relative_eq!(d, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn moving_pose_transforms_queries() {
        let mut o = unit_sphere();
        o.sdf.primitives = vec![SdfPrimitive::Box { center: Vec3::zeros(), half_extents: vec3(1.0, 0.1, 0.1) }];
        let q = axis_angle(&Vec3::z(), std::f64::consts::FRAC_PI_2);
        o.trajectory = PoseTrajectory::new(vec![
            PoseSample { t: 0.0, pose: Pose::IDENTITY },
            PoseSample { t: 1.0, pose: Pose { position: vec3(0.0, 0.0, 1.0), rotation: q } },
        ])
        .unwrap();
        // At t = 1 the long axis points along world y.
        let (d, n) = sdf_query(&o, &vec3(0.0, 0.0, 1.2), 1.0);
        assert_relative_eq!(d, 0.1, epsilon = 1e-12);
        assert_relative_eq!(n, vec3(0.0, 0.0, 1.0), epsilon = 1e-12);
        let (d, _) = sdf_query(&o, &vec3(0.0, 0.95, 1.0), 1.0);
        assert!(d < 0.0);
        let (pose, clamped) = o.trajectory.pose_at(0.5);
        assert!(!clamped);
        assert_relative_eq!(pose.position, vec3(0.0, 0.0, 0.5), epsilon = 1e-15);
        assert!(o.trajectory.pose_at(2.0).1);
    }

    #[test]
    fn trajectory_rejects_unsorted_times() {
        let s = PoseSample { t: 0.0, pose: Pose::IDENTITY };
        assert!(PoseTrajectory::new(vec![s, s]).is_err());
        assert!(PoseTrajectory::new(vec![]).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(GridSdf::new(Vec3::zeros(), 0.0, [2, 2, 2], vec![0.0; 8]).is_err());
        assert!(GridSdf::new(Vec3::zeros(), 1.0, [2, 2, 2], vec![0.0; 7]).is_err());
    }

    #[test]
    fn grid_file_round_trips() {
        let g = GridSdf::from_fn(vec3(-0.5, -0.25, 0.0), 0.25, [5, 3, 4], |p| p.norm() - 0.3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let text = dir.path().join("g.sdf");
        let bin = dir.path().join("g.sdfb");
        g.write_text(&text).unwrap();
        g.write_binary(&bin).unwrap();
        assert_eq!(GridSdf::load(&text).unwrap(), g);
        assert_eq!(GridSdf::load(&bin).unwrap(), g);
        let bytes = std::fs::read(&bin).unwrap();
        assert_eq!(&bytes[..4], b"PSDF");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(f64::from_le_bytes(bytes[8..16].try_into().unwrap()), -0.5);
    }

    #[test]
    fn grid_text_errors_mention_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.sdf");
        std::fs::write(&p, "plantsim-sdf 1\norigin 0 0 0\nspacing 1\ndims 2 2 2\n0 0 0 0\n0 0 x 0\n").unwrap();
        let err = GridSdf::load(&p).unwrap_err().to_string();
        assert!(err.contains("line 6"), "{err}");
    }
}
