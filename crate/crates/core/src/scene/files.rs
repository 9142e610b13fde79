//! CSV and binary formats for trajectories, frames and fracture events.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::collision::{Pose, PoseSample, PoseTrajectory};
use crate::error::{Error, Result};
use crate::compiler::PlantGraph;
use crate::fracture::FractureEvent;
use crate::math::{Quat, Vec3};
use crate::solver::SimState;

#[derive(Debug, Serialize, Deserialize)]
struct PoseRow {
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    qw: f64,
    qx: f64,
    qy: f64,
    qz: f64,
}

/// Reads a pose trajectory: header `t,x,y,z,qw,qx,qy,qz`, one row per pose.
pub fn read_trajectory_csv(path: &Path) -> Result<PoseTrajectory> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(file);
    let mut samples = Vec::new();
    for row in reader.deserialize::<PoseRow>() {
        let r = row.map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        samples.push(PoseSample {
            t: r.t,
            pose: Pose { position: Vec3::new(r.x, r.y, r.z), rotation: Quat::new(r.qw, r.qx, r.qy, r.qz) },
        });
    }
    PoseTrajectory::new(samples).map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })
}

pub fn write_trajectory_csv(path: &Path, trajectory: &PoseTrajectory) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for s in trajectory.samples() {
        let (p, q) = (s.pose.position, s.pose.rotation);
        w.serialize(PoseRow { t: s.t, x: p.x, y: p.y, z: p.z, qw: q.w, qx: q.i, qy: q.j, qz: q.k })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One recorded frame: a position and a frame quaternion per particle.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub positions: Vec<Vec3>,
    pub rotations: Vec<Quat>,
}

impl Frame {
    /// Each particle reports the frame of the segment that ends at it; a
    /// particle without one (the root) reports its first outgoing segment's
    /// frame, or the identity.
    pub fn capture(state: &SimState) -> Self {
        let mut rotations = vec![None; state.particles.len()];
        for s in &state.segments {
            rotations[s.particle_b] = Some(state.orientations[s.orientation].rotation);
        }
        for s in &state.segments {
            if rotations[s.particle_a].is_none() {
                rotations[s.particle_a] = Some(state.orientations[s.orientation].rotation);
            }
        }
        Frame {
            positions: state.particles.iter().map(|p| p.position).collect(),
            rotations: rotations.into_iter().map(|r| r.unwrap_or(crate::math::IDENTITY)).collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct FrameRow {
    frame: usize,
    id: usize,
    x: f64,
    y: f64,
    z: f64,
    qw: f64,
    qx: f64,
    qy: f64,
    qz: f64,
}

pub fn write_frames_csv(path: &Path, frames: &[Frame]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for (k, f) in frames.iter().enumerate() {
        for (id, (p, q)) in f.positions.iter().zip(&f.rotations).enumerate() {
            w.serialize(FrameRow { frame: k, id, x: p.x, y: p.y, z: p.z, qw: q.w, qx: q.i, qy: q.j, qz: q.k })?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_frames_csv(path: &Path) -> Result<Vec<Frame>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(std::io::BufReader::new(file));
    let mut frames: Vec<Frame> = Vec::new();
    let bad = |m: String| Error::Parse { path: path.to_path_buf(), message: m };
    for row in reader.deserialize::<FrameRow>() {
        let r = row.map_err(|e| bad(e.to_string()))?;
        if r.frame == frames.len() {
            frames.push(Frame { positions: Vec::new(), rotations: Vec::new() });
        }
        if r.frame + 1 != frames.len() {
            return Err(bad(format!("frame {} out of order", r.frame)));
        }
        let f = frames.last_mut().expect("pushed above");
        if r.id != f.positions.len() {
            return Err(bad(format!("frame {}: particle {} out of order", r.frame, r.id)));
        }
        f.positions.push(Vec3::new(r.x, r.y, r.z));
        f.rotations.push(Quat::new(r.qw, r.qx, r.qy, r.qz));
    }
    Ok(frames)
}

const FRAMES_MAGIC: &[u8; 4] = b"PSFR";
const FRAMES_VERSION: u32 = 1;

/// Binary twin of the frame CSV, little-endian: `PSFR`, u32 version,
/// u32 particle count, u32 frame count, then per frame and particle seven
/// f64 (x, y, z, qw, qx, qy, qz).
pub fn write_frames_binary(path: &Path, frames: &[Frame]) -> Result<()> {
    let n = frames.first().map_or(0, |f| f.positions.len());
    let mut buf = Vec::with_capacity(16 + frames.len() * n * 56);
    buf.extend_from_slice(FRAMES_MAGIC);
    buf.extend_from_slice(&FRAMES_VERSION.to_le_bytes());
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    buf.extend_from_slice(&(frames.len() as u32).to_le_bytes());
    for f in frames {
        for (p, q) in f.positions.iter().zip(&f.rotations) {
            for v in [p.x, p.y, p.z, q.w, q.i, q.j, q.k] {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn read_frames_binary(path: &Path) -> Result<Vec<Frame>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |m: &str| Error::Parse { path: path.to_path_buf(), message: m.to_string() };
    if bytes.len() < 16 || &bytes[..4] != FRAMES_MAGIC {
        return Err(bad("not a frame file"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    if u32_at(4) != FRAMES_VERSION {
        return Err(bad("unsupported frame file version"));
    }
    let (n, count) = (u32_at(8) as usize, u32_at(12) as usize);
    if bytes.len() != 16 + n * count * 56 {
        return Err(bad("frame file size does not match its header"));
    }
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let mut frames = Vec::with_capacity(count);
    let mut o = 16;
    for _ in 0..count {
        let mut f = Frame { positions: Vec::with_capacity(n), rotations: Vec::with_capacity(n) };
        for _ in 0..n {
            let v: Vec<f64> = (0..7).map(|k| f64_at(o + 8 * k)).collect();
            f.positions.push(Vec3::new(v[0], v[1], v[2]));
            f.rotations.push(Quat::new(v[3], v[4], v[5], v[6]));
            o += 56;
        }
        frames.push(f);
    }
    Ok(frames)
}

pub fn write_events_csv(path: &Path, events: &[FractureEvent]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(BufWriter::new(file));
    w.write_record(["time", "segment", "trigger", "magnitude"])?;
    for e in events {
        w.serialize(e)?;
    }
    let mut inner = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    inner.flush().map_err(|e| Error::io(path, e))
}

pub fn read_events_csv(path: &Path) -> Result<Vec<FractureEvent>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader
        .deserialize::<FractureEvent>()
        .map(|r| r.map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() }))
        .collect()
}

#[derive(Debug, Serialize)]
struct NodeRow {
    id: usize,
    x: f64,
    y: f64,
    z: f64,
    radius: f64,
    key: bool,
}

#[derive(Debug, Serialize)]
struct EdgeRow {
    parent: usize,
    child: usize,
    length: f64,
}

/// Writes a compiled graph as `nodes.csv` and `edges.csv` in `dir`.
pub fn write_graph_csv(dir: &Path, graph: &PlantGraph) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join("nodes.csv"))?;
    for (id, n) in graph.nodes.iter().enumerate() {
        let p = n.position;
        w.serialize(NodeRow { id, x: p.x, y: p.y, z: p.z, radius: n.radius, key: n.flags.key })?;
    }
    w.flush().map_err(|e| Error::io(dir, e))?;
    let mut w = csv::Writer::from_path(dir.join("edges.csv"))?;
    for e in &graph.edges {
        w.serialize(EdgeRow { parent: e.parent, child: e.child, length: e.length })?;
    }
    w.flush().map_err(|e| Error::io(dir, e))
}
