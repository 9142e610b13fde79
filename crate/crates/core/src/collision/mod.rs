//! Plant self-collision and one-way coupling against scripted obstacles.
//!
//! Plant primitives are capsules around live segments and spheres on fruit
//! particles. Self contacts push both bodies apart along the contact normal,
//! split by inverse mass; obstacle contacts move only the plant body, by the
//! full depth plus a small slack.

pub mod broadphase;
pub mod geometry;
pub mod sdf;

use serde::{Deserialize, Serialize};

pub use broadphase::spatial_hash_pairs;
pub use geometry::{closest_point_pair, penetration, Aabb, ClosestPoints, Primitive};
pub use sdf::{sdf_query, GridSdf, Pose, PoseSample, PoseTrajectory, RigidObstacle, Sdf, SdfPrimitive};

use crate::math::Vec3;
use crate::solver::SimState;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollisionParams {
    pub self_collision: bool,
    /// Extra push-out distance for obstacle contacts, m.
    pub obstacle_slack: f64,
    /// Capsule axis sample spacing as a fraction of the capsule radius.
    pub capsule_sample_fraction: f64,
}

impl Default for CollisionParams {
    fn default() -> Self {
        CollisionParams { self_collision: true, obstacle_slack: 1e-4, capsule_sample_fraction: 0.5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BodyRef {
    Segment(usize),
    Sphere(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContactKind {
    CapsuleCapsule,
    CapsuleSphere,
    SphereSphere,
    PlantObstacle,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ContactOther {
    Body { body: BodyRef, param: f64 },
    Obstacle(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contact {
    pub kind: ContactKind,
    pub point: Vec3,
    /// Unit normal pointing toward `body`.
    pub normal: Vec3,
    pub depth: f64,
    pub body: BodyRef,
    /// Core parameter of the contact point on `body`.
    pub param: f64,
    pub other: ContactOther,
}

pub fn primitive_of(state: &SimState, body: BodyRef) -> Primitive {
    match body {
        BodyRef::Segment(i) => {
            let s = &state.segments[i];
            Primitive::Capsule {
                a: state.particles[s.particle_a].position,
                b: state.particles[s.particle_b].position,
                radius: s.radius,
            }
        }
        BodyRef::Sphere(i) => {
            let p = &state.particles[i];
            Primitive::Sphere { center: p.position, radius: p.radius }
        }
    }
}

/// Live plant bodies in a fixed order: segments by index, then spheres.
pub fn plant_bodies(state: &SimState) -> Vec<BodyRef> {
    state
        .segments
        .iter()
        .enumerate()
        .filter(|(_, s)| s.alive)
        .map(|(i, _)| BodyRef::Segment(i))
        .chain(state.spheres.iter().map(|&p| BodyRef::Sphere(p)))
        .collect()
}

fn body_particles(state: &SimState, body: BodyRef) -> ([usize; 2], usize) {
    match body {
        BodyRef::Segment(i) => ([state.segments[i].particle_a, state.segments[i].particle_b], 2),
        BodyRef::Sphere(p) => ([p, p], 1),
    }
}

/// Particle adjacency through live segments, sorted per particle.
fn adjacency(state: &SimState) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); state.particles.len()];
    for s in state.segments.iter().filter(|s| s.alive) {
        adj[s.particle_a].push(s.particle_b);
        adj[s.particle_b].push(s.particle_a);
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    adj
}

/// Bodies sharing a particle, or with particles joined by a segment, never
/// collide with each other.
fn excluded(state: &SimState, adj: &[Vec<usize>], a: BodyRef, b: BodyRef) -> bool {
    let (pa, na) = body_particles(state, a);
    let (pb, nb) = body_particles(state, b);
    pa[..na]
        .iter()
        .any(|x| pb[..nb].iter().any(|y| x == y || adj[*x].binary_search(y).is_ok()))
}

fn contact_kind(a: BodyRef, b: BodyRef) -> ContactKind {
    match (a, b) {
        (BodyRef::Segment(_), BodyRef::Segment(_)) => ContactKind::CapsuleCapsule,
        (BodyRef::Sphere(_), BodyRef::Sphere(_)) => ContactKind::SphereSphere,
        _ => ContactKind::CapsuleSphere,
    }
}

/// Center and radius of a sphere enclosing a body.
fn bounding_sphere(state: &SimState, body: BodyRef) -> (Vec3, f64) {
    match body {
        BodyRef::Segment(i) => {
            let s = &state.segments[i];
            let (a, b) = (state.particles[s.particle_a].position, state.particles[s.particle_b].position);
            ((a + b) * 0.5, 0.5 * (b - a).norm() + s.radius)
        }
        BodyRef::Sphere(i) => {
            let p = &state.particles[i];
            (p.position, p.radius)
        }
    }
}

fn self_contact(state: &SimState, a: BodyRef, b: BodyRef) -> Option<Contact> {
    // Most candidate pairs are apart; reject those cheaply first.
    let (ca, ra) = bounding_sphere(state, a);
    let (cb, rb) = bounding_sphere(state, b);
    if (ca - cb).norm_squared() >= (ra + rb) * (ra + rb) {
        return None;
    }
    let (cp, normal, depth) = penetration(&primitive_of(state, a), &primitive_of(state, b))?;
    Some(Contact {
        kind: contact_kind(a, b),
        point: (cp.point_a + cp.point_b) * 0.5,
        normal,
        depth,
        body: a,
        param: cp.param_a,
        other: ContactOther::Body { body: b, param: cp.param_b },
    })
}

/// Deepest penetration of a plant body into one obstacle at a given pose.
/// Capsules are tested at equidistant samples along their axis.
fn obstacle_contact(
    state: &SimState,
    params: &CollisionParams,
    obstacle_index: usize,
    obstacle: &RigidObstacle,
    pose: &Pose,
    body: BodyRef,
) -> Option<Contact> {
    let prim = primitive_of(state, body);
    let (a, b, radius) = match prim {
        Primitive::Sphere { center, radius } => (center, center, radius),
        Primitive::Capsule { a, b, radius } => (a, b, radius),
    };
    let len = (b - a).norm();
    let samples = if len > 0.0 {
        ((len / (params.capsule_sample_fraction * radius)).ceil() as usize).max(2)
    } else {
        1
    };
    let mut best: Option<(f64, f64, Vec3, Vec3)> = None;
    for j in 0..samples {
        let t = if samples == 1 { 0.0 } else { j as f64 / (samples - 1) as f64 };
        let p = a + (b - a) * t;
        let (d, n) = sdf::query_at_pose(obstacle, pose, &p);
        let depth = radius - d;
        if depth > 0.0 && best.map_or(true, |(bd, ..)| depth > bd) {
            best = Some((depth, t, p, n));
        }
    }
    let (depth, param, point, normal) = best?;
    Some(Contact {
        kind: ContactKind::PlantObstacle,
        point,
        normal,
        depth,
        body,
        param,
        other: ContactOther::Obstacle(obstacle_index),
    })
}

/// Generalized inverse mass of a body at core parameter `t`.
fn body_weight(state: &SimState, body: BodyRef, t: f64) -> f64 {
    match body {
        BodyRef::Sphere(p) => state.particles[p].inverse_mass,
        BodyRef::Segment(i) => {
            let s = &state.segments[i];
            let w1 = state.particles[s.particle_a].inverse_mass;
            let w2 = state.particles[s.particle_b].inverse_mass;
            (1.0 - t) * (1.0 - t) * w1 + t * t * w2
        }
    }
}

/// Moves `body` so its point at parameter `t` travels `scale · w_gen` along `n`.
fn push(state: &mut SimState, body: BodyRef, t: f64, n: &Vec3, scale: f64) {
    match body {
        BodyRef::Sphere(p) => {
            let w = state.particles[p].inverse_mass;
            state.particles[p].position += n * (w * scale);
        }
        BodyRef::Segment(i) => {
            let (ia, ib) = (state.segments[i].particle_a, state.segments[i].particle_b);
            let w1 = state.particles[ia].inverse_mass;
            let w2 = state.particles[ib].inverse_mass;
            state.particles[ia].position += n * ((1.0 - t) * w1 * scale);
            state.particles[ib].position += n * (t * w2 * scale);
        }
    }
}

fn apply_contact(state: &mut SimState, params: &CollisionParams, c: &Contact) {
    let wa = body_weight(state, c.body, c.param);
    match c.other {
        ContactOther::Obstacle(_) => {
            if wa > 0.0 {
                push(state, c.body, c.param, &c.normal, (c.depth + params.obstacle_slack) / wa);
            }
        }
        ContactOther::Body { body, param } => {
            let wb = body_weight(state, body, param);
            let w = wa + wb;
            if w > 0.0 {
                let scale = c.depth / w;
                push(state, c.body, c.param, &c.normal, scale);
                push(state, body, param, &-c.normal, scale);
            }
        }
    }
}

/// Every current contact, found by exhaustive pair testing; self contacts
/// first in body order, then obstacle contacts.
pub fn detect_contacts(state: &SimState, params: &CollisionParams, obstacles: &[RigidObstacle], t: f64) -> Vec<Contact> {
    let bodies = plant_bodies(state);
    let mut out = Vec::new();
    if params.self_collision {
        let adj = adjacency(state);
        for (i, &a) in bodies.iter().enumerate() {
            for &b in &bodies[i + 1..] {
                if excluded(state, &adj, a, b) {
                    continue;
                }
                out.extend(self_contact(state, a, b));
            }
        }
    }
    for (oi, o) in obstacles.iter().enumerate() {
        let pose = o.pose_at(t);
        for &body in &bodies {
            out.extend(obstacle_contact(state, params, oi, o, &pose, body));
        }
    }
    out
}

/// One resolution pass over all contacts at time `t`, in deterministic body
/// order. Returns the number of contacts resolved.
pub fn resolve_contacts(state: &mut SimState, params: &CollisionParams, obstacles: &[RigidObstacle], t: f64) -> usize {
    let mut solver = ContactSolver::default();
    solver.prepare(state, params, obstacles, t);
    solver.resolve(state, params, obstacles, t)
}

/// Contact pipeline reused across substeps.
///
/// Self-collision keeps a neighbour list of body pairs whose cores were within
/// `r_a + r_b + skin` when it was built; it is rebuilt once any particle has
/// moved more than half the skin, or when the set of live segments changes.
/// Obstacle candidates are refreshed every substep from the obstacle's
/// bounding sphere.
#[derive(Clone, Debug, Default)]
pub struct ContactSolver {
    near_pairs: Vec<(BodyRef, BodyRef)>,
    built_positions: Vec<Vec3>,
    built_live: usize,
    built_spheres: usize,
    skin: f64,
    /// Particle adjacency and the live-segment count it was built for.
    adjacency: Option<(usize, Vec<Vec<usize>>)>,
    obstacle_candidates: Vec<(usize, BodyRef)>,
    poses: Vec<Pose>,
    clamp_warned: bool,
}

impl ContactSolver {
    pub fn near_pairs(&self) -> &[(BodyRef, BodyRef)] {
        &self.near_pairs
    }

    fn needs_rebuild(&self, state: &SimState) -> bool {
        if self.built_positions.len() != state.particles.len()
            || self.built_live != state.live_segment_count()
            || self.built_spheres != state.spheres.len()
        {
            return true;
        }
        let limit = (0.5 * self.skin).powi(2);
        state
            .particles
            .iter()
            .zip(&self.built_positions)
            .any(|(p, b)| (p.position - b).norm_squared() > limit)
    }

    fn rebuild(&mut self, state: &SimState) {
        let bodies = plant_bodies(state);
        let max_radius = bodies
            .iter()
            .map(|b| primitive_of(state, *b).radius())
            .fold(0.0f64, f64::max);
        // A wider skin means fewer rebuilds for a swaying plant at the cost
        // of a few more candidate pairs.
        self.skin = 2.0 * max_radius;
        self.near_pairs.clear();
        if !bodies.is_empty() && max_radius > 0.0 {
            let boxes: Vec<Aabb> = bodies
                .iter()
                .map(|b| primitive_of(state, *b).aabb(0.5 * self.skin))
                .collect();
            // Segments only ever die, so the live count identifies the topology.
            let live = state.live_segment_count();
            if self.adjacency.as_ref().map(|(n, _)| *n) != Some(live) {
                self.adjacency = Some((live, adjacency(state)));
            }
            let adj = &self.adjacency.as_ref().expect("adjacency just built").1;
            let cell = broadphase::cell_size(&boxes, 2.0 * max_radius);
            for (i, j) in spatial_hash_pairs(&boxes, cell) {
                let (a, b) = (bodies[i], bodies[j]);
                if excluded(state, adj, a, b) {
                    continue;
                }
                let pa = primitive_of(state, a);
                let pb = primitive_of(state, b);
                if closest_point_pair(&pa, &pb).distance < pa.radius() + pb.radius() + self.skin {
                    self.near_pairs.push((a, b));
                }
            }
        }
        self.built_positions.clear();
        self.built_positions.extend(state.particles.iter().map(|p| p.position));
        self.built_live = state.live_segment_count();
        self.built_spheres = state.spheres.len();
    }

    /// Refreshes candidate lists for a substep ending at time `t`.
    pub fn prepare(&mut self, state: &SimState, params: &CollisionParams, obstacles: &[RigidObstacle], t: f64) {
        if params.self_collision {
            if self.needs_rebuild(state) {
                self.rebuild(state);
            }
        } else {
            self.near_pairs.clear();
        }

        self.poses.clear();
        self.obstacle_candidates.clear();
        if obstacles.is_empty() {
            return;
        }
        let bodies = plant_bodies(state);
        for (oi, o) in obstacles.iter().enumerate() {
            let (pose, clamped) = o.trajectory.pose_at(t);
            if clamped && !self.clamp_warned && t < o.trajectory.start() {
                log::warn!("obstacle `{}` trajectory starts after t = {t}; holding its first pose", o.name);
                self.clamp_warned = true;
            }
            self.poses.push(pose);
            let Some((center, radius)) = o.sdf.bounding_sphere() else { continue };
            let center = pose.to_world(&center);
            for &body in &bodies {
                let prim = primitive_of(state, body);
                let bb = prim.aabb(prim.radius());
                let closest = center.sup(&bb.min).inf(&bb.max);
                if (closest - center).norm() <= radius {
                    self.obstacle_candidates.push((oi, body));
                }
            }
        }
    }

    /// Resolves current contacts once; self pairs first, then obstacles.
    pub fn resolve(&mut self, state: &mut SimState, params: &CollisionParams, obstacles: &[RigidObstacle], _t: f64) -> usize {
        let mut count = 0;
        if params.self_collision {
            for i in 0..self.near_pairs.len() {
                let (a, b) = self.near_pairs[i];
                if let Some(c) = self_contact(state, a, b) {
                    apply_contact(state, params, &c);
                    count += 1;
                }
            }
        }
        for i in 0..self.obstacle_candidates.len() {
            let (oi, body) = self.obstacle_candidates[i];
            if let Some(c) = obstacle_contact(state, params, oi, &obstacles[oi], &self.poses[oi], body) {
                apply_contact(state, params, &c);
                count += 1;
            }
        }
        count
    }
}
