//! Position-and-orientation based dynamics over the rod network.
//!
//! Each step is split into substeps. A substep predicts positions and
//! orientations, runs a fixed number of Gauss–Seidel passes (all stretch/shear
//! constraints, then all bend/twist pairs, then contacts, ascending index), and
//! derives velocities from the corrected configuration. Constraint
//! corrections use the compliant form
//!
//! ```text
//! Δλ = (−C − α̃λ) / (Σ w|∇C|² + α̃),   α̃ = α / Δt²
//! ```
//!
//! per constraint component, where α is the inverse of the material stiffness
//! integrated over the element length.

use serde::{Deserialize, Serialize};

use crate::collision::{CollisionParams, ContactSolver, RigidObstacle};
use crate::compiler::OrganInstance;
use crate::error::{Error, Result};
use crate::fracture::{check_fracture, FractureEvent, FracturePolicy};
use crate::math::{conj_mul, is_finite3, normalized, pure, rotation_matrix, vector_part, Quat, Vec3};
use crate::rod::{
    bend_twist_constraint, material_to_stiffness, stretch_shear_constraint, BendTwistPair,
    DarbouxVector, OrientationElement, Particle, RodSegment,
};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimState {
    pub particles: Vec<Particle>,
    pub orientations: Vec<OrientationElement>,
    pub segments: Vec<RodSegment>,
    pub bend_pairs: Vec<BendTwistPair>,
    pub attachments: Vec<OrganInstance>,
    /// Particles that collide as spheres (fruits).
    pub spheres: Vec<usize>,
    pub time: f64,
    pub step_index: u64,
}

impl SimState {
    pub fn live_segment_count(&self) -> usize {
        self.segments.iter().filter(|s| s.alive).count()
    }

    pub fn live_pair_count(&self) -> usize {
        self.bend_pairs.iter().filter(|p| p.alive).count()
    }

    pub fn mass(&self, particle: usize) -> f64 {
        let w = self.particles[particle].inverse_mass;
        if w > 0.0 {
            1.0 / w
        } else {
            0.0
        }
    }

    /// Linear plus rotational kinetic energy of the dynamic bodies.
    pub fn kinetic_energy(&self) -> f64 {
        let linear: f64 = self
            .particles
            .iter()
            .filter(|p| p.inverse_mass > 0.0)
            .map(|p| 0.5 * p.velocity.norm_squared() / p.inverse_mass)
            .sum();
        let angular: f64 = self
            .orientations
            .iter()
            .map(|o| {
                (0..3)
                    .filter(|&k| o.inverse_inertia[k] > 0.0)
                    .map(|k| 0.5 * o.angular_velocity[k].powi(2) / o.inverse_inertia[k])
                    .sum::<f64>()
            })
            .sum();
        linear + angular
    }

    pub fn linear_momentum(&self) -> Vec3 {
        self.particles
            .iter()
            .filter(|p| p.inverse_mass > 0.0)
            .map(|p| p.velocity / p.inverse_mass)
            .sum()
    }

    pub fn stretch_shear(&self, segment: usize) -> Vec3 {
        let s = &self.segments[segment];
        stretch_shear_constraint(
            &self.particles[s.particle_a].position,
            &self.particles[s.particle_b].position,
            &self.orientations[s.orientation].rotation,
            s.rest_length,
        )
        .expect("segments have positive rest length")
    }

    pub fn bend_twist(&self, pair: usize) -> DarbouxVector {
        let p = &self.bend_pairs[pair];
        let qa = &self.orientations[self.segments[p.segment_a].orientation].rotation;
        let qb = &self.orientations[self.segments[p.segment_b].orientation].rotation;
        bend_twist_constraint(p, qa, qb)
    }

    /// Checks the structural invariants of the rod network.
    pub fn validate(&self) -> Result<()> {
        let np = self.particles.len();
        for (i, p) in self.particles.iter().enumerate() {
            if !(p.inverse_mass >= 0.0) || !(p.radius > 0.0) {
                return Err(Error::InvalidGraph(format!("particle {i} has invalid mass or radius")));
            }
        }
        for (i, s) in self.segments.iter().enumerate() {
            if s.particle_a >= np || s.particle_b >= np || s.orientation >= self.orientations.len() {
                return Err(Error::InvalidGraph(format!("segment {i} references missing elements")));
            }
            if s.particle_a == s.particle_b || !(s.rest_length > 0.0) {
                return Err(Error::InvalidGraph(format!("segment {i} is degenerate")));
            }
        }
        for (i, p) in self.bend_pairs.iter().enumerate() {
            if !p.alive {
                continue;
            }
            let (a, b) = match (self.segments.get(p.segment_a), self.segments.get(p.segment_b)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(Error::InvalidGraph(format!("bend pair {i} references missing segments"))),
            };
            if !a.alive || !b.alive {
                return Err(Error::InvalidGraph(format!("live bend pair {i} references a dead segment")));
            }
            let shared = [a.particle_a, a.particle_b]
                .iter()
                .filter(|x| **x == b.particle_a || **x == b.particle_b)
                .count();
            if shared != 1 {
                return Err(Error::InvalidGraph(format!("bend pair {i} segments share {shared} particles")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverParams {
    pub dt: f64,
    pub substeps: u32,
    pub iterations: u32,
    pub gravity: Vec3,
    /// Per-second velocity damping rate.
    pub velocity_damping: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            dt: 1.0 / 120.0,
            substeps: 8,
            iterations: 20,
            gravity: Vec3::new(0.0, 0.0, -9.81),
            velocity_damping: 0.1,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.substeps < 1 || self.iterations < 1 {
            return Err(Error::Config("substeps and iterations must be >= 1".into()));
        }
        if !(self.velocity_damping >= 0.0) {
            return Err(Error::Config(format!("velocity_damping must be >= 0, got {}", self.velocity_damping)));
        }
        if !is_finite3(&self.gravity) {
            return Err(Error::Config("gravity must be finite".into()));
        }
        Ok(())
    }

    pub fn substep_dt(&self) -> f64 {
        self.dt / self.substeps as f64
    }
}

/// Semi-implicit prediction over `dt`, in place.
pub fn predict(state: &mut SimState, gravity: &Vec3, dt: f64) {
    for p in state.particles.iter_mut().filter(|p| p.inverse_mass > 0.0) {
        p.velocity += gravity * dt;
        p.position += p.velocity * dt;
    }
    for o in state.orientations.iter_mut() {
        if o.is_pinned() || o.angular_velocity == Vec3::zeros() {
            continue;
        }
        o.rotation = normalized(o.rotation + o.rotation * pure(&o.angular_velocity) * (0.5 * dt));
    }
}

/// Compliance-scaled constants for one segment; `alpha` is already divided by Δt².
#[derive(Clone, Copy, Debug)]
pub struct StretchCompliance {
    pub alpha: Vec3,
}

impl StretchCompliance {
    pub fn for_segment(segment: &RodSegment, dt: f64) -> Self {
        let k = material_to_stiffness(&segment.material, segment.radius).stretch;
        let scale = 1.0 / (segment.rest_length * dt * dt);
        StretchCompliance { alpha: Vec3::new(scale / k.x, scale / k.y, scale / k.z) }
    }

    pub fn rigid() -> Self {
        StretchCompliance { alpha: Vec3::zeros() }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BendCompliance {
    pub alpha: Vec3,
}

impl BendCompliance {
    /// The joint spans half of each segment; the halves act in series.
    pub fn for_pair(pair: &BendTwistPair, segments: &[RodSegment], dt: f64) -> Self {
        let a = &segments[pair.segment_a];
        let b = &segments[pair.segment_b];
        let ka = material_to_stiffness(&a.material, a.radius).bend;
        let kb = material_to_stiffness(&b.material, b.radius).bend;
        let l2 = pair.mean_length * pair.mean_length * dt * dt;
        let alpha = Vec3::from_fn(|k, _| (0.5 * a.rest_length / ka[k] + 0.5 * b.rest_length / kb[k]) / l2);
        BendCompliance { alpha }
    }

    pub fn rigid() -> Self {
        BendCompliance { alpha: Vec3::zeros() }
    }
}

/// `q + ½ q (0, θ)`, normalized: a small rotation given in the body frame.
#[inline]
fn apply_body_rotation(q: &Quat, t: &Vec3) -> Quat {
    let (w, x, y, z) = (q.w, q.i, q.j, q.k);
    let h = 0.5;
    normalized(Quat::new(
        w + h * (-x * t.x - y * t.y - z * t.z),
        x + h * (w * t.x + y * t.z - z * t.y),
        y + h * (w * t.y + z * t.x - x * t.z),
        z + h * (w * t.z + x * t.y - y * t.x),
    ))
}

/// One compliant projection of a stretch/shear constraint, in place.
///
/// The constraint is expressed per material axis, `C_k = d_k·(p2 − p1)/l0 − δ_k3`,
/// so that the (G·A, G·A, E·A) stiffness triple applies componentwise.
pub fn project_stretch_shear(
    segment: &RodSegment,
    particles: &mut [Particle],
    orientations: &mut [OrientationElement],
    compliance: &StretchCompliance,
    lambda: &mut Vec3,
) {
    let (ia, ib) = (segment.particle_a, segment.particle_b);
    let w1 = particles[ia].inverse_mass;
    let w2 = particles[ib].inverse_mass;
    let orientation = &orientations[segment.orientation];
    let wq = orientation.inverse_inertia;
    let rot = rotation_matrix(&orientation.rotation);
    let inv_l0 = 1.0 / segment.rest_length;
    let v = rot.tr_mul(&((particles[ib].position - particles[ia].position) * inv_l0));

    let wp = (w1 + w2) * inv_l0 * inv_l0;
    let alpha = &compliance.alpha;
    // Rotational gradients e_k × v in the body frame: (0, −v_z, v_y) and
    // (v_z, 0, −v_x). The axial row is left to the positions: its rotational
    // gradient vanishes as d3 aligns with the segment, which makes it
    // ill-conditioned.
    let (vx2, vy2, vz2) = (v.x * v.x, v.y * v.y, v.z * v.z);
    let denom = [
        wp + wq.y * vz2 + wq.z * vy2 + alpha.x,
        wp + wq.x * vz2 + wq.z * vx2 + alpha.y,
        wp + alpha.z,
    ];
    let c = [v.x, v.y, v.z - 1.0];
    let mut dl = [0.0; 3];
    for k in 0..3 {
        if denom[k] > 1e-300 {
            dl[k] = (-c[k] - alpha[k] * lambda[k]) / denom[k];
            lambda[k] += dl[k];
        }
    }
    let dp = rot * Vec3::new(dl[0], dl[1], dl[2]) * inv_l0;
    particles[ia].position -= dp * w1;
    particles[ib].position += dp * w2;
    let dtheta = Vec3::new(wq.x * v.z * dl[1], -wq.y * v.z * dl[0], wq.z * (v.y * dl[0] - v.x * dl[1]));
    if dtheta != Vec3::zeros() {
        let o = &mut orientations[segment.orientation];
        o.rotation = apply_body_rotation(&o.rotation, &dtheta);
    }
}

/// One compliant projection of a bend/twist pair, in place.
///
/// The four-component constraint `C_b` is projected onto the three
/// rotational directions available at the relative rotation `r = q̄₁q₂`
/// (the tangent basis `(0, e_k)·r`); its remaining component vanishes exactly
/// when the tangent part does.
pub fn project_bend_twist(
    pair: &BendTwistPair,
    segments: &[RodSegment],
    orientations: &mut [OrientationElement],
    compliance: &BendCompliance,
    lambda: &mut Vec3,
) {
    let ia = segments[pair.segment_a].orientation;
    let ib = segments[pair.segment_b].orientation;
    let (q1, w1) = (orientations[ia].rotation, orientations[ia].inverse_inertia);
    let (q2, w2) = (orientations[ib].rotation, orientations[ib].inverse_inertia);
    let inv_l = 1.0 / pair.mean_length;

    let r = conj_mul(&q1, &q2);
    let (rw, rx, ry, rz) = (r.w, r.i, r.j, r.k);

    let s2 = 2.0 * inv_l;
    let omega = [s2 * rw, s2 * rx, s2 * ry, s2 * rz];
    let r0 = &pair.rest_darboux.0;
    let rest = [r0.w, r0.i, r0.j, r0.k];
    let (mut minus, mut plus) = (0.0, 0.0);
    for k in 0..4 {
        minus += (omega[k] - rest[k]) * (omega[k] - rest[k]);
        plus += (omega[k] + rest[k]) * (omega[k] + rest[k]);
    }
    let sign = if minus > plus { -1.0 } else { 1.0 };
    let c4: [f64; 4] = std::array::from_fn(|k| omega[k] - sign * rest[k]);

    // Components along (0, e_k)·r.
    let c = [
        -c4[0] * rx + c4[1] * rw - c4[2] * rz + c4[3] * ry,
        -c4[0] * ry + c4[1] * rz + c4[2] * rw - c4[3] * rx,
        -c4[0] * rz - c4[1] * ry + c4[2] * rx + c4[3] * rw,
    ];
    // Row k of R(r): d_k(q1) in the body frame of q2.
    let (xx, yy, zz) = (rx * rx, ry * ry, rz * rz);
    let (xy, xz, yz) = (rx * ry, rx * rz, ry * rz);
    let (wx, wy, wz) = (rw * rx, rw * ry, rw * rz);
    let rows = [
        Vec3::new(1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy)),
        Vec3::new(2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx)),
        Vec3::new(2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy)),
    ];

    let mut dtheta1 = Vec3::zeros();
    let mut dtheta2 = Vec3::zeros();
    for k in 0..3 {
        let g2 = rows[k] * inv_l;
        let wg2 = w2.component_mul(&g2);
        let denom = w1[k] * inv_l * inv_l + g2.dot(&wg2) + compliance.alpha[k];
        if denom <= 1e-300 {
            continue;
        }
        let dl = (-c[k] - compliance.alpha[k] * lambda[k]) / denom;
        lambda[k] += dl;
        dtheta1[k] -= w1[k] * inv_l * dl;
        dtheta2 += wg2 * dl;
    }
    if dtheta1 != Vec3::zeros() {
        orientations[ia].rotation = apply_body_rotation(&q1, &dtheta1);
    }
    if dtheta2 != Vec3::zeros() {
        orientations[ib].rotation = apply_body_rotation(&q2, &dtheta2);
    }
}

/// Reusable per-simulation scratch buffers.
#[derive(Clone, Debug, Default)]
pub struct Solver {
    prev_positions: Vec<Vec3>,
    prev_rotations: Vec<Quat>,
    stretch_lambda: Vec<Vec3>,
    bend_lambda: Vec<Vec3>,
    stretch_compliance: Vec<StretchCompliance>,
    bend_compliance: Vec<BendCompliance>,
    contacts: ContactSolver,
}

impl Solver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Advances `state` by `params.dt`, returning the fracture events of the step.
    pub fn step(
        &mut self,
        state: &mut SimState,
        params: &SolverParams,
        collision: &CollisionParams,
        obstacles: &[RigidObstacle],
        fracture: &FracturePolicy,
    ) -> Result<Vec<FractureEvent>> {
        let h = params.substep_dt();
        let t0 = state.time;
        let damping = (1.0 - params.velocity_damping * h).max(0.0);

        self.stretch_compliance.clear();
        self.stretch_compliance
            .extend(state.segments.iter().map(|s| StretchCompliance::for_segment(s, h)));
        self.bend_compliance.clear();
        self.bend_compliance
            .extend(state.bend_pairs.iter().map(|p| BendCompliance::for_pair(p, &state.segments, h)));

        let mut events = Vec::new();
        for sub in 0..params.substeps {
            let t = t0 + h * (sub + 1) as f64;

            self.prev_positions.clear();
            self.prev_positions.extend(state.particles.iter().map(|p| p.position));
            self.prev_rotations.clear();
            self.prev_rotations.extend(state.orientations.iter().map(|o| o.rotation));

            predict(state, &params.gravity, h);

            self.stretch_lambda.clear();
            self.stretch_lambda.resize(state.segments.len(), Vec3::zeros());
            self.bend_lambda.clear();
            self.bend_lambda.resize(state.bend_pairs.len(), Vec3::zeros());
            self.contacts.prepare(state, collision, obstacles, t);

            for _ in 0..params.iterations {
                for (i, seg) in state.segments.iter().enumerate() {
                    if seg.alive {
                        project_stretch_shear(
                            seg,
                            &mut state.particles,
                            &mut state.orientations,
                            &self.stretch_compliance[i],
                            &mut self.stretch_lambda[i],
                        );
                    }
                }
                for (i, pair) in state.bend_pairs.iter().enumerate() {
                    if pair.alive {
                        project_bend_twist(
                            pair,
                            &state.segments,
                            &mut state.orientations,
                            &self.bend_compliance[i],
                            &mut self.bend_lambda[i],
                        );
                    }
                }
                self.contacts.resolve(state, collision, obstacles, t);
            }

            for (p, prev) in state.particles.iter_mut().zip(&self.prev_positions) {
                if p.inverse_mass > 0.0 {
                    p.velocity = (p.position - prev) / h * damping;
                } else {
                    p.velocity = Vec3::zeros();
                }
            }
            for (o, prev) in state.orientations.iter_mut().zip(&self.prev_rotations) {
                if o.is_pinned() {
                    o.angular_velocity = Vec3::zeros();
                } else {
                    let rel = prev.conjugate() * o.rotation;
                    o.angular_velocity = vector_part(&rel) * (2.0 / h) * damping;
                }
            }

            events.extend(check_fracture(state, fracture, t));

            if let Some(worst) = non_finite_diagnostic(state) {
                return Err(Error::NonFinite { step: state.step_index, worst });
            }
        }
        state.time = t0 + params.dt;
        state.step_index += 1;
        Ok(events)
    }
}

fn non_finite_diagnostic(state: &SimState) -> Option<String> {
    let bad_particle = state
        .particles
        .iter()
        .position(|p| !is_finite3(&p.position) || !is_finite3(&p.velocity));
    let bad_orientation = state
        .orientations
        .iter()
        .position(|o| !o.rotation.coords.iter().all(|c| c.is_finite()));
    if bad_particle.is_none() && bad_orientation.is_none() {
        return None;
    }
    let worst = state
        .segments
        .iter()
        .enumerate()
        .filter(|(_, s)| s.alive)
        .map(|(i, _)| (i, state.stretch_shear(i).norm()))
        .max_by(|a, b| match (a.1.is_nan(), b.1.is_nan()) {
            (true, false) => std::cmp::Ordering::Greater,
            (false, true) => std::cmp::Ordering::Less,
            _ => a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal),
        });
    let mut msg = String::new();
    if let Some(i) = bad_particle {
        msg.push_str(&format!("particle {i} non-finite"));
    } else if let Some(i) = bad_orientation {
        msg.push_str(&format!("orientation {i} non-finite"));
    }
    if let Some((i, c)) = worst {
        msg.push_str(&format!("; worst constraint: segment {i} |C_s| = {c}"));
    }
    Some(msg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{axis_angle, vec3, IDENTITY};
    use crate::rod::{compute_darboux, Material, SegmentKind};
    use approx::assert_relative_eq;

    fn material() -> Material {
        Material::new(2e7, 0.3, 300.0).unwrap()
    }

    fn particle(p: Vec3, w: f64) -> Particle {
        Particle { position: p, velocity: Vec3::zeros(), inverse_mass: w, radius: 0.005 }
    }

    fn frame(q: Quat, w: f64) -> OrientationElement {
        OrientationElement { rotation: q, angular_velocity: Vec3::zeros(), inverse_inertia: Vec3::repeat(w) }
    }

    fn segment(a: usize, b: usize, o: usize, l0: f64) -> RodSegment {
        RodSegment {
            particle_a: a,
            particle_b: b,
            orientation: o,
            rest_length: l0,
            radius: 0.005,
            material: material(),
            kind: SegmentKind::Branch,
            alive: true,
        }
    }

    #[test]
    fn predict_examples() {
        let mut state = SimState {
            particles: vec![particle(Vec3::zeros(), 0.0), particle(vec3(1.0, 0.0, 0.0), 1.0)],
            orientations: vec![frame(IDENTITY, 1.0)],
            ..Default::default()
        };
        predict(&mut state, &vec3(0.0, 0.0, -9.81), 0.001);
        assert_eq!(state.particles[0].position, Vec3::zeros());
        assert_relative_eq!(state.particles[1].position, vec3(1.0, 0.0, -9.81e-6), epsilon = 1e-18);
        assert_eq!(state.orientations[0].rotation, IDENTITY);
    }

    #[test]
    fn stretch_projection_noop_at_rest() {
        let seg = segment(0, 1, 0, 0.1);
        let mut particles = vec![particle(Vec3::zeros(), 1.0), particle(vec3(0.0, 0.0, 0.1), 1.0)];
        let mut frames = vec![frame(IDENTITY, 1.0)];
        let before = particles.clone();
        let mut lambda = Vec3::zeros();
        project_stretch_shear(&seg, &mut particles, &mut frames, &StretchCompliance::rigid(), &mut lambda);
        assert_eq!(particles, before);
        assert_eq!(frames[0].rotation, IDENTITY);
    }

    #[test]
    fn stretch_projection_symmetric_preserves_midpoint() {
        let seg = segment(0, 1, 0, 0.1);
        let mut particles = vec![particle(vec3(0.01, 0.0, 0.0), 2.0), particle(vec3(0.03, 0.02, 0.13), 2.0)];
        let mid = (particles[0].position + particles[1].position) / 2.0;
        let mut frames = vec![frame(IDENTITY, 50.0)];
        let a0 = particles[0].position;
        let b0 = particles[1].position;
        let mut lambda = Vec3::zeros();
        let compliance = StretchCompliance::for_segment(&seg, 1e-3);
        project_stretch_shear(&seg, &mut particles, &mut frames, &compliance, &mut lambda);
        let da = particles[0].position - a0;
        let db = particles[1].position - b0;
        assert!(da.norm() > 0.0);
        assert_relative_eq!(da, -db, epsilon = 1e-15);
        assert_relative_eq!((particles[0].position + particles[1].position) / 2.0, mid, epsilon = 1e-15);
    }

    #[test]
    fn stretch_projection_residual_non_increasing() {
        let seg = segment(0, 1, 0, 0.1);
        let mut particles = vec![particle(Vec3::zeros(), 1.0), particle(vec3(0.02, -0.01, 0.14), 1.0)];
        let mut frames = vec![frame(axis_angle(&Vec3::x(), 0.2), 10.0)];
        let compliance = StretchCompliance::for_segment(&seg, 1e-3);
        let mut lambda = Vec3::zeros();
        let c = |p: &[Particle], f: &[OrientationElement]| {
            stretch_shear_constraint(&p[0].position, &p[1].position, &f[0].rotation, 0.1).unwrap().norm()
        };
        let mut prev = c(&particles, &frames);
        for _ in 0..50 {
            project_stretch_shear(&seg, &mut particles, &mut frames, &compliance, &mut lambda);
            let now = c(&particles, &frames);
            assert!(now <= prev + 1e-15, "{now} > {prev}");
            prev = now;
        }
    }

    #[test]
    fn pinned_endpoints_align_frame() {
        let seg = segment(0, 1, 0, 0.1);
        let dir = vec3(0.3, -0.2, 1.0).normalize();
        let mut particles = vec![particle(Vec3::zeros(), 0.0), particle(dir * 0.1, 0.0)];
        let mut frames = vec![frame(IDENTITY, 100.0)];
        let before = particles.clone();
        let mut lambda = Vec3::zeros();
        for _ in 0..200 {
            project_stretch_shear(&seg, &mut particles, &mut frames, &StretchCompliance::rigid(), &mut lambda);
        }
        assert_eq!(particles, before);
        let d3 = crate::rod::director(&frames[0].rotation, 3);
        assert_relative_eq!(d3, dir, epsilon = 1e-9);
    }

    fn two_frame_pair(rest_l: f64) -> (Vec<RodSegment>, BendTwistPair) {
        let segs = vec![segment(0, 1, 0, rest_l), segment(1, 2, 1, rest_l)];
        let rest = compute_darboux(&IDENTITY, &IDENTITY, rest_l).unwrap();
        let pair = BendTwistPair { segment_a: 0, segment_b: 1, mean_length: rest_l, rest_darboux: rest, alive: true };
        (segs, pair)
    }

    #[test]
    fn bend_projection_noop_at_rest() {
        let (segs, pair) = two_frame_pair(0.1);
        let mut frames = vec![frame(IDENTITY, 1.0), frame(IDENTITY, 1.0)];
        let mut lambda = Vec3::zeros();
        project_bend_twist(&pair, &segs, &mut frames, &BendCompliance::rigid(), &mut lambda);
        assert_eq!(frames[0].rotation, IDENTITY);
        assert_eq!(frames[1].rotation, IDENTITY);
    }

    #[test]
    fn bend_projection_pinned_side_takes_nothing() {
        let (segs, pair) = two_frame_pair(0.1);
        let bent = axis_angle(&vec3(1.0, 0.5, 0.2), 0.4);
        let mut frames = vec![frame(IDENTITY, 0.0), frame(bent, 1.0)];
        let mut lambda = Vec3::zeros();
        project_bend_twist(&pair, &segs, &mut frames, &BendCompliance::rigid(), &mut lambda);
        assert_eq!(frames[0].rotation, IDENTITY);
        assert!((frames[1].rotation - bent).norm() > 1e-3);
    }

    #[test]
    fn bend_projection_converges_to_rest() {
        let (segs, pair) = two_frame_pair(0.1);
        let mut frames = vec![
            frame(axis_angle(&Vec3::y(), -0.1), 3.0),
            frame(axis_angle(&Vec3::x(), 30f64.to_radians()), 1.0),
        ];
        let mut lambda = Vec3::zeros();
        let mut prev = bend_twist_constraint(&pair, &frames[0].rotation, &frames[1].rotation).norm();
        for _ in 0..100 {
            project_bend_twist(&pair, &segs, &mut frames, &BendCompliance::rigid(), &mut lambda);
            let now = bend_twist_constraint(&pair, &frames[0].rotation, &frames[1].rotation).norm();
            assert!(now <= prev + 1e-12);
            prev = now;
        }
        let rel = frames[0].rotation.conjugate() * frames[1].rotation;
        assert!(vector_part(&rel).norm() < 1e-6);
        assert!(rel.w > 0.0);
        for f in &frames {
            assert!((f.rotation.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bend_compliance_uniform_matches_single_element() {
        let (segs, pair) = two_frame_pair(0.05);
        let c = BendCompliance::for_pair(&pair, &segs, 1.0);
        let k = material_to_stiffness(&material(), 0.005).bend;
        assert_relative_eq!(c.alpha.x, 1.0 / (k.x * 0.05), max_relative = 1e-12);
        assert_relative_eq!(c.alpha.z, 1.0 / (k.z * 0.05), max_relative = 1e-12);
    }

    #[test]
    fn validate_rejects_bad_pairs() {
        let (segs, mut pair) = two_frame_pair(0.1);
        let mut state = SimState {
            particles: vec![
                particle(Vec3::zeros(), 1.0),
                particle(vec3(0.0, 0.0, 0.1), 1.0),
                particle(vec3(0.0, 0.0, 0.2), 1.0),
            ],
            orientations: vec![frame(IDENTITY, 1.0), frame(IDENTITY, 1.0)],
            segments: segs,
            bend_pairs: vec![pair.clone()],
            ..Default::default()
        };
        assert!(state.validate().is_ok());
        pair.segment_b = 0;
        state.bend_pairs[0] = pair;
        assert!(state.validate().is_err());
    }
}
