use std::collections::VecDeque;

use super::graph::{OrganAttachment, OrganKind, PlantGraph};
use super::templates::LeafLibrary;
use crate::error::{Error, Result};
use crate::math::{shortest_arc, Quat, Vec3};
use crate::rod::{compute_darboux, director, BendTwistPair, Material, OrientationElement, Particle, RodSegment, SegmentKind};
use crate::solver::SimState;

/// Simulation elements created for one organ.
#[derive(Clone, Debug, PartialEq)]
pub struct OrganInstance {
    pub attachment: OrganAttachment,
    /// Fruit sphere particle.
    pub particle: Option<usize>,
    /// Pedicel segment of a fruit, or the segments of a leaf.
    pub segments: Vec<usize>,
}

struct Expanded {
    positions: Vec<Vec3>,
    radii: Vec<f64>,
    extra_mass: Vec<f64>,
    edges: Vec<(usize, usize, f64, SegmentKind)>,
}

/// Instantiates the rod network of a plant graph. Particle `i` is graph node
/// `i` and segment `k` is graph edge `k`; organ particles and segments
/// follow in organ order.
pub fn build_sim_state(g: &PlantGraph, material: &Material, pins: &[usize], leaves: &LeafLibrary) -> Result<SimState> {
    g.validate_tree()?;
    material.validate()?;
    for &p in pins {
        if p >= g.nodes.len() {
            return Err(Error::InvalidGraph(format!("pinned node {p} does not exist")));
        }
    }

    let mut x = Expanded {
        positions: g.nodes.iter().map(|n| n.position).collect(),
        radii: g.nodes.iter().map(|n| n.radius).collect(),
        extra_mass: vec![0.0; g.nodes.len()],
        edges: g
            .edges
            .iter()
            .map(|e| (e.parent, e.child, 0.5 * (g.nodes[e.parent].radius + g.nodes[e.child].radius), SegmentKind::Branch))
            .collect(),
    };
    let mut instances = Vec::with_capacity(g.organs.len());
    for organ in &g.organs {
        let base = x.positions[organ.node];
        let first_edge = x.edges.len();
        let particle = match &organ.kind {
            OrganKind::Fruit { radius, mass, pedicel_length, pedicel_radius, direction } => {
                let i = x.positions.len();
                x.positions.push(base + direction.normalize() * *pedicel_length);
                x.radii.push(*radius);
                x.extra_mass.push(*mass);
                x.edges.push((organ.node, i, *pedicel_radius, SegmentKind::Pedicel));
                Some(i)
            }
            OrganKind::Leaf { template, scale, direction } => {
                let t = leaves.get(template)?;
                let axis = direction.normalize();
                let mut lateral = Vec3::z().cross(&axis);
                if lateral.norm() < 1e-9 {
                    lateral = Vec3::x().cross(&axis);
                }
                let lateral = lateral.normalize();
                let normal = axis.cross(&lateral);
                let offset = x.positions.len() - 1;
                let index = |k: usize| if k == 0 { organ.node } else { offset + k };
                for p in &t.nodes[1..] {
                    x.positions.push(base + (axis * p.x + lateral * p.y + normal * p.z) * *scale);
                    x.radii.push(t.radius * scale);
                    x.extra_mass.push(0.0);
                }
                for &(a, b) in &t.edges {
                    x.edges.push((index(a), index(b), t.radius * scale, SegmentKind::Leaf));
                }
                None
            }
        };
        instances.push(OrganInstance {
            attachment: organ.clone(),
            particle,
            segments: (first_edge..x.edges.len()).collect(),
        });
    }

    let n = x.positions.len();
    let mut incoming = vec![None; n];
    let mut outgoing = vec![Vec::new(); n];
    for (k, &(p, c, _, _)) in x.edges.iter().enumerate() {
        if incoming[c].is_some() {
            return Err(Error::InvalidGraph(format!("node {c} has two parents")));
        }
        incoming[c] = Some(k);
        outgoing[p].push(k);
    }

    // Rest frames by parallel transport, parents before children.
    let mut rotations: Vec<Option<Quat>> = vec![None; x.edges.len()];
    let mut lengths = vec![0.0; x.edges.len()];
    let mut queue: VecDeque<usize> = outgoing[g.root].iter().copied().collect();
    while let Some(k) = queue.pop_front() {
        let (p, c, _, _) = x.edges[k];
        let v = x.positions[c] - x.positions[p];
        let l = v.norm();
        if !(l > 0.0) {
            return Err(Error::InvalidGraph(format!("edge {p} -> {c} has zero length")));
        }
        let d3 = v / l;
        let q = match incoming[p] {
            None => shortest_arc(&Vec3::z(), &d3, &Vec3::x()),
            Some(pe) => {
                let qp = rotations[pe].expect("parent frame is set first");
                shortest_arc(&director(&qp, 3), &d3, &director(&qp, 1)) * qp
            }
        };
        rotations[k] = Some(crate::math::normalized(q));
        lengths[k] = l;
        queue.extend(outgoing[c].iter().copied());
    }
    if rotations.iter().any(|r| r.is_none()) {
        return Err(Error::InvalidGraph("organ edges are not reachable from the root".into()));
    }

    let root_pinned = pins.contains(&g.root);
    let mut mass = x.extra_mass.clone();
    let mut segments = Vec::with_capacity(x.edges.len());
    let mut orientations = Vec::with_capacity(x.edges.len());
    for (k, &(p, c, radius, kind)) in x.edges.iter().enumerate() {
        let l = lengths[k];
        let m = material.density * std::f64::consts::PI * radius * radius * l;
        mass[p] += 0.5 * m;
        mass[c] += 0.5 * m;
        let i_perp = m * (3.0 * radius * radius + l * l) / 12.0;
        let i_axial = 0.5 * m * radius * radius;
        let pinned = root_pinned && p == g.root;
        orientations.push(OrientationElement {
            rotation: rotations[k].unwrap(),
            angular_velocity: Vec3::zeros(),
            inverse_inertia: if pinned { Vec3::zeros() } else { Vec3::new(1.0 / i_perp, 1.0 / i_perp, 1.0 / i_axial) },
        });
        segments.push(RodSegment {
            particle_a: p,
            particle_b: c,
            orientation: k,
            rest_length: l,
            radius,
            material: *material,
            kind,
            alive: true,
        });
    }

    let particles = (0..n)
        .map(|i| Particle {
            position: x.positions[i],
            velocity: Vec3::zeros(),
            inverse_mass: if pins.contains(&i) || !(mass[i] > 0.0) { 0.0 } else { 1.0 / mass[i] },
            radius: x.radii[i],
        })
        .collect();

    let mut bend_pairs = Vec::new();
    for (k, &(p, _, _, _)) in x.edges.iter().enumerate() {
        if let Some(pe) = incoming[p] {
            let mean = 0.5 * (lengths[pe] + lengths[k]);
            let rest = compute_darboux(&orientations[pe].rotation, &orientations[k].rotation, mean)?;
            bend_pairs.push(BendTwistPair { segment_a: pe, segment_b: k, mean_length: mean, rest_darboux: rest, alive: true });
        }
    }

    let spheres = instances.iter().filter_map(|o| o.particle).collect();
    Ok(SimState {
        particles,
        orientations,
        segments,
        bend_pairs,
        attachments: instances,
        spheres,
        time: 0.0,
        step_index: 0,
    })
}
