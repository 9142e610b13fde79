//! Plant compiler: drawn branch curves to a simplified rod graph, and the
//! rod graph to a simulation state.
//!
//! The pipeline is `sample_curves` → `connect_branches` → `simplify` →
//! organ placement → `build_sim_state`.

pub mod build;
pub mod connect;
pub mod curves;
pub mod graph;
pub mod simplify;
pub mod templates;

pub use build::{build_sim_state, OrganInstance};
pub use connect::connect_branches;
pub use curves::{sample_curves, Curve, CurveEnd, CurveSet, Sample, SampledCurves};
pub use graph::{NodeFlags, OrganAttachment, OrganKind, PlantEdge, PlantGraph, PlantNode};
pub use simplify::simplify;
pub use templates::{LeafLibrary, LeafTemplate};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompilerParams {
    /// Curve sampling step, m.
    pub step: f64,
    pub sigma_connect: f64,
    pub sigma_distance: f64,
}

impl CompilerParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("step", self.step), ("sigma_connect", self.sigma_connect), ("sigma_distance", self.sigma_distance)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

fn down() -> Vec3 {
    Vec3::new(0.0, 0.0, -1.0)
}

fn one() -> f64 {
    1.0
}

/// Organ placed by position; it attaches to the nearest graph node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OrganSpec {
    Fruit {
        at: Vec3,
        radius: f64,
        mass: f64,
        pedicel_length: f64,
        pedicel_radius: f64,
        #[serde(default = "down")]
        direction: Vec3,
    },
    Leaf {
        at: Vec3,
        template: String,
        #[serde(default = "one")]
        scale: f64,
        direction: Vec3,
    },
}

impl OrganSpec {
    pub fn at(&self) -> Vec3 {
        match self {
            OrganSpec::Fruit { at, .. } | OrganSpec::Leaf { at, .. } => *at,
        }
    }

    pub fn kind(&self) -> OrganKind {
        match self.clone() {
            OrganSpec::Fruit { radius, mass, pedicel_length, pedicel_radius, direction, .. } => {
                OrganKind::Fruit { radius, mass, pedicel_length, pedicel_radius, direction }
            }
            OrganSpec::Leaf { template, scale, direction, .. } => OrganKind::Leaf { template, scale, direction },
        }
    }
}

pub fn attach_organs(g: &mut PlantGraph, organs: &[OrganSpec]) -> Result<()> {
    for o in organs {
        let node = g
            .nearest_node(&o.at())
            .ok_or_else(|| Error::InvalidGraph("cannot attach organs to an empty graph".into()))?;
        let a = OrganAttachment { node, kind: o.kind() };
        a.validate(g.nodes.len())?;
        g.organs.push(a);
    }
    Ok(())
}

/// Compiled plant together with the warnings raised on the way.
#[derive(Clone, Debug)]
pub struct CompiledPlant {
    pub graph: PlantGraph,
    pub dense_nodes: usize,
    pub warnings: Vec<String>,
}

/// Runs sampling, branch joining, simplification and organ placement.
pub fn compile_plant(curves: &CurveSet, params: &CompilerParams, organs: &[OrganSpec]) -> Result<CompiledPlant> {
    params.validate()?;
    let samples = sample_curves(curves, params.step)?;
    let tree = connect_branches(&samples, params.sigma_connect)?;
    let mut graph = simplify(&tree, params.sigma_distance);
    attach_organs(&mut graph, organs)?;
    Ok(CompiledPlant { graph, dense_nodes: tree.nodes.len(), warnings: samples.warnings })
}

/// Graph node closest to `p` (used to designate pins and tips by position).
pub fn node_near(g: &PlantGraph, p: &Vec3) -> Option<usize> {
    g.nearest_node(p)
}
