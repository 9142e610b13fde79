use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::Vec3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NodeFlags {
    pub key: bool,
    pub junction: bool,
    pub leaf_node: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlantNode {
    pub position: Vec3,
    pub radius: f64,
    pub flags: NodeFlags,
}

/// Root-oriented tree edge. `length` is the path length along the drawn
/// curve that the edge replaces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlantEdge {
    pub parent: usize,
    pub child: usize,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OrganKind {
    Fruit {
        radius: f64,
        /// kg.
        mass: f64,
        pedicel_length: f64,
        pedicel_radius: f64,
        /// Direction from the node to the fruit centre.
        direction: Vec3,
    },
    Leaf {
        template: String,
        scale: f64,
        /// Main leaf axis.
        direction: Vec3,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrganAttachment {
    pub node: usize,
    pub kind: OrganKind,
}

impl OrganAttachment {
    pub fn validate(&self, node_count: usize) -> Result<()> {
        if self.node >= node_count {
            return Err(Error::InvalidGraph(format!("organ attached to missing node {}", self.node)));
        }
        let ok = match &self.kind {
            OrganKind::Fruit { radius, mass, pedicel_length, pedicel_radius, direction } => {
                *radius > 0.0 && *mass >= 0.0 && *pedicel_length > 0.0 && *pedicel_radius > 0.0 && direction.norm() > 0.0
            }
            OrganKind::Leaf { scale, direction, .. } => *scale > 0.0 && direction.norm() > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidGraph(format!("organ on node {} has invalid dimensions", self.node)))
        }
    }
}

/// Tree of nodes and root-oriented edges with organ attachments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlantGraph {
    pub nodes: Vec<PlantNode>,
    pub edges: Vec<PlantEdge>,
    pub root: usize,
    pub organs: Vec<OrganAttachment>,
}

impl PlantGraph {
    /// Builds a graph and derives the node flags from the edge degrees.
    pub fn new(positions: Vec<(Vec3, f64)>, edges: Vec<PlantEdge>, root: usize) -> Self {
        let mut g = PlantGraph {
            nodes: positions
                .into_iter()
                .map(|(position, radius)| PlantNode { position, radius, flags: NodeFlags::default() })
                .collect(),
            edges,
            root,
            organs: Vec::new(),
        };
        g.refresh_flags();
        g
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for e in &self.edges {
            deg[e.parent] += 1;
            deg[e.child] += 1;
        }
        deg
    }

    pub fn refresh_flags(&mut self) {
        let deg = self.degrees();
        for (n, d) in self.nodes.iter_mut().zip(deg) {
            n.flags.junction = d > 2;
            n.flags.leaf_node = d == 1;
            n.flags.key = n.flags.junction || n.flags.leaf_node;
        }
    }

    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.parent].push((e.child, e.length));
            adj[e.child].push((e.parent, e.length));
        }
        for a in adj.iter_mut() {
            a.sort_by(|x, y| x.0.cmp(&y.0));
        }
        adj
    }

    /// Incoming edge index per node (None for the root).
    pub fn parent_edges(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            p[e.child] = Some(i);
        }
        p
    }

    /// Checks that the edges form a root-oriented tree spanning every node.
    pub fn validate_tree(&self) -> Result<()> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        if self.root >= n {
            return Err(Error::InvalidGraph(format!("root {} out of range", self.root)));
        }
        if self.edges.len() != n - 1 {
            return Err(Error::InvalidGraph(format!("{} edges for {} nodes is not a tree", self.edges.len(), n)));
        }
        let mut has_parent = vec![false; n];
        for e in &self.edges {
            if e.parent >= n || e.child >= n || e.parent == e.child {
                return Err(Error::InvalidGraph(format!("bad edge {e:?}")));
            }
            if e.child == self.root || has_parent[e.child] {
                return Err(Error::InvalidGraph(format!("node {} has two parents", e.child)));
            }
            has_parent[e.child] = true;
        }
        if self.connected_count() != n {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        if n > 1 && self.degrees()[self.root] == 0 {
            return Err(Error::InvalidGraph("root is isolated".into()));
        }
        for o in &self.organs {
            o.validate(n)?;
        }
        Ok(())
    }

    /// Number of nodes reachable from the root, ignoring edge direction.
    pub fn connected_count(&self) -> usize {
        let adj = self.adjacency();
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        let mut count = 0;
        while let Some(u) = stack.pop() {
            count += 1;
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        count
    }

    /// Index of the node closest to `p`; ties go to the lower index.
    pub fn nearest_node(&self, p: &Vec3) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, n) in self.nodes.iter().enumerate() {
            let d = (n.position - p).norm_squared();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }
}
