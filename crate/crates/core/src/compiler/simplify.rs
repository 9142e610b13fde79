use super::graph::{PlantEdge, PlantGraph};

/// Relative slack on the spacing test so that chains sampled at exactly
/// `sigma_distance / k` keep every k-th node despite rounding.
const SPACING_TOLERANCE: f64 = 1e-9;

/// Reduces a dense tree to nodes spaced about `sigma_distance` apart along
/// each branch path.
///
/// A depth-first walk from the root keeps a node once its path distance to
/// the last kept ancestor reaches `sigma_distance`. Junctions and tips are
/// always kept; when one lands closer than half the spacing to a kept
/// ancestor that is not itself a junction or tip, that ancestor is dropped.
/// Output nodes are numbered in depth-first preorder (root = 0), so edge `k`
/// ends at node `k + 1`. Edge lengths accumulate the replaced path lengths.
pub fn simplify(tree: &PlantGraph, sigma_distance: f64) -> PlantGraph {
    assert!(sigma_distance > 0.0, "sigma_distance must be positive");
    let n = tree.nodes.len();
    let adj = tree.adjacency();
    let is_key = |u: usize| u == tree.root || adj[u].len() != 2;
    let threshold = sigma_distance * (1.0 - SPACING_TOLERANCE);

    // kept_parent[u]: kept ancestor of a kept node u, with the path distance.
    let mut kept: Vec<Option<(usize, f64)>> = vec![None; n];
    let mut order = Vec::new();
    kept[tree.root] = Some((usize::MAX, 0.0));
    order.push(tree.root);

    // (node, came_from, kept ancestor, distance to it)
    let mut stack = vec![(tree.root, usize::MAX, tree.root, 0.0)];
    while let Some((u, from, anchor, d)) = stack.pop() {
        let mut next_anchor = anchor;
        let mut next_d = d;
        if u != tree.root {
            if is_key(u) {
                let mut parent = (anchor, d);
                if d < 0.5 * sigma_distance && !is_key(anchor) {
                    let (grand, d_anchor) = kept[anchor].expect("anchor is kept");
                    kept[anchor] = None;
                    parent = (grand, d_anchor + d);
                }
                kept[u] = Some(parent);
                order.push(u);
                next_anchor = u;
                next_d = 0.0;
            } else if d >= threshold {
                kept[u] = Some((anchor, d));
                order.push(u);
                next_anchor = u;
                next_d = 0.0;
            }
        }
        // Reverse so the lowest-index child is walked first.
        for &(v, len) in adj[u].iter().rev() {
            if v != from {
                stack.push((v, u, next_anchor, next_d + len));
            }
        }
    }

    let order: Vec<usize> = order.into_iter().filter(|&u| kept[u].is_some()).collect();
    let mut new_index = vec![usize::MAX; n];
    for (i, &u) in order.iter().enumerate() {
        new_index[u] = i;
    }
    let nodes = order
        .iter()
        .map(|&u| (tree.nodes[u].position, tree.nodes[u].radius))
        .collect();
    let edges = order
        .iter()
        .skip(1)
        .map(|&u| {
            let (p, d) = kept[u].unwrap();
            PlantEdge { parent: new_index[p], child: new_index[u], length: d }
        })
        .collect();
    let mut g = PlantGraph::new(nodes, edges, 0);
    g.organs = tree
        .organs
        .iter()
        .filter_map(|o| {
            let node = if kept[o.node].is_some() {
                new_index[o.node]
            } else {
                g.nearest_node(&tree.nodes[o.node].position)?
            };
            Some(super::graph::OrganAttachment { node, kind: o.kind.clone() })
        })
        .collect();
    g
}
