use std::collections::VecDeque;

use super::curves::SampledCurves;
use super::graph::{PlantEdge, PlantGraph};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Link {
    distance: f64,
    /// Sample on the curve that is already in the tree.
    from: usize,
    /// Sample on the newly reached curve.
    to: usize,
}

/// For each sample, the nearest endpoint of another curve strictly closer
/// than `sigma_connect`. Ties go to the lower curve index, then the start
/// endpoint.
fn candidate_links(s: &SampledCurves, sigma_connect: f64) -> Vec<Option<(usize, f64)>> {
    let ends: Vec<(usize, usize)> =
        (0..s.curve_count()).flat_map(|c| s.endpoints(c).map(|e| (c, e))).collect();
    s.samples
        .iter()
        .map(|u| {
            let mut best: Option<(usize, f64)> = None;
            for &(c, e) in &ends {
                if c == u.curve {
                    continue;
                }
                let d = (s.samples[e].position - u.position).norm();
                if d < sigma_connect && best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((e, d));
                }
            }
            best
        })
        .collect()
}

/// Joins the sampled curves into one tree rooted at the designated root
/// sample. Curves are reached breadth first; a newly reached curve hangs off
/// its shortest candidate link to the curve it was reached from. Node `i` of
/// the result is sample `i`.
pub fn connect_branches(s: &SampledCurves, sigma_connect: f64) -> Result<PlantGraph> {
    if !(sigma_connect > 0.0) {
        return Err(Error::Config(format!("sigma_connect must be > 0, got {sigma_connect}")));
    }
    let nc = s.curve_count();
    let candidates = candidate_links(s, sigma_connect);
    // links[p][c]: best link from curve p (in tree) to curve c.
    let mut links: Vec<Vec<Option<Link>>> = vec![vec![None; nc]; nc];
    let mut offer = |p: usize, c: usize, link: Link| {
        let slot = &mut links[p][c];
        let better = match slot {
            None => true,
            Some(old) => (link.distance, link.from, link.to) < (old.distance, old.from, old.to),
        };
        if better {
            *slot = Some(link);
        }
    };
    for (u, cand) in candidates.iter().enumerate() {
        if let Some((e, d)) = *cand {
            let (cu, ce) = (s.samples[u].curve, s.samples[e].curve);
            offer(cu, ce, Link { distance: d, from: u, to: e });
            offer(ce, cu, Link { distance: d, from: e, to: u });
        }
    }

    let root_curve = s.samples[s.root_sample].curve;
    let mut reached = vec![false; nc];
    let mut edges = Vec::with_capacity(s.samples.len().saturating_sub(1));
    let mut queue = VecDeque::new();
    reached[root_curve] = true;
    chain_edges(s, root_curve, s.root_sample, &mut edges);
    queue.push_back(root_curve);
    while let Some(p) = queue.pop_front() {
        for c in 0..nc {
            if reached[c] {
                continue;
            }
            if let Some(link) = links[p][c] {
                reached[c] = true;
                edges.push(PlantEdge { parent: link.from, child: link.to, length: link.distance });
                chain_edges(s, c, link.to, &mut edges);
                queue.push_back(c);
            }
        }
    }
    let missing: Vec<usize> = (0..nc).filter(|&c| !reached[c]).collect();
    if !missing.is_empty() {
        return Err(Error::DisconnectedPlant { curves: missing });
    }
    let nodes = s.samples.iter().map(|x| (x.position, x.radius)).collect();
    Ok(PlantGraph::new(nodes, edges, s.root_sample))
}

/// Chain edges of one curve oriented away from `entry`.
fn chain_edges(s: &SampledCurves, curve: usize, entry: usize, edges: &mut Vec<PlantEdge>) {
    let (a, b) = s.ranges[curve];
    let mut push = |p: usize, c: usize| {
        let length = (s.samples[c].position - s.samples[p].position).norm();
        edges.push(PlantEdge { parent: p, child: c, length });
    };
    for i in entry + 1..b {
        push(i - 1, i);
    }
    for i in (a..entry).rev() {
        push(i + 1, i);
    }
}
