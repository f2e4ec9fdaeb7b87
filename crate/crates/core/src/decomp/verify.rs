//! Decomposition verifier: simplicity, structural bounds, and the
//! path-convexity oracle on projected regions.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dist::{bfs, UNREACHED};
use crate::grid::{GridGraph, NodeId};
use crate::holes::inner_hole_count;

use super::Decomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyDepth {
    /// Exhaustive pairs for regions up to 400 nodes, otherwise sampled.
    Standard { sampled_pairs: usize, seed: u64 },
    Off,
}

impl Default for VerifyDepth {
    fn default() -> Self {
        VerifyDepth::Standard { sampled_pairs: 2000, seed: 0x5eed }
    }
}

pub const EXHAUSTIVE_REGION_LIMIT: usize = 400;

#[derive(Debug, Clone, Default, Serialize)]
pub struct DecompReport {
    pub regions: usize,
    pub inner_holes: usize,
    /// Regions with a nonzero inner hole count.
    pub non_simple_regions: Vec<NodeId>,
    /// Region ids with a duplicated projected position.
    pub duplicated_position_regions: Vec<NodeId>,
    /// Region ids where the projected induced subgraph has edges the
    /// virtual region lacks.
    pub projection_mismatch_regions: Vec<NodeId>,
    /// (region id, u, v, d_region, d_gamma) for detected violations.
    pub convexity_violations: Vec<(NodeId, NodeId, NodeId, u32, u32)>,
    pub pairs_checked: usize,
    /// regions / max(1, |H|)
    pub regions_per_hole: f64,
    pub max_gates_per_region: usize,
}

impl DecompReport {
    pub fn passed(&self) -> bool {
        self.non_simple_regions.is_empty()
            && self.duplicated_position_regions.is_empty()
            && self.projection_mismatch_regions.is_empty()
            && self.convexity_violations.is_empty()
    }
}

/// Checks every region of the decomposition: zero inner holes, one copy per
/// position, virtual/projected agreement, and path-convexity
/// (d_{Gamma[R]}(u,v) == d_Gamma(u,v)) with exhaustive pairs for small
/// regions and seeded samples for large ones.
pub fn verify_decomposition(d: &Decomposition, depth: VerifyDepth) -> DecompReport {
    let mut report = DecompReport {
        regions: d.regions.len(),
        inner_holes: d.inner_holes,
        regions_per_hole: d.regions.len() as f64 / d.inner_holes.max(1) as f64,
        max_gates_per_region: d.regions.iter().map(|r| r.gates.len()).max().unwrap_or(0),
        ..Default::default()
    };
    let (sampled_pairs, seed) = match depth {
        VerifyDepth::Standard { sampled_pairs, seed } => (sampled_pairs, seed),
        VerifyDepth::Off => (0, 0),
    };

    for region in &d.regions {
        let (sub, _) = d.graph.subgraph(&region.nodes);
        if inner_hole_count(&sub) != 0 {
            report.non_simple_regions.push(region.id);
        }

        let projected = d.projected(region.index);
        if projected.len() != region.nodes.len() {
            report.duplicated_position_regions.push(region.id);
        }
        let induced_edges = induced_edge_count(&d.base, &projected);
        if induced_edges != sub.edge_count() {
            report.projection_mismatch_regions.push(region.id);
        }

        if matches!(depth, VerifyDepth::Off) {
            continue;
        }
        let pairs = region_pairs(&projected, sampled_pairs, seed ^ region.id as u64);
        let mut dist_cache: Option<(NodeId, Vec<u32>, Vec<u32>)> = None;
        for (u, v) in pairs {
            report.pairs_checked += 1;
            let needs = dist_cache.as_ref().map_or(true, |(s, _, _)| *s != u);
            if needs {
                let in_region = restricted_bfs(&d.base, &projected, u);
                let in_gamma = bfs(&d.base, u);
                dist_cache = Some((u, in_region, in_gamma));
            }
            let (_, in_region, in_gamma) = dist_cache.as_ref().unwrap();
            let dr = in_region[v];
            let dg = in_gamma[v];
            if dr != dg {
                report.convexity_violations.push((
                    region.id,
                    u,
                    v,
                    if dr == UNREACHED { u32::MAX } else { dr },
                    dg,
                ));
                if report.convexity_violations.len() > 32 {
                    return report;
                }
            }
        }
    }
    report
}

fn region_pairs(projected: &[NodeId], sampled: usize, seed: u64) -> Vec<(NodeId, NodeId)> {
    let n = projected.len();
    if n <= EXHAUSTIVE_REGION_LIMIT {
        let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((projected[i], projected[j]));
            }
        }
        // Group by source so the BFS cache hits.
        return pairs;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sources: Vec<NodeId> = projected.to_vec();
    sources.shuffle(&mut rng);
    let source_count = (sampled / 50).clamp(1, sources.len());
    let mut pairs = Vec::with_capacity(sampled);
    'outer: for &u in sources.iter().take(source_count) {
        for _ in 0..sampled / source_count {
            let &v = projected.choose(&mut rng).unwrap();
            if v != u {
                pairs.push((u, v));
            }
            if pairs.len() >= sampled {
                break 'outer;
            }
        }
    }
    pairs
}

/// BFS in the base graph restricted to the projected node set.
fn restricted_bfs(base: &GridGraph, allowed: &[NodeId], source: NodeId) -> Vec<u32> {
    let mut ok = vec![false; base.id_bound()];
    for &v in allowed {
        ok[v] = true;
    }
    let mut dist = vec![UNREACHED; base.id_bound()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for w in base.neighbors(v) {
            if ok[w] && dist[w] == UNREACHED {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn induced_edge_count(base: &GridGraph, nodes: &[NodeId]) -> usize {
    let mut ok = vec![false; base.id_bound()];
    for &v in nodes {
        ok[v] = true;
    }
    nodes
        .iter()
        .map(|&v| base.neighbors(v).filter(|&w| ok[w]).count())
        .sum::<usize>()
        / 2
}
