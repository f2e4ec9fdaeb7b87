//! Exact SSSP and SPSP on simple grid graphs via the two portal trees.
//!
//! Distances split into a horizontal part (tree distance in the vertical
//! portal graph) and a vertical part (tree distance in the horizontal portal
//! graph); their sum is the hop distance when the graph is simple. The tree
//! searches are evaluated by direct traversal; the distributed substrate
//! they stand in for is charged in the round ledger by the caller.

use std::collections::VecDeque;

use crate::error::SsspError;
use crate::grid::{GridGraph, NodeId, Orientation, Portals};

/// Portal graph: one vertex per portal, edges between adjacent portals with
/// a designated crossing edge each.
#[derive(Debug, Clone)]
pub struct PortalGraph {
    pub orientation: Orientation,
    pub portals: Portals,
    /// Adjacency: per portal, (neighbor portal, designated crossing edge).
    pub adj: Vec<Vec<(usize, (NodeId, NodeId))>>,
    pub edge_count: usize,
}

impl PortalGraph {
    /// Builds the portal graph of the given orientation and verifies it is a
    /// tree (which holds exactly when the graph is simple and connected).
    pub fn build(g: &GridGraph, orientation: Orientation) -> Result<PortalGraph, SsspError> {
        let portals = g.portals(orientation);
        let cross = orientation.along().clockwise(); // east for vertical portals
        let mut adj: Vec<Vec<(usize, (NodeId, NodeId))>> = vec![Vec::new(); portals.count()];
        // Designated crossing edge per adjacent pair: bottommost, then
        // leftmost (in walk order along the portal the first encountered
        // candidate is the one with the smallest coordinate).
        let mut edge_count = 0;
        for (pi, members) in portals.members.iter().enumerate() {
            for &v in members {
                if let Some(w) = g.neighbor(v, cross) {
                    let qi = portals.of_node(w);
                    if !adj[pi].iter().any(|&(other, _)| other == qi) {
                        adj[pi].push((qi, (v, w)));
                        adj[qi].push((pi, (w, v)));
                        edge_count += 1;
                    }
                }
            }
        }
        if edge_count + 1 != portals.count() {
            return Err(SsspError::NotATree { orientation });
        }
        Ok(PortalGraph { orientation, portals, adj, edge_count })
    }

    /// BFS over the portal tree from several source portals.
    pub fn tree_dist(&self, sources: &[usize]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.portals.count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == u32::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(p) = queue.pop_front() {
            for &(q, _) in &self.adj[p] {
                if dist[q] == u32::MAX {
                    dist[q] = dist[p] + 1;
                    queue.push_back(q);
                }
            }
        }
        dist
    }
}

/// Builds both portal graphs of a simple region.
pub fn build_portal_graphs(g: &GridGraph) -> Result<(PortalGraph, PortalGraph), SsspError> {
    let pv = PortalGraph::build(g, Orientation::Vertical)?;
    let ph = PortalGraph::build(g, Orientation::Horizontal)?;
    Ok((pv, ph))
}

/// Directional distance of every node's portal to the source's portal in
/// the 0/1-weighted subgraph (realized as tree distance in the portal
/// graph). For a vertical portal graph this is the horizontal distance.
pub fn tree_sssp(g: &GridGraph, pg: &PortalGraph, source: NodeId) -> Vec<u32> {
    let pd = pg.tree_dist(&[pg.portals.of_node(source)]);
    per_node(g, pg, &pd)
}

fn per_node(g: &GridGraph, pg: &PortalGraph, portal_dist: &[u32]) -> Vec<u32> {
    let mut out = vec![u32::MAX; g.id_bound()];
    for v in g.alive_ids() {
        out[v] = portal_dist[pg.portals.of_node(v)];
    }
    out
}

#[derive(Debug, Clone)]
pub struct SsspSolution {
    pub source: NodeId,
    pub d: Vec<u32>,
    /// Horizontal part (from the vertical portal tree).
    pub d_x: Vec<u32>,
    /// Vertical part (from the horizontal portal tree).
    pub d_y: Vec<u32>,
    pub pred: Vec<Option<NodeId>>,
}

/// Solves SSSP on a simple grid graph by combining the two portal-tree
/// searches.
pub fn sssp(g: &GridGraph, source: NodeId) -> Result<SsspSolution, SsspError> {
    let (pv, ph) = build_portal_graphs(g)?;
    let d_x = tree_sssp(g, &pv, source);
    let d_y = tree_sssp(g, &ph, source);
    let mut d = vec![u32::MAX; g.id_bound()];
    for v in g.alive_ids() {
        d[v] = d_x[v] + d_y[v];
    }
    let pred = predecessors(g, &d, &[source]);
    Ok(SsspSolution { source, d, d_x, d_y, pred })
}

#[derive(Debug, Clone)]
pub struct SpspSolution {
    /// The portal's node set.
    pub portal: Vec<NodeId>,
    pub d: Vec<u32>,
    pub d_x: Vec<u32>,
    pub d_y: Vec<u32>,
    /// Next hop towards the portal (None on the portal itself).
    pub next_hop: Vec<Option<NodeId>>,
    /// Entry point on the portal reached by following next hops.
    pub entry: Vec<Option<NodeId>>,
}

/// Single-portal shortest paths: distance of every node to the straight
/// node set `portal`, with the shortest-path tree rooted at it. Edges
/// within the portal are free, per the stated reduction.
pub fn spsp(g: &GridGraph, portal: &[NodeId]) -> Result<SpspSolution, SsspError> {
    let (pv, ph) = build_portal_graphs(g)?;
    spsp_with(g, &pv, &ph, portal)
}

/// SPSP reusing prebuilt portal graphs (the region pipeline runs many
/// portal searches per region).
pub fn spsp_with(
    g: &GridGraph,
    pv: &PortalGraph,
    ph: &PortalGraph,
    portal: &[NodeId],
) -> Result<SpspSolution, SsspError> {
    let mut vsrc: Vec<usize> = portal.iter().map(|&p| pv.portals.of_node(p)).collect();
    let mut hsrc: Vec<usize> = portal.iter().map(|&p| ph.portals.of_node(p)).collect();
    vsrc.sort_unstable();
    vsrc.dedup();
    hsrc.sort_unstable();
    hsrc.dedup();
    let d_x = per_node(g, pv, &pv.tree_dist(&vsrc));
    let d_y = per_node(g, ph, &ph.tree_dist(&hsrc));
    let mut d = vec![u32::MAX; g.id_bound()];
    for v in g.alive_ids() {
        d[v] = d_x[v] + d_y[v];
    }
    let mut on_portal = vec![false; g.id_bound()];
    for &p in portal {
        on_portal[p] = true;
        debug_assert_eq!(d[p], 0, "portal nodes are at distance zero");
    }

    // Next hops: any neighbor one closer; ties prefer vertical moves, then
    // the smaller neighbor id.
    let mut next_hop = vec![None; g.id_bound()];
    for v in g.alive_ids() {
        if on_portal[v] {
            continue;
        }
        let mut best: Option<NodeId> = None;
        let mut best_key = (2u8, NodeId::MAX);
        for (dir, w) in g.neighbors_with_dir(v) {
            if d[w] + 1 != d[v] {
                continue;
            }
            let key = (if dir.is_vertical() { 0u8 } else { 1 }, w);
            if key < best_key {
                best_key = key;
                best = Some(w);
            }
        }
        debug_assert!(best.is_some(), "off-portal node must have a closer neighbor");
        next_hop[v] = best;
    }

    // Entry points, resolved in ascending distance order.
    let mut order: Vec<NodeId> = g.alive_ids().collect();
    order.sort_unstable_by_key(|&v| d[v]);
    let mut entry = vec![None; g.id_bound()];
    for v in order {
        entry[v] = if on_portal[v] { Some(v) } else { next_hop[v].and_then(|w| entry[w]) };
    }

    Ok(SpspSolution { portal: portal.to_vec(), d, d_x, d_y, next_hop, entry })
}

fn predecessors(g: &GridGraph, d: &[u32], sources: &[NodeId]) -> Vec<Option<NodeId>> {
    let mut pred = vec![None; g.id_bound()];
    for v in g.alive_ids() {
        if sources.contains(&v) {
            continue;
        }
        pred[v] = g
            .neighbors_with_dir(v)
            .filter(|&(_, w)| d[w] + 1 == d[v])
            .map(|(dir, w)| (if dir.is_vertical() { 0u8 } else { 1 }, w))
            .min()
            .map(|(_, w)| w);
        debug_assert!(pred[v].is_some(), "every non-source node has a predecessor");
    }
    pred
}
