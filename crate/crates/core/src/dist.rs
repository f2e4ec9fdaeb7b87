//! Exact distance oracles and the path lemma toolkit.
//!
//! These are the independent reference implementations (plain BFS and 0/1
//! deque BFS) that the portal-tree machinery in `sssp` is checked against.

use std::collections::VecDeque;

use crate::error::GridError;
use crate::grid::{Dir, GridGraph, NodeId, Orientation};

pub const UNREACHED: u32 = u32::MAX;

/// Hop, horizontal and vertical distances between a node pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistTriple {
    pub d: u32,
    pub d_x: u32,
    pub d_y: u32,
}

/// BFS hop distances from `source` over alive nodes. Unreachable nodes get
/// `UNREACHED`.
pub fn bfs(g: &GridGraph, source: NodeId) -> Vec<u32> {
    bfs_multi(g, std::slice::from_ref(&source))
}

/// Multi-source BFS; all sources start at distance 0.
pub fn bfs_multi(g: &GridGraph, sources: &[NodeId]) -> Vec<u32> {
    let mut dist = vec![UNREACHED; g.id_bound()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] == UNREACHED {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if dist[w] == UNREACHED {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// 0/1 deque BFS where edges of `weighted` orientation cost 1 and the
/// perpendicular ones cost 0. With `weighted = Horizontal` this yields the
/// minimum number of horizontal hops, i.e. `d_x`.
pub fn bfs01(g: &GridGraph, sources: &[NodeId], weighted: Orientation) -> Vec<u32> {
    let mut dist = vec![UNREACHED; g.id_bound()];
    let mut deque = VecDeque::new();
    for &s in sources {
        if dist[s] == UNREACHED {
            dist[s] = 0;
            deque.push_back(s);
        }
    }
    while let Some(v) = deque.pop_front() {
        let dv = dist[v];
        for (dir, w) in g.neighbors_with_dir(v) {
            let cost = if dir.orientation() == weighted { 1 } else { 0 };
            let nd = dv + cost;
            if nd < dist[w] {
                dist[w] = nd;
                if cost == 0 {
                    deque.push_front(w);
                } else {
                    deque.push_back(w);
                }
            }
        }
    }
    dist
}

/// Exact (d, d_x, d_y) between two nodes via BFS and two 0/1 searches.
pub fn dist_oracle(g: &GridGraph, s: NodeId, t: NodeId) -> Result<DistTriple, GridError> {
    let d = bfs(g, s)[t];
    if d == UNREACHED {
        return Err(GridError::Unreachable(t));
    }
    let d_x = bfs01(g, &[s], Orientation::Horizontal)[t];
    let d_y = bfs01(g, &[s], Orientation::Vertical)[t];
    Ok(DistTriple { d, d_x, d_y })
}

/// A walk in the grid graph, stored as the visited node sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridPath {
    pub nodes: Vec<NodeId>,
}

impl GridPath {
    pub fn new(nodes: Vec<NodeId>) -> Self {
        GridPath { nodes }
    }

    /// Total number of hops.
    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> Option<NodeId> {
        self.nodes.first().copied()
    }

    pub fn end(&self) -> Option<NodeId> {
        self.nodes.last().copied()
    }

    pub fn dirs(&self, g: &GridGraph) -> Vec<Dir> {
        self.nodes
            .windows(2)
            .map(|w| {
                let (p, q) = (g.pos(w[0]), g.pos(w[1]));
                match (q.x - p.x, q.y - p.y) {
                    (0, 1) => Dir::North,
                    (1, 0) => Dir::East,
                    (0, -1) => Dir::South,
                    (-1, 0) => Dir::West,
                    _ => panic!("non-unit step in grid path"),
                }
            })
            .collect()
    }

    /// Number of horizontal hops.
    pub fn len_x(&self, g: &GridGraph) -> usize {
        self.dirs(g).iter().filter(|d| !d.is_vertical()).count()
    }

    /// Number of vertical hops.
    pub fn len_y(&self, g: &GridGraph) -> usize {
        self.dirs(g).iter().filter(|d| d.is_vertical()).count()
    }

    /// Concatenates `self` (u..v) with `other` (v..w).
    pub fn compose(&self, other: &GridPath) -> Result<GridPath, GridError> {
        match (self.end(), other.start()) {
            (Some(a), Some(b)) if a == b => {
                let mut nodes = self.nodes.clone();
                nodes.extend_from_slice(&other.nodes[1..]);
                Ok(GridPath::new(nodes))
            }
            _ => Err(GridError::NonIncidentComposition),
        }
    }

    /// True iff at most one horizontal and at most one vertical direction
    /// is used.
    pub fn is_monotonous(&self, g: &GridGraph) -> bool {
        let dirs = self.dirs(g);
        let h: Vec<_> = dirs.iter().filter(|d| !d.is_vertical()).collect();
        let v: Vec<_> = dirs.iter().filter(|d| d.is_vertical()).collect();
        h.windows(2).all(|w| w[0] == w[1]) && v.windows(2).all(|w| w[0] == w[1])
    }

    /// Checks that consecutive nodes are joined by alive edges.
    pub fn is_valid_walk(&self, g: &GridGraph) -> bool {
        self.nodes.windows(2).all(|w| g.neighbors(w[0]).any(|x| x == w[1]))
    }
}

/// Every cycle in a grid graph has even length; equivalently the parity
/// coloring by x+y is proper. Returns true when the invariant holds.
pub fn check_even_cycles(g: &GridGraph) -> bool {
    g.alive_ids().all(|v| {
        let p = g.pos(v);
        g.neighbors(v).all(|w| {
            let q = g.pos(w);
            (p.x + p.y).rem_euclid(2) != (q.x + q.y).rem_euclid(2)
        })
    })
}

/// Verifies that for every node v and neighbor v', |d(v,w) - d(v',w)| = 1.
pub fn check_neighbor_distances(g: &GridGraph, w: NodeId) -> bool {
    let dist = bfs(g, w);
    g.alive_ids().all(|v| {
        g.neighbors(v).all(|u| {
            dist[v] != UNREACHED
                && dist[u] != UNREACHED
                && (dist[v] as i64 - dist[u] as i64).abs() == 1
        })
    })
}

/// Enumerates all shortest s-t paths (as node sequences). Intended for tiny
/// oracle instances only.
pub fn all_shortest_paths(g: &GridGraph, s: NodeId, t: NodeId) -> Vec<GridPath> {
    let dist = bfs(g, s);
    if dist[t] == UNREACHED {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut stack = vec![t];
    collect_paths(g, &dist, s, &mut stack, &mut out);
    out
}

fn collect_paths(
    g: &GridGraph,
    dist: &[u32],
    s: NodeId,
    stack: &mut Vec<NodeId>,
    out: &mut Vec<GridPath>,
) {
    let v = *stack.last().unwrap();
    if v == s {
        let mut nodes = stack.clone();
        nodes.reverse();
        out.push(GridPath::new(nodes));
        return;
    }
    for w in g.neighbors(v) {
        if dist[w] + 1 == dist[v] {
            stack.push(w);
            collect_paths(g, dist, s, stack, out);
            stack.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::grid::Pos;

    fn at(g: &GridGraph, x: i32, y: i32) -> NodeId {
        g.node_at(Pos::new(x, y)).unwrap()
    }

    #[test]
    fn rect_corner_distances() {
        let g = fixtures::rect_3x2();
        let t = dist_oracle(&g, at(&g, 0, 0), at(&g, 2, 1)).unwrap();
        assert_eq!(t, DistTriple { d: 3, d_x: 2, d_y: 1 });
    }

    #[test]
    fn donut_geodesics() {
        let g = fixtures::donut();
        let t = dist_oracle(&g, at(&g, 0, 0), at(&g, 2, 2)).unwrap();
        assert_eq!(t, DistTriple { d: 4, d_x: 2, d_y: 2 });
        // Must detour around the hole.
        let t = dist_oracle(&g, at(&g, 0, 1), at(&g, 2, 1)).unwrap();
        assert_eq!(t, DistTriple { d: 4, d_x: 2, d_y: 2 });
    }

    #[test]
    fn monotony() {
        let g = fixtures::rect_3x2();
        let east2north = GridPath::new(vec![at(&g, 0, 0), at(&g, 1, 0), at(&g, 2, 0), at(&g, 2, 1)]);
        assert!(east2north.is_monotonous(&g));
        let turn = GridPath::new(vec![at(&g, 0, 0), at(&g, 0, 1), at(&g, 1, 1), at(&g, 1, 0)]);
        assert!(!turn.is_monotonous(&g));
        assert_eq!(east2north.len_x(&g), 2);
        assert_eq!(east2north.len_y(&g), 1);
    }

    #[test]
    fn compose_requires_incidence() {
        let g = fixtures::path_5();
        let a = GridPath::new(vec![0, 1]);
        let b = GridPath::new(vec![1, 2, 3]);
        let c = a.compose(&b).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(a.compose(&c).unwrap_err(), GridError::NonIncidentComposition);
    }

    #[test]
    fn donut_neighbor_distances() {
        let g = fixtures::donut();
        let w = at(&g, 0, 0);
        assert!(check_neighbor_distances(&g, w));
        assert!(check_even_cycles(&g));
    }

    #[test]
    fn shortest_path_enumeration_shares_hop_split() {
        let g = fixtures::rect_3x2();
        let paths = all_shortest_paths(&g, at(&g, 0, 0), at(&g, 2, 1));
        assert_eq!(paths.len(), 3);
        for p in &paths {
            assert_eq!(p.len_x(&g), 2);
            assert_eq!(p.len_y(&g), 1);
        }
    }
}
