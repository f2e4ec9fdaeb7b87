//! Grid-graph data model.
//!
//! Nodes sit on integer points and are connected iff their points are at
//! L1 distance exactly 1. After splitting operations (see `decomp`) a graph
//! may also contain *virtual copies*: nodes that share a position with their
//! original but carry a side tag recording which adjacency was removed.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::GridError;

pub type NodeId = usize;

/// Integer grid position. `x` grows east, `y` grows north.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pos {
    pub x: i32,
    pub y: i32,
}

impl Pos {
    pub fn new(x: i32, y: i32) -> Self {
        Pos { x, y }
    }

    pub fn step(self, dir: Dir) -> Pos {
        let (dx, dy) = dir.delta();
        Pos::new(self.x + dx, self.y + dy)
    }
}

/// Cardinal direction of a grid edge slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    North,
    East,
    South,
    West,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::North, Dir::East, Dir::South, Dir::West];

    pub fn index(self) -> usize {
        match self {
            Dir::North => 0,
            Dir::East => 1,
            Dir::South => 2,
            Dir::West => 3,
        }
    }

    pub fn from_index(i: usize) -> Dir {
        Dir::ALL[i % 4]
    }

    pub fn opposite(self) -> Dir {
        match self {
            Dir::North => Dir::South,
            Dir::East => Dir::West,
            Dir::South => Dir::North,
            Dir::West => Dir::East,
        }
    }

    /// Next direction clockwise (N -> E -> S -> W -> N).
    pub fn clockwise(self) -> Dir {
        match self {
            Dir::North => Dir::East,
            Dir::East => Dir::South,
            Dir::South => Dir::West,
            Dir::West => Dir::North,
        }
    }

    pub fn delta(self) -> (i32, i32) {
        match self {
            Dir::North => (0, 1),
            Dir::East => (1, 0),
            Dir::South => (0, -1),
            Dir::West => (-1, 0),
        }
    }

    pub fn is_vertical(self) -> bool {
        matches!(self, Dir::North | Dir::South)
    }

    pub fn orientation(self) -> Orientation {
        if self.is_vertical() {
            Orientation::Vertical
        } else {
            Orientation::Horizontal
        }
    }
}

/// Orientation of a portal, gate or split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

impl Orientation {
    /// Direction of travel *along* a portal of this orientation (towards
    /// larger coordinates).
    pub fn along(self) -> Dir {
        match self {
            Orientation::Vertical => Dir::North,
            Orientation::Horizontal => Dir::East,
        }
    }

    pub fn perpendicular(self) -> Orientation {
        match self {
            Orientation::Vertical => Orientation::Horizontal,
            Orientation::Horizontal => Orientation::Vertical,
        }
    }
}

/// Which adjacency a virtual copy lost. A `Left` copy has no east neighbor
/// slot usable towards the split (it keeps only its west side), and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SideTag {
    Left,
    Right,
    Top,
    Bottom,
}

#[derive(Debug, Clone)]
pub struct GridNode {
    pub pos: Pos,
    /// Root original node this one descends from (itself for base nodes).
    pub orig: NodeId,
    /// Set for virtual copies: (direct parent, removed-adjacency tag).
    pub lineage: Option<(NodeId, SideTag)>,
}

/// Integer-embedded 4-neighbor grid graph, possibly containing virtual
/// copies after splitting. Adjacency is stored explicitly per slot so that
/// splits can prune individual sides.
#[derive(Debug, Clone)]
pub struct GridGraph {
    nodes: Vec<GridNode>,
    nbr: Vec<[Option<NodeId>; 4]>,
    alive: Vec<bool>,
    n_alive: usize,
    base_n: usize,
}

impl GridGraph {
    /// Builds the grid graph on the given integer points. Edges are all
    /// unit-axis-adjacent pairs. Node ids are assigned in (x, y) order, so
    /// they are invariant under permutations of the input.
    pub fn build(points: &[(i32, i32)]) -> Result<GridGraph, GridError> {
        let mut pts: Vec<Pos> = points.iter().map(|&(x, y)| Pos::new(x, y)).collect();
        pts.sort();
        for w in pts.windows(2) {
            if w[0] == w[1] {
                return Err(GridError::DuplicatePoint { x: w[0].x, y: w[0].y });
            }
        }
        let index: HashMap<Pos, NodeId> = pts.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let n = pts.len();
        let mut nbr = vec![[None; 4]; n];
        for (v, &p) in pts.iter().enumerate() {
            for dir in Dir::ALL {
                nbr[v][dir.index()] = index.get(&p.step(dir)).copied();
            }
        }
        let nodes = pts
            .into_iter()
            .enumerate()
            .map(|(i, pos)| GridNode { pos, orig: i, lineage: None })
            .collect();
        let g = GridGraph { nodes, nbr, alive: vec![true; n], n_alive: n, base_n: n };
        if n == 0 {
            return Err(GridError::Disconnected);
        }
        if g.component_count() != 1 {
            return Err(GridError::Disconnected);
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.n_alive
    }

    pub fn is_empty(&self) -> bool {
        self.n_alive == 0
    }

    /// Number of base (non-copy) nodes the graph was built with.
    pub fn base_len(&self) -> usize {
        self.base_n
    }

    /// Total id space, including dead (replaced) nodes.
    pub fn id_bound(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_alive(&self, v: NodeId) -> bool {
        self.alive[v]
    }

    pub fn pos(&self, v: NodeId) -> Pos {
        self.nodes[v].pos
    }

    pub fn orig(&self, v: NodeId) -> NodeId {
        self.nodes[v].orig
    }

    pub fn node(&self, v: NodeId) -> &GridNode {
        &self.nodes[v]
    }

    pub fn is_copy(&self, v: NodeId) -> bool {
        self.nodes[v].lineage.is_some()
    }

    pub fn neighbor(&self, v: NodeId, dir: Dir) -> Option<NodeId> {
        self.nbr[v][dir.index()]
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.nbr[v].iter().flatten().copied()
    }

    pub fn neighbors_with_dir(&self, v: NodeId) -> impl Iterator<Item = (Dir, NodeId)> + '_ {
        Dir::ALL
            .into_iter()
            .filter_map(move |d| self.nbr[v][d.index()].map(|w| (d, w)))
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.nbr[v].iter().flatten().count()
    }

    pub fn alive_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(move |&v| self.alive[v])
    }

    /// Undirected edge count over alive nodes.
    pub fn edge_count(&self) -> usize {
        self.alive_ids().map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Looks up the alive node at a position in a copy-free graph.
    pub fn node_at(&self, pos: Pos) -> Option<NodeId> {
        self.alive_ids().find(|&v| self.nodes[v].pos == pos)
    }

    // -- mutation primitives used by the splitting procedures ---------------

    /// Adds a virtual copy of `of` with the given side tag. The copy starts
    /// with no neighbors; the caller wires it up via `link`.
    pub fn add_copy(&mut self, of: NodeId, side: SideTag) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(GridNode {
            pos: self.nodes[of].pos,
            orig: self.nodes[of].orig,
            lineage: Some((of, side)),
        });
        self.nbr.push([None; 4]);
        self.alive.push(true);
        self.n_alive += 1;
        id
    }

    /// Connects `a` to `b` through `a`'s `dir` slot (and symmetrically).
    pub fn link(&mut self, a: NodeId, dir: Dir, b: NodeId) {
        debug_assert!(self.alive[a] && self.alive[b]);
        debug_assert_eq!(self.nodes[a].pos.step(dir), self.nodes[b].pos);
        self.nbr[a][dir.index()] = Some(b);
        self.nbr[b][dir.opposite().index()] = Some(a);
    }

    /// Removes a node, detaching it from all neighbors.
    pub fn kill(&mut self, v: NodeId) {
        if !self.alive[v] {
            return;
        }
        for dir in Dir::ALL {
            if let Some(w) = self.nbr[v][dir.index()] {
                self.nbr[w][dir.opposite().index()] = None;
                self.nbr[v][dir.index()] = None;
            }
        }
        self.alive[v] = false;
        self.n_alive -= 1;
    }

    /// Extracts the induced subgraph on `keep` (alive nodes). Returns the
    /// subgraph and the mapping from subgraph ids back to ids in `self`.
    /// Positions and root originals are preserved; lineage links are not,
    /// since parent ids are meaningless in the new id space.
    pub fn subgraph(&self, keep: &[NodeId]) -> (GridGraph, Vec<NodeId>) {
        let mut ids: Vec<NodeId> = keep.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let mut inv = HashMap::with_capacity(ids.len());
        for (i, &v) in ids.iter().enumerate() {
            inv.insert(v, i);
        }
        let nodes = ids
            .iter()
            .map(|&v| GridNode { pos: self.nodes[v].pos, orig: self.nodes[v].orig, lineage: None })
            .collect();
        let nbr = ids
            .iter()
            .map(|&v| {
                let mut slots = [None; 4];
                for d in Dir::ALL {
                    slots[d.index()] =
                        self.nbr[v][d.index()].and_then(|w| inv.get(&w).copied());
                }
                slots
            })
            .collect();
        let n = ids.len();
        let g = GridGraph { nodes, nbr, alive: vec![true; n], n_alive: n, base_n: n };
        (g, ids)
    }

    // -- connectivity --------------------------------------------------------

    /// Connected components over alive nodes; returns per-id component index
    /// (usize::MAX for dead ids) and the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.nodes.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.nodes.len() {
            if !self.alive[s] || comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for w in self.neighbors(v) {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn component_count(&self) -> usize {
        self.components().1
    }

    /// Checks the structural invariants: symmetric adjacency, unit-length
    /// edges, alive endpoints.
    pub fn check_consistency(&self) -> bool {
        self.alive_ids().all(|v| {
            Dir::ALL.into_iter().all(|d| match self.nbr[v][d.index()] {
                None => true,
                Some(w) => {
                    self.alive[w]
                        && self.nodes[v].pos.step(d) == self.nodes[w].pos
                        && self.nbr[w][d.opposite().index()] == Some(v)
                }
            })
        })
    }
}

/// Maximal mono-directional connected components of a graph.
#[derive(Debug, Clone)]
pub struct Portals {
    pub orientation: Orientation,
    /// Members of each portal in ascending coordinate order along the portal.
    pub members: Vec<Vec<NodeId>>,
    /// Portal index per node id (usize::MAX for dead ids).
    pub of: Vec<usize>,
}

impl Portals {
    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn of_node(&self, v: NodeId) -> usize {
        self.of[v]
    }
}

impl GridGraph {
    /// Computes the portals of the given orientation: maximal runs connected
    /// by vertical (resp. horizontal) edges. Portal indices are assigned in
    /// ascending order of their minimum node id.
    pub fn portals(&self, orientation: Orientation) -> Portals {
        let along = orientation.along();
        let back = along.opposite();
        let mut of = vec![usize::MAX; self.nodes.len()];
        let mut members = Vec::new();
        for v in self.alive_ids() {
            if of[v] != usize::MAX || self.neighbor(v, back).is_some() {
                continue;
            }
            let idx = members.len();
            let mut run = Vec::new();
            let mut cur = Some(v);
            while let Some(u) = cur {
                of[u] = idx;
                run.push(u);
                cur = self.neighbor(u, along);
            }
            members.push(run);
        }
        Portals { orientation, members, of }
    }
}
