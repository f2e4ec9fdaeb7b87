//! Hole detection and boundary walks.
//!
//! The covered area of a grid graph is the union of its filled unit cells
//! (all four corners present and all four side edges alive) and its edge
//! segments. Holes are the connected components of the complement; exactly
//! one of them is unbounded (the outer hole). Components are computed
//! combinatorially on unit cells: side-sharing cells connect iff the grid
//! edge on the shared segment is absent, corner-sharing cells connect iff
//! the corner node is absent.
//!
//! Boundary walks are the faces of the plane graph: a face that is not a
//! unit 4-cycle bounds exactly one hole. Nodes may occur on a walk several
//! times (once per incidence), which is how corridor nodes incident to the
//! same hole twice are represented.

use std::collections::{HashMap, HashSet};

use crate::grid::{Dir, GridGraph, NodeId, Pos};

/// A unit cell, identified by its south-west corner.
pub type Cell = Pos;

#[derive(Debug, Clone)]
pub struct Hole {
    /// Unfilled cells belonging to this component (cells outside the
    /// bounding-box margin are not materialized for the outer hole).
    pub cells: Vec<Cell>,
    pub bounded: bool,
    /// Cyclic boundary walk; each entry is one incidence of a node.
    pub boundary: Vec<NodeId>,
    /// Nodes whose north point is missing and part of this hole, sorted.
    pub east_incident: Vec<NodeId>,
    /// Minimum east-incident node id; the hole's identifier.
    pub id: Option<NodeId>,
}

#[derive(Debug, Clone)]
pub struct HoleSet {
    pub holes: Vec<Hole>,
    cell_hole: HashMap<Cell, usize>,
}

impl HoleSet {
    pub fn inner(&self) -> impl Iterator<Item = &Hole> {
        self.holes.iter().filter(|h| h.bounded)
    }

    pub fn inner_count(&self) -> usize {
        self.holes.iter().filter(|h| h.bounded).count()
    }

    pub fn outer(&self) -> &Hole {
        self.holes.iter().find(|h| !h.bounded).expect("outer hole always exists")
    }

    /// Hole index owning the given unfilled cell, if any.
    pub fn hole_of_cell(&self, cell: Cell) -> Option<usize> {
        self.cell_hole.get(&cell).copied()
    }
}

pub(crate) struct Cover {
    positions: HashSet<Pos>,
    edges: HashSet<(Pos, Pos)>,
    min: Pos,
    max: Pos,
}

impl Cover {
    pub(crate) fn of(g: &GridGraph) -> Cover {
        let mut positions = HashSet::new();
        let mut edges = HashSet::new();
        let (mut min, mut max) = (Pos::new(i32::MAX, i32::MAX), Pos::new(i32::MIN, i32::MIN));
        for v in g.alive_ids() {
            let p = g.pos(v);
            positions.insert(p);
            min = Pos::new(min.x.min(p.x), min.y.min(p.y));
            max = Pos::new(max.x.max(p.x), max.y.max(p.y));
            for w in g.neighbors(v) {
                let q = g.pos(w);
                edges.insert(if p < q { (p, q) } else { (q, p) });
            }
        }
        Cover { positions, edges, min, max }
    }

    pub(crate) fn has_node(&self, p: Pos) -> bool {
        self.positions.contains(&p)
    }

    pub(crate) fn has_edge(&self, p: Pos, q: Pos) -> bool {
        let key = if p < q { (p, q) } else { (q, p) };
        self.edges.contains(&key)
    }

    pub(crate) fn filled(&self, c: Cell) -> bool {
        let a = c;
        let b = Pos::new(c.x + 1, c.y);
        let d = Pos::new(c.x, c.y + 1);
        let e = Pos::new(c.x + 1, c.y + 1);
        self.has_node(a)
            && self.has_node(b)
            && self.has_node(d)
            && self.has_node(e)
            && self.has_edge(a, b)
            && self.has_edge(a, d)
            && self.has_edge(b, e)
            && self.has_edge(d, e)
    }
}

/// Detects all holes of `g`: every bounded complement component plus the
/// unbounded outer one, with boundary walks and east-incident identifiers.
pub fn detect_holes(g: &GridGraph) -> HoleSet {
    let cover = Cover::of(g);
    // Cells with south-west corner in [min-1, max] cover the graph plus a
    // one-cell margin; every unbounded component reaches the margin ring.
    let x0 = cover.min.x - 1;
    let y0 = cover.min.y - 1;
    let x1 = cover.max.x;
    let y1 = cover.max.y;
    let w = (x1 - x0 + 1) as usize;
    let h = (y1 - y0 + 1) as usize;
    let idx = |c: Cell| -> usize { (c.y - y0) as usize * w + (c.x - x0) as usize };
    let in_range = |c: Cell| c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1;

    let mut comp = vec![usize::MAX; w * h];
    let mut comps: Vec<Vec<Cell>> = Vec::new();
    let mut unbounded = Vec::new();
    let mut stack = Vec::new();
    for cy in y0..=y1 {
        for cx in x0..=x1 {
            let c0 = Pos::new(cx, cy);
            if comp[idx(c0)] != usize::MAX || cover.filled(c0) {
                continue;
            }
            let ci = comps.len();
            let mut cells = Vec::new();
            let mut touches_margin = false;
            comp[idx(c0)] = ci;
            stack.push(c0);
            while let Some(c) = stack.pop() {
                if c.x == x0 || c.x == x1 || c.y == y0 || c.y == y1 {
                    touches_margin = true;
                }
                cells.push(c);
                for d in neighbors_of_cell(&cover, c) {
                    if in_range(d) && comp[idx(d)] == usize::MAX && !cover.filled(d) {
                        comp[idx(d)] = ci;
                        stack.push(d);
                    }
                }
            }
            cells.sort();
            comps.push(cells);
            if touches_margin {
                unbounded.push(ci);
            }
        }
    }
    debug_assert_eq!(unbounded.len(), 1, "exactly one unbounded complement component");
    let outer_comp = unbounded[0];

    let mut cell_hole = HashMap::new();
    for (ci, cells) in comps.iter().enumerate() {
        for &c in cells {
            cell_hole.insert(c, ci);
        }
    }

    // East-incident nodes: north point missing and part of the hole.
    let mut east_incident: Vec<Vec<NodeId>> = vec![Vec::new(); comps.len()];
    for v in g.alive_ids() {
        let q = g.pos(v).step(Dir::North);
        if !cover.has_node(q) {
            if let Some(&ci) = cell_hole.get(&q) {
                east_incident[ci].push(v);
            }
        }
    }
    for list in &mut east_incident {
        list.sort_unstable();
        list.dedup();
    }

    // Boundary walks from the faces of the plane graph.
    let faces = trace_faces(g);
    let mut boundary: Vec<Vec<NodeId>> = vec![Vec::new(); comps.len()];
    for face in &faces {
        if face.is_unit_cell {
            continue;
        }
        let ci = face
            .left_cells
            .iter()
            .find_map(|&c| cell_hole.get(&c).copied())
            .unwrap_or(outer_comp);
        debug_assert!(
            face.left_cells.iter().all(|c| cell_hole.get(c).copied().unwrap_or(outer_comp) == ci),
            "all cells left of a face walk belong to one hole"
        );
        debug_assert!(boundary[ci].is_empty(), "one boundary walk per hole");
        boundary[ci] = face.walk.clone();
    }
    // An edgeless graph (single node) has no faces; the node itself bounds
    // the outer hole.
    if g.edge_count() == 0 {
        boundary[outer_comp] = g.alive_ids().collect();
    }

    let holes = comps
        .iter()
        .enumerate()
        .map(|(ci, cells)| Hole {
            cells: cells.clone(),
            bounded: ci != outer_comp,
            boundary: std::mem::take(&mut boundary[ci]),
            id: east_incident[ci].first().copied(),
            east_incident: std::mem::take(&mut east_incident[ci]),
        })
        .collect();
    HoleSet { holes, cell_hole }
}

fn neighbors_of_cell(cover: &Cover, c: Cell) -> Vec<Cell> {
    let mut out = Vec::with_capacity(8);
    let corner = |p: Pos| !cover.has_node(p);
    // Side-sharing cells: connected iff the edge on the shared segment is
    // absent.
    if !cover.has_edge(Pos::new(c.x + 1, c.y), Pos::new(c.x + 1, c.y + 1)) {
        out.push(Pos::new(c.x + 1, c.y));
    }
    if !cover.has_edge(Pos::new(c.x, c.y), Pos::new(c.x, c.y + 1)) {
        out.push(Pos::new(c.x - 1, c.y));
    }
    if !cover.has_edge(Pos::new(c.x, c.y + 1), Pos::new(c.x + 1, c.y + 1)) {
        out.push(Pos::new(c.x, c.y + 1));
    }
    if !cover.has_edge(Pos::new(c.x, c.y), Pos::new(c.x + 1, c.y)) {
        out.push(Pos::new(c.x, c.y - 1));
    }
    // Corner-sharing cells: connected iff the corner node is absent.
    if corner(Pos::new(c.x + 1, c.y + 1)) {
        out.push(Pos::new(c.x + 1, c.y + 1));
    }
    if corner(Pos::new(c.x, c.y + 1)) {
        out.push(Pos::new(c.x - 1, c.y + 1));
    }
    if corner(Pos::new(c.x, c.y)) {
        out.push(Pos::new(c.x - 1, c.y - 1));
    }
    if corner(Pos::new(c.x + 1, c.y)) {
        out.push(Pos::new(c.x + 1, c.y - 1));
    }
    out
}

/// One face of the plane graph, traversed with its interior on the left.
#[derive(Debug, Clone)]
pub struct Face {
    /// Nodes in cyclic order (sources of the directed walk edges).
    pub walk: Vec<NodeId>,
    /// Twice the signed shoelace area of the walk.
    pub area2: i64,
    /// True iff the face is a CCW unit square (a filled cell).
    pub is_unit_cell: bool,
    /// Cells immediately left of each walk edge (dedup'd).
    pub left_cells: Vec<Cell>,
}

/// Traces every face of the plane graph. Works on graphs with virtual
/// copies: the rotation system at each node is its four direction slots.
pub fn trace_faces(g: &GridGraph) -> Vec<Face> {
    let bound = g.id_bound();
    let mut visited = vec![[false; 4]; bound];
    let mut faces = Vec::new();
    for v in g.alive_ids() {
        for d0 in Dir::ALL {
            if visited[v][d0.index()] || g.neighbor(v, d0).is_none() {
                continue;
            }
            let mut walk = Vec::new();
            let mut left_cells = Vec::new();
            let mut area2: i64 = 0;
            let (mut u, mut d) = (v, d0);
            loop {
                visited[u][d.index()] = true;
                walk.push(u);
                left_cells.push(left_cell(g.pos(u), d));
                let w = g.neighbor(u, d).expect("walk follows existing edges");
                let (pu, pw) = (g.pos(u), g.pos(w));
                area2 += pu.x as i64 * pw.y as i64 - pw.x as i64 * pu.y as i64;
                // Next edge: rotate clockwise from the reverse direction,
                // first existing slot. This keeps the face interior on the
                // left of each directed edge.
                let mut nd = d.opposite();
                for _ in 0..4 {
                    nd = nd.clockwise();
                    if g.neighbor(w, nd).is_some() {
                        break;
                    }
                }
                u = w;
                d = nd;
                if u == v && d == d0 {
                    break;
                }
            }
            let is_unit_cell = walk.len() == 4 && area2 == 2;
            left_cells.sort();
            left_cells.dedup();
            faces.push(Face { walk, area2, is_unit_cell, left_cells });
        }
    }
    faces
}

/// Cell immediately to the left of the directed edge leaving `p` towards
/// `dir`.
fn left_cell(p: Pos, dir: Dir) -> Cell {
    match dir {
        Dir::East => Pos::new(p.x, p.y),
        Dir::North => Pos::new(p.x - 1, p.y),
        Dir::West => Pos::new(p.x - 1, p.y - 1),
        Dir::South => Pos::new(p.x, p.y - 1),
    }
}

/// The outer-face walk of the connected graph `g` (interior of every other
/// face is on the left; the outer face has negative area).
pub fn outer_face_walk(g: &GridGraph) -> Vec<NodeId> {
    if g.edge_count() == 0 {
        return g.alive_ids().collect();
    }
    trace_faces(g)
        .into_iter()
        .min_by_key(|f| f.area2)
        .map(|f| f.walk)
        .unwrap_or_default()
}

/// Number of inner holes, counted via plane-graph faces: every face that is
/// not a filled unit cell bounds a hole, and each connected component has
/// exactly one outer face. Unlike the cell-based detector this respects
/// virtual adjacency, so it is exact on split graphs where copies share a
/// position (the role the 1/3-granularity transformation plays on paper).
pub fn inner_hole_count(g: &GridGraph) -> usize {
    if g.edge_count() == 0 {
        return 0;
    }
    let faces = trace_faces(g);
    let (comp, count) = g.components();
    let mut non_cell = vec![0usize; count];
    for f in &faces {
        if !f.is_unit_cell {
            non_cell[comp[f.walk[0]]] += 1;
        }
    }
    non_cell.iter().map(|&c| c.saturating_sub(1)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::grid::GridGraph;

    #[test]
    fn rect_has_no_inner_holes() {
        let hs = detect_holes(&fixtures::rect_3x2());
        assert_eq!(hs.inner_count(), 0);
        assert_eq!(hs.holes.len(), 1);
        assert!(!hs.holes[0].bounded);
    }

    #[test]
    fn donut_has_one_inner_hole() {
        let g = fixtures::donut();
        let hs = detect_holes(&g);
        assert_eq!(hs.inner_count(), 1);
        let inner = hs.inner().next().unwrap();
        // The 8-node ring, each node once, in cyclic order.
        assert_eq!(inner.boundary.len(), 8);
        let mut seen: Vec<_> = inner.boundary.clone();
        seen.sort_unstable();
        let mut all: Vec<_> = g.alive_ids().collect();
        all.sort_unstable();
        assert_eq!(seen, all);
    }

    #[test]
    fn double_donut_has_two_inner_holes() {
        let hs = detect_holes(&fixtures::double_donut());
        assert_eq!(hs.inner_count(), 2);
    }

    #[test]
    fn rect_outer_boundary_is_rim() {
        let g = fixtures::rect_3x2();
        let hs = detect_holes(&g);
        assert_eq!(hs.outer().boundary.len(), 6);
    }

    #[test]
    fn path_outer_boundary_covers_each_edge_twice() {
        let g = fixtures::path_5();
        let hs = detect_holes(&g);
        // Outer walk of a path graph traverses each of the 4 edges twice.
        assert_eq!(hs.outer().boundary.len(), 8);
    }

    #[test]
    fn plus_corridor_node_incident_twice() {
        // Plus shape: center with four length-2 arms; the center node (and
        // each arm node) appears on the outer walk once per side.
        let mut pts = vec![(0, 0)];
        for d in 1..=2 {
            pts.extend([(d, 0), (-d, 0), (0, d), (0, -d)]);
        }
        let g = GridGraph::build(&pts).unwrap();
        let hs = detect_holes(&g);
        let walk = &hs.outer().boundary;
        let center = g.node_at(crate::grid::Pos::new(0, 0)).unwrap();
        let occurrences = walk.iter().filter(|&&v| v == center).count();
        assert_eq!(occurrences, 4);
    }

    #[test]
    fn donut_east_incident_id() {
        let g = fixtures::donut();
        let hs = detect_holes(&g);
        let inner = hs.inner().next().unwrap();
        // North point of (1,0) is the missing (1,1); only east-incident node.
        let expect = g.node_at(crate::grid::Pos::new(1, 0)).unwrap();
        assert_eq!(inner.east_incident, vec![expect]);
        assert_eq!(inner.id, Some(expect));
    }

    #[test]
    fn single_node_outer_hole() {
        let g = GridGraph::build(&[(0, 0)]).unwrap();
        let hs = detect_holes(&g);
        assert_eq!(hs.inner_count(), 0);
        assert_eq!(hs.outer().boundary, vec![0]);
    }

    #[test]
    fn face_count_matches_euler() {
        for g in [fixtures::rect_3x2(), fixtures::donut(), fixtures::double_donut()] {
            let faces = trace_faces(&g);
            // Euler: F = E - V + 2 for connected plane graphs.
            assert_eq!(faces.len(), g.edge_count() - g.len() + 2);
        }
    }
}
