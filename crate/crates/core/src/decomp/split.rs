//! Splitting procedures: the primitive that carves a grid graph into
//! regions by copying nodes and pruning adjacency.
//!
//! A portal split replaces every node on a maximal portal by two copies,
//! one per side; transit across the portal is blocked while both sides keep
//! their along-portal chains. A node split further cuts one copy
//! perpendicular to its portal with respect to a hole: the copy away from
//! the hole-contact quadrant keeps the lateral edge, which is what actually
//! breaks the boundary cycle around the hole.
//!
//! Severed copy pairs are the region interfaces ("gates" once regions are
//! final). Later splits rewrite them: a split along the same facing axis
//! reassigns the pair to the copy still facing the interface, a
//! perpendicular split duplicates the pair onto both copies.

use crate::error::DecompError;
use crate::grid::{Dir, GridGraph, NodeId, Orientation, Pos, SideTag};
use crate::holes::Cell;

/// A severed copy pair: `lo` is the west (vertical axis) or south
/// (horizontal axis) side of the interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeveredPair {
    pub lo: NodeId,
    pub hi: NodeId,
    /// Orientation of the gate this pair belongs to: `Vertical` pairs block
    /// west-east transit.
    pub axis: Orientation,
}

#[derive(Debug, Clone)]
pub struct PortalSplit {
    pub originals: Vec<NodeId>,
    /// West (resp. south) copies, aligned with `originals`.
    pub lo_copies: Vec<NodeId>,
    /// East (resp. north) copies.
    pub hi_copies: Vec<NodeId>,
    pub orientation: Orientation,
}

/// Grid graph under decomposition: tracks severed pairs and the copies that
/// replaced each split node.
#[derive(Debug, Clone)]
pub struct Splitter {
    pub g: GridGraph,
    pub pairs: Vec<SeveredPair>,
    children: Vec<Vec<NodeId>>,
}

impl Splitter {
    pub fn new(g: GridGraph) -> Self {
        let n = g.id_bound();
        Splitter { g, pairs: Vec::new(), children: vec![Vec::new(); n] }
    }

    /// Alive nodes currently standing in for `v`.
    pub fn alive_descendants(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if self.g.is_alive(u) {
                out.push(u);
            } else {
                stack.extend(self.children[u].iter().copied());
            }
        }
        out.sort_unstable();
        out
    }

    /// Per-node flags marking participants of severed pairs with the given
    /// axis (the gate nodes of that orientation).
    pub fn gate_node_flags(&self, axis: Orientation) -> Vec<bool> {
        let mut flags = vec![false; self.g.id_bound()];
        for p in &self.pairs {
            if p.axis == axis {
                flags[p.lo] = true;
                flags[p.hi] = true;
            }
        }
        flags
    }

    /// Flags for participants of any severed pair.
    pub fn any_gate_node_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.g.id_bound()];
        for p in &self.pairs {
            flags[p.lo] = true;
            flags[p.hi] = true;
        }
        flags
    }

    /// Splits the graph at a maximal portal given by its members in
    /// ascending coordinate order. Every member is replaced by a pair of
    /// copies; the pair list records one severed pair per position.
    pub fn split_at_portal(
        &mut self,
        members: &[NodeId],
        orientation: Orientation,
    ) -> Result<PortalSplit, DecompError> {
        if members.is_empty() {
            return Err(DecompError::NotOnPortal(usize::MAX));
        }
        let along = orientation.along();
        for w in members.windows(2) {
            if self.g.neighbor(w[0], along) != Some(w[1]) {
                return Err(DecompError::NotOnPortal(w[1]));
            }
        }
        // Maximality: nothing beyond either end.
        let first = members[0];
        let last = *members.last().unwrap();
        if self.g.neighbor(first, along.opposite()).is_some()
            || self.g.neighbor(last, along).is_some()
        {
            return Err(DecompError::NotOnPortal(first));
        }

        let (lo_tag, hi_tag, lo_dir, hi_dir) = match orientation {
            Orientation::Vertical => (SideTag::Left, SideTag::Right, Dir::West, Dir::East),
            Orientation::Horizontal => (SideTag::Bottom, SideTag::Top, Dir::South, Dir::North),
        };

        let snaps: Vec<[Option<NodeId>; 4]> = members
            .iter()
            .map(|&v| {
                let mut s = [None; 4];
                for d in Dir::ALL {
                    s[d.index()] = self.g.neighbor(v, d);
                }
                s
            })
            .collect();

        let mut lo_copies = Vec::with_capacity(members.len());
        let mut hi_copies = Vec::with_capacity(members.len());
        for &v in members {
            lo_copies.push(self.g.add_copy(v, lo_tag));
            hi_copies.push(self.g.add_copy(v, hi_tag));
            self.children.push(Vec::new());
            self.children.push(Vec::new());
        }
        for &v in members {
            self.g.kill(v);
        }
        for (i, &v) in members.iter().enumerate() {
            self.children[v] = vec![lo_copies[i], hi_copies[i]];
            if let Some(w) = snaps[i][lo_dir.index()] {
                self.g.link(lo_copies[i], lo_dir, w);
            }
            if let Some(w) = snaps[i][hi_dir.index()] {
                self.g.link(hi_copies[i], hi_dir, w);
            }
            if i + 1 < members.len() {
                self.g.link(lo_copies[i], along, lo_copies[i + 1]);
                self.g.link(hi_copies[i], along, hi_copies[i + 1]);
            }
        }
        for (i, &v) in members.iter().enumerate() {
            self.rewrite_pairs(v, lo_copies[i], hi_copies[i], orientation);
            self.pairs.push(SeveredPair { lo: lo_copies[i], hi: hi_copies[i], axis: orientation });
        }
        Ok(PortalSplit {
            originals: members.to_vec(),
            lo_copies,
            hi_copies,
            orientation,
        })
    }

    /// Splits node `v` perpendicular to its portal with respect to a hole in
    /// direction `hole_dir` from `v`; `is_hole_cell` identifies the hole's
    /// complement cells. For a hole to the east or west, `v` is cut into a
    /// top and bottom copy; the copy away from the hole-contact quadrant
    /// keeps the lateral edge. Returns (low copy, high copy).
    pub fn split_at_node(
        &mut self,
        v: NodeId,
        hole_dir: Dir,
        is_hole_cell: &dyn Fn(Cell) -> bool,
    ) -> Result<(NodeId, NodeId), DecompError> {
        let p = self.g.pos(v);
        let (upper_cell, lower_cell) = contact_cells(p, hole_dir);
        let upper = is_hole_cell(upper_cell);
        let lower = is_hole_cell(lower_cell);
        if !upper && !lower {
            return Err(DecompError::NotOnHoleBoundary(v));
        }

        let mut snap = [None; 4];
        for d in Dir::ALL {
            snap[d.index()] = self.g.neighbor(v, d);
        }

        let vertical_cut = !hole_dir.is_vertical();
        let (lo, hi, pair_axis) = if vertical_cut {
            let bottom = self.g.add_copy(v, SideTag::Bottom);
            let top = self.g.add_copy(v, SideTag::Top);
            self.children.push(Vec::new());
            self.children.push(Vec::new());
            self.g.kill(v);
            self.children[v] = vec![bottom, top];
            if let Some(w) = snap[Dir::North.index()] {
                self.g.link(top, Dir::North, w);
            }
            if let Some(w) = snap[Dir::South.index()] {
                self.g.link(bottom, Dir::South, w);
            }
            if let Some(w) = snap[hole_dir.index()] {
                // Hole below the lateral edge: the edge stays with the top.
                let owner = if lower { top } else { bottom };
                self.g.link(owner, hole_dir, w);
            }
            debug_assert!(snap[hole_dir.opposite().index()].is_none());
            if let Some(w) = snap[hole_dir.opposite().index()] {
                self.g.link(top, hole_dir.opposite(), w);
            }
            (bottom, top, Orientation::Horizontal)
        } else {
            let left = self.g.add_copy(v, SideTag::Left);
            let right = self.g.add_copy(v, SideTag::Right);
            self.children.push(Vec::new());
            self.children.push(Vec::new());
            self.g.kill(v);
            self.children[v] = vec![left, right];
            if let Some(w) = snap[Dir::East.index()] {
                self.g.link(right, Dir::East, w);
            }
            if let Some(w) = snap[Dir::West.index()] {
                self.g.link(left, Dir::West, w);
            }
            if let Some(w) = snap[hole_dir.index()] {
                // West contact: the perpendicular edge stays with the right
                // copy (and symmetrically).
                let west_contact = upper;
                let owner = if west_contact { right } else { left };
                self.g.link(owner, hole_dir, w);
            }
            debug_assert!(snap[hole_dir.opposite().index()].is_none());
            if let Some(w) = snap[hole_dir.opposite().index()] {
                self.g.link(left, hole_dir.opposite(), w);
            }
            (left, right, Orientation::Vertical)
        };
        self.rewrite_pairs(v, lo, hi, pair_axis);
        self.pairs.push(SeveredPair { lo, hi, axis: pair_axis });
        Ok((lo, hi))
    }

    fn rewrite_pairs(&mut self, v: NodeId, lo: NodeId, hi: NodeId, facing: Orientation) {
        let mut extra = Vec::new();
        for pair in &mut self.pairs {
            if pair.lo != v && pair.hi != v {
                continue;
            }
            if pair.axis == facing {
                // The interface sits on the high side of `lo` members and on
                // the low side of `hi` members.
                if pair.lo == v {
                    pair.lo = hi;
                }
                if pair.hi == v {
                    pair.hi = lo;
                }
            } else {
                // Perpendicular split: both copies face the old interface.
                let mut dup = *pair;
                if pair.lo == v {
                    pair.lo = lo;
                    dup.lo = hi;
                }
                if pair.hi == v {
                    pair.hi = lo;
                    dup.hi = hi;
                }
                extra.push(dup);
            }
        }
        self.pairs.extend(extra);
    }
}

/// The two hole-contact quadrant cells of `p` on the side `hole_dir`. For
/// lateral holes the pair is (upper, lower); for vertical holes it is
/// (west, east). Contact in the lower (resp. west) quadrant sends the cut
/// edge to the top (resp. right) copy and dominates when both quadrants
/// touch the hole.
fn contact_cells(p: Pos, hole_dir: Dir) -> (Cell, Cell) {
    match hole_dir {
        Dir::East => (Pos::new(p.x, p.y), Pos::new(p.x, p.y - 1)),
        Dir::West => (Pos::new(p.x - 1, p.y), Pos::new(p.x - 1, p.y - 1)),
        Dir::North => (Pos::new(p.x - 1, p.y), Pos::new(p.x, p.y)),
        Dir::South => (Pos::new(p.x - 1, p.y - 1), Pos::new(p.x, p.y - 1)),
    }
}
