//! Stage 1: decomposition into simple regions.
//!
//! For each inner hole, split at the vertical portal through the hole's
//! chosen splitting node (leftmost boundary node, northernmost among
//! leftmost) and node-split the copy on the hole's side. Portals carrying
//! splitting nodes of several holes are split once, with one node split per
//! hole.

use std::collections::BTreeMap;

use crate::error::DecompError;
use crate::grid::{Dir, NodeId, Orientation};
use crate::holes::HoleSet;

use super::split::Splitter;

/// Stage 1 entry point: splits every inner hole open.
pub fn simple_decomposition(
    sp: &mut Splitter,
    holes: &HoleSet,
) -> Result<(), DecompError> {
    let portals = sp.g.portals(Orientation::Vertical);

    // Splitting node per inner hole, processed in hole-id order.
    let mut inner: Vec<(NodeId, usize)> = Vec::new(); // (hole id, hole index)
    for (hi, h) in holes.holes.iter().enumerate() {
        if h.bounded {
            inner.push((h.id.expect("inner holes have east-incident nodes"), hi));
        }
    }
    inner.sort_unstable();

    // Group holes by the portal of their splitting node, keeping hole order.
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut order: Vec<usize> = Vec::new();
    let mut split_node: Vec<Option<NodeId>> = vec![None; holes.holes.len()];
    for &(_, hi) in &inner {
        let v = splitting_node(sp, &holes.holes[hi].boundary);
        split_node[hi] = Some(v);
        let p = portals.of_node(v);
        if !groups.contains_key(&p) {
            order.push(p);
        }
        groups.entry(p).or_default().push(hi);
    }

    for p in order {
        let members = portals.members[p].clone();
        let split = sp.split_at_portal(&members, Orientation::Vertical)?;
        // Node split per hole, north to south.
        let mut hole_indices = groups[&p].clone();
        hole_indices.sort_by_key(|&hi| {
            let v = split_node[hi].unwrap();
            std::cmp::Reverse(sp.g.pos(split.hi_copies[index_of(&members, v)]).y)
        });
        for hi in hole_indices {
            let v = split_node[hi].unwrap();
            // The hole lies east of its leftmost boundary node; split the
            // east copy.
            let east_copy = split.hi_copies[index_of(&members, v)];
            let cells = &holes.holes[hi].cells;
            sp.split_at_node(east_copy, Dir::East, &|c| cells.binary_search(&c).is_ok())?;
        }
    }
    Ok(())
}

/// Leftmost boundary node of the hole, northernmost among leftmost.
fn splitting_node(sp: &Splitter, boundary: &[NodeId]) -> NodeId {
    *boundary
        .iter()
        .min_by_key(|&&v| {
            let p = sp.g.pos(v);
            (p.x, std::cmp::Reverse(p.y), v)
        })
        .expect("hole boundaries are non-empty")
}

fn index_of(members: &[NodeId], v: NodeId) -> usize {
    members.iter().position(|&m| m == v).expect("splitting node lies on its portal")
}
