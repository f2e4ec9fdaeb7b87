//! Stage 2: decomposition into tunnel regions.
//!
//! A junction portal is where a simple region diverges into three or more
//! tunnels: a vertical portal with at least 3 adjacent portals that each
//! intersect at least 2 distinct walls, or a gate portal with at least 2
//! such neighbors. Each junction portal is split, and between consecutive
//! qualifying portals on a side the column is cut by a node split at the
//! bottommost adjacency node.

use std::collections::{BTreeSet, HashMap};

use crate::error::DecompError;
use crate::grid::{Dir, GridGraph, NodeId, Orientation};
use crate::holes::{outer_face_walk, Cover};

use super::split::Splitter;

struct JunctionPlan {
    /// Portal members, full-graph ids, south to north.
    portal: Vec<NodeId>,
    /// Node splits per side: (portal member, side towards the hole).
    node_splits: Vec<(NodeId, Dir)>,
    /// Complement test for the region the portal belongs to.
    region_index: usize,
}

/// Finds all junction portals of the current decomposition (full-graph
/// member ids, south to north), without splitting.
pub fn find_junction_portals(sp: &Splitter) -> Vec<Vec<NodeId>> {
    collect_plans(sp).0.into_iter().map(|p| p.portal).collect()
}

fn collect_plans(sp: &Splitter) -> (Vec<JunctionPlan>, Vec<Cover>) {
    let (comp_of, count) = sp.g.components();
    let mut regions: Vec<Vec<NodeId>> = vec![Vec::new(); count];
    for v in sp.g.alive_ids() {
        regions[comp_of[v]].push(v);
    }
    for r in &mut regions {
        r.sort_unstable();
    }
    regions.sort_by_key(|r| r[0]);

    let vgate = sp.gate_node_flags(Orientation::Vertical);
    let any_gate = sp.any_gate_node_flags();

    let mut plans: Vec<JunctionPlan> = Vec::new();
    let mut covers: Vec<Cover> = Vec::new();
    for (ri, nodes) in regions.iter().enumerate() {
        let (sub, map) = sp.g.subgraph(nodes);
        covers.push(Cover::of(&sub));
        plans.extend(region_plans(&sub, &map, ri, &vgate, &any_gate));
    }
    (plans, covers)
}

/// Stage 2 entry point: splits every junction portal so that all regions
/// become tunnels.
pub fn split_junctions(sp: &mut Splitter) -> Result<(), DecompError> {
    let (plans, covers) = collect_plans(sp);
    for plan in plans {
        let split = sp.split_at_portal(&plan.portal, Orientation::Vertical)?;
        let cover = &covers[plan.region_index];
        for (v, side) in plan.node_splits {
            let idx = plan.portal.iter().position(|&m| m == v).unwrap();
            let copy = match side {
                Dir::West => split.lo_copies[idx],
                Dir::East => split.hi_copies[idx],
                _ => unreachable!("junction node splits are lateral"),
            };
            sp.split_at_node(copy, side, &|c| !cover.filled(c))?;
        }
    }
    Ok(())
}

fn region_plans(
    sub: &GridGraph,
    map: &[NodeId],
    region_index: usize,
    vgate: &[bool],
    any_gate: &[bool],
) -> Vec<JunctionPlan> {
    // Walls: maximal non-gate runs of the region boundary walk.
    let walk = outer_face_walk(sub);
    let mut wall_of: HashMap<NodeId, Vec<usize>> = HashMap::new();
    {
        let n = walk.len();
        let is_gate = |v: NodeId| any_gate[map[v]];
        let mut wall_idx = 0;
        if n > 0 && walk.iter().all(|&v| !is_gate(v)) {
            for &v in &walk {
                wall_of.entry(v).or_default().push(0);
            }
        } else if n > 0 {
            let start = walk.iter().position(|&v| is_gate(v)).unwrap();
            let mut in_wall = false;
            for k in 0..n {
                let v = walk[(start + k) % n];
                if is_gate(v) {
                    if in_wall {
                        wall_idx += 1;
                        in_wall = false;
                    }
                } else {
                    wall_of.entry(v).or_default().push(wall_idx);
                    in_wall = true;
                }
            }
        }
        for walls in wall_of.values_mut() {
            walls.sort_unstable();
            walls.dedup();
        }
    }

    let portals = sub.portals(Orientation::Vertical);
    let distinct_walls: Vec<BTreeSet<usize>> = portals
        .members
        .iter()
        .map(|members| {
            members
                .iter()
                .flat_map(|v| wall_of.get(v).into_iter().flatten().copied())
                .collect()
        })
        .collect();
    // A neighbor counts towards a junction if it leads into a tunnel: it
    // spans two distinct walls, or it is a gate (a gate cuts away one of
    // the diverging tunnels; in the portal tree without cavities the
    // remaining leaves are exactly the gates).
    let qualifying: Vec<bool> = portals
        .members
        .iter()
        .zip(&distinct_walls)
        .map(|(members, walls)| walls.len() >= 2 || vgate[map[members[0]]])
        .collect();

    let mut plans = Vec::new();
    for members in &portals.members {
        let is_gate_portal = vgate[map[members[0]]];
        // Qualifying adjacent portals per side, with their adjacency spans.
        let mut west: HashMap<usize, Vec<NodeId>> = HashMap::new();
        let mut east: HashMap<usize, Vec<NodeId>> = HashMap::new();
        for &v in members {
            if let Some(w) = sub.neighbor(v, Dir::West) {
                west.entry(portals.of_node(w)).or_default().push(v);
            }
            if let Some(w) = sub.neighbor(v, Dir::East) {
                east.entry(portals.of_node(w)).or_default().push(v);
            }
        }
        let west_q: Vec<usize> = west.keys().copied().filter(|&q| qualifying[q]).collect();
        let east_q: Vec<usize> = east.keys().copied().filter(|&q| qualifying[q]).collect();
        let total = west_q.len() + east_q.len();
        let is_junction =
            (!is_gate_portal && total >= 3) || (is_gate_portal && total >= 2);
        if !is_junction {
            continue;
        }

        let mut node_splits = Vec::new();
        for (side, side_map, quals) in
            [(Dir::West, &west, &west_q), (Dir::East, &east, &east_q)]
        {
            if quals.len() < 2 {
                continue;
            }
            // Order qualifying portals north to south by their topmost
            // adjacency; cut below each of the first k-1.
            let mut ordered: Vec<usize> = quals.clone();
            ordered.sort_by_key(|q| {
                std::cmp::Reverse(
                    side_map[q].iter().map(|&v| sub.pos(v).y).max().unwrap(),
                )
            });
            for &q in ordered.iter().take(ordered.len() - 1) {
                let bottom = *side_map[&q]
                    .iter()
                    .min_by_key(|&&v| sub.pos(v).y)
                    .unwrap();
                node_splits.push((map[bottom], side));
            }
        }
        plans.push(JunctionPlan {
            portal: members.iter().map(|&v| map[v]).collect(),
            node_splits,
            region_index,
        });
    }
    plans
}
