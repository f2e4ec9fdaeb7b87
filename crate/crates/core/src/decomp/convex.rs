//! Stage 3: path-convex splitting of tunnels.
//!
//! Every tunnel (region with two vertical gates) is classified by the
//! vertical-distance profile d(i) from the nodes of one gate to the other
//! gate. If the profile reaches 0 the gates face each other (case a): the
//! tunnel is split at the two horizontal portals between the facing pairs,
//! plus anti-wrap node splits where those portals touch a hole. Otherwise
//! (case b) the profile has a unique positive minimum: the tunnel is split
//! at the horizontal portals through the two minima, anti-wrap node splits
//! at their leftmost hole contacts, and finally at the half-distance
//! portals P_x and P_y, which separate the minima.

use std::collections::HashMap;

use crate::error::DecompError;
use crate::grid::{Dir, GridGraph, NodeId, Orientation, Pos};
use crate::holes::{Cell, Cover};
use crate::sssp::{build_portal_graphs, spsp_with};

use super::split::Splitter;

#[derive(Debug, Default)]
pub struct ConvexStats {
    pub tunnels_split: usize,
    pub max_regions_per_tunnel: usize,
}

/// Maximal vertically connected runs of vertical-gate nodes in a region,
/// ascending along each run, ordered by minimum node id.
pub fn vertical_gate_runs(sp: &Splitter, region_nodes: &[NodeId]) -> Vec<Vec<NodeId>> {
    let flags = sp.gate_node_flags(Orientation::Vertical);
    let mut runs = Vec::new();
    for &v in region_nodes {
        if !flags[v] {
            continue;
        }
        if sp.g.neighbor(v, Dir::South).map_or(false, |s| flags[s]) {
            continue;
        }
        let mut run = vec![v];
        let mut cur = v;
        while let Some(n) = sp.g.neighbor(cur, Dir::North) {
            if !flags[n] {
                break;
            }
            run.push(n);
            cur = n;
        }
        runs.push(run);
    }
    runs.sort_by_key(|r| *r.iter().min().unwrap());
    runs
}

/// Stage 3 entry point: makes every tunnel path-convex.
pub fn convex_split(sp: &mut Splitter) -> Result<ConvexStats, DecompError> {
    let (comp_of, count) = sp.g.components();
    let mut regions: Vec<Vec<NodeId>> = vec![Vec::new(); count];
    for v in sp.g.alive_ids() {
        regions[comp_of[v]].push(v);
    }
    for r in &mut regions {
        r.sort_unstable();
    }
    regions.sort_by_key(|r| r[0]);

    let mut stats = ConvexStats::default();
    let mut tunnel_members: Vec<Vec<NodeId>> = Vec::new();
    for nodes in &regions {
        let runs = vertical_gate_runs(sp, nodes);
        if runs.len() != 2 {
            // Zero or one gate: already path-convex; more than two gates
            // signals an upstream bug that the verifier reports.
            continue;
        }
        stats.tunnels_split += 1;
        split_tunnel(sp, nodes, &runs[0], &runs[1])?;
        tunnel_members.push(nodes.clone());
    }

    // Regions per split tunnel.
    let (comp_of, _) = sp.g.components();
    for nodes in tunnel_members {
        let mut comps: Vec<usize> = nodes
            .iter()
            .flat_map(|&v| sp.alive_descendants(v))
            .map(|v| comp_of[v])
            .collect();
        comps.sort_unstable();
        comps.dedup();
        stats.max_regions_per_tunnel = stats.max_regions_per_tunnel.max(comps.len());
    }
    Ok(stats)
}

fn split_tunnel(
    sp: &mut Splitter,
    region_nodes: &[NodeId],
    gate_a: &[NodeId],
    gate_b: &[NodeId],
) -> Result<(), DecompError> {
    let region_id = region_nodes[0];
    let (sub, map) = sp.g.subgraph(region_nodes);
    let inv: HashMap<NodeId, usize> =
        map.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let cover = Cover::of(&sub);
    let (pv, ph) = build_portal_graphs(&sub)
        .expect("tunnel regions are simple by the earlier stages");

    let a_sub: Vec<usize> = gate_a.iter().map(|v| inv[v]).collect();
    let b_sub: Vec<usize> = gate_b.iter().map(|v| inv[v]).collect();

    let to_b = spsp_with(&sub, &pv, &ph, &b_sub).expect("portal graphs prebuilt");
    let profile: Vec<u32> = a_sub.iter().map(|&v| to_b.d_y[v]).collect();
    let (i1, i2, min) = unimodal_range(&profile)
        .ok_or(DecompError::ProfileNotUnimodal { region: region_id })?;

    if min == 0 {
        // Case (a): the gates face each other along rows i1..i2.
        let g_dn = gate_a[i1];
        let g_up = gate_a[i2];
        let g_dn2 = facing_node(sp, gate_b, sp.g.pos(g_dn).y);
        let g_up2 = facing_node(sp, gate_b, sp.g.pos(g_up).y);
        let p_up = horizontal_portal(&sp.g, g_up);
        let p_dn = horizontal_portal(&sp.g, g_dn);
        let same_row = sp.g.pos(g_up).y == sp.g.pos(g_dn).y;

        let b_up = hole_contact_node(
            sp,
            &p_up,
            Dir::North,
            &cover,
            &[sp.g.pos(g_up), sp.g.pos(g_up2)],
        );
        let b_dn = hole_contact_node(
            sp,
            &p_dn,
            Dir::South,
            &cover,
            &[sp.g.pos(g_dn), sp.g.pos(g_dn2)],
        );

        let up_split = sp.split_at_portal(&p_up, Orientation::Horizontal)?;
        let dn_split = if same_row {
            up_split.clone()
        } else {
            sp.split_at_portal(&p_dn, Orientation::Horizontal)?
        };
        if let Some((b, cells)) = b_up {
            let idx = up_split.originals.iter().position(|&v| v == b).unwrap();
            sp.split_at_node(up_split.hi_copies[idx], Dir::North, &|c| cells.contains(&c))?;
        }
        if let Some((b, cells)) = b_dn {
            let idx = dn_split.originals.iter().position(|&v| v == b).unwrap();
            sp.split_at_node(dn_split.lo_copies[idx], Dir::South, &|c| cells.contains(&c))?;
        }
        return Ok(());
    }

    // Case (b): unique positive minima g on A and g' on B.
    if i1 != i2 {
        return Err(DecompError::ProfileNotUnimodal { region: region_id });
    }
    let g = gate_a[i1];
    let to_a = spsp_with(&sub, &pv, &ph, &a_sub).expect("portal graphs prebuilt");
    let profile_b: Vec<u32> = b_sub.iter().map(|&v| to_a.d_y[v]).collect();
    let (j1, j2, min_b) = unimodal_range(&profile_b)
        .ok_or(DecompError::ProfileNotUnimodal { region: region_id })?;
    if j1 != j2 || min_b == 0 {
        return Err(DecompError::ProfileNotUnimodal { region: region_id });
    }
    let g2 = gate_b[j1];

    // Half-distance portals with respect to g and g', computed in the
    // unsplit tunnel.
    let from_g = spsp_with(&sub, &pv, &ph, &[inv[&g]]).expect("portal graphs prebuilt");
    let from_g2 = spsp_with(&sub, &pv, &ph, &[inv[&g2]]).expect("portal graphs prebuilt");
    let dx = from_g.d_x[inv[&g2]];
    let dy = from_g.d_y[inv[&g2]];
    let p_x: Vec<NodeId> = sub
        .alive_ids()
        .filter(|&v| from_g.d_x[v] == dx.div_ceil(2) && from_g2.d_x[v] == dx / 2)
        .map(|v| map[v])
        .collect();
    let p_y: Vec<NodeId> = sub
        .alive_ids()
        .filter(|&v| from_g.d_y[v] == dy.div_ceil(2) && from_g2.d_y[v] == dy / 2)
        .map(|v| map[v])
        .collect();

    // Split at P through g, anti-wrap at b; then P' through g', b'.
    let side_p = match sp.g.pos(g2).y.cmp(&sp.g.pos(g).y) {
        std::cmp::Ordering::Greater => Dir::North,
        std::cmp::Ordering::Less => Dir::South,
        std::cmp::Ordering::Equal => Dir::North,
    };
    for (node, side) in [(g, side_p), (g2, side_p.opposite())] {
        let portal = horizontal_portal(&sp.g, node);
        // The blocking hole lies towards the other minimum; when the minima
        // share a row, fall back to whichever side has a contact.
        let (contact, b_side) = match hole_contact_node(sp, &portal, side, &cover, &[]) {
            Some(found) => (Some(found), side),
            None if sp.g.pos(g).y == sp.g.pos(g2).y => {
                (hole_contact_node(sp, &portal, side.opposite(), &cover, &[]), side.opposite())
            }
            None => (None, side),
        };
        let split = sp.split_at_portal(&portal, Orientation::Horizontal)?;
        if let Some((bn, cells)) = contact {
            let idx = split.originals.iter().position(|&v| v == bn).unwrap();
            let copy = match b_side {
                Dir::North => split.hi_copies[idx],
                _ => split.lo_copies[idx],
            };
            sp.split_at_node(copy, b_side, &|c| cells.contains(&c))?;
        }
    }

    // Split at the current descendants of P_x, then P_y.
    split_descendant_runs(sp, &p_x, Orientation::Vertical)?;
    split_descendant_runs(sp, &p_y, Orientation::Horizontal)?;
    Ok(())
}

/// Validates the tunnel distance profile: strictly decreasing, a plateau at
/// the minimum (only allowed when the minimum is 0), strictly increasing.
/// Returns (first min index, last min index, min).
fn unimodal_range(profile: &[u32]) -> Option<(usize, usize, u32)> {
    let min = *profile.iter().min()?;
    let i1 = profile.iter().position(|&d| d == min)?;
    let i2 = profile.len() - 1 - profile.iter().rev().position(|&d| d == min)?;
    for i in 0..i1 {
        if profile[i] <= profile[i + 1] {
            return None;
        }
    }
    for i in i2..profile.len() - 1 {
        if profile[i] >= profile[i + 1] {
            return None;
        }
    }
    if profile[i1..=i2].iter().any(|&d| d != min) {
        return None;
    }
    if min > 0 && i1 != i2 {
        return None;
    }
    Some((i1, i2, min))
}

/// The gate node at the given row.
fn facing_node(sp: &Splitter, gate: &[NodeId], y: i32) -> NodeId {
    *gate
        .iter()
        .find(|&&v| sp.g.pos(v).y == y)
        .expect("facing gate node exists at a zero-distance row")
}

/// Maximal horizontal portal through `v`, ascending x, full-graph ids.
fn horizontal_portal(g: &GridGraph, v: NodeId) -> Vec<NodeId> {
    let mut first = v;
    while let Some(w) = g.neighbor(first, Dir::West) {
        first = w;
    }
    let mut run = vec![first];
    let mut cur = first;
    while let Some(w) = g.neighbor(cur, Dir::East) {
        run.push(w);
        cur = w;
    }
    run
}

/// Leftmost node of `portal` touching a hole on `side`, skipping the
/// excluded positions. A hole touches the portal through an unfilled cell
/// directly above (below) one of its segments, i.e. a cell bounded by two
/// consecutive portal nodes; cells diagonally past the portal's ends belong
/// to the complement around the portal, not to a hole it bounds. Returns
/// the node together with the touching cells (for the node-split contact
/// test).
fn hole_contact_node(
    sp: &Splitter,
    portal: &[NodeId],
    side: Dir,
    cover: &Cover,
    exclude: &[Pos],
) -> Option<(NodeId, Vec<Cell>)> {
    let dy = if side == Dir::North { 0 } else { -1 };
    let cells: Vec<Cell> = portal
        .windows(2)
        .map(|w| {
            let p = sp.g.pos(w[0]);
            Pos::new(p.x, p.y + dy)
        })
        .filter(|&c| !cover.filled(c))
        .collect();
    let node = portal
        .iter()
        .copied()
        .filter(|&v| !exclude.contains(&sp.g.pos(v)))
        .filter(|&v| {
            let p = sp.g.pos(v);
            cells.contains(&Pos::new(p.x, p.y + dy))
                || cells.contains(&Pos::new(p.x - 1, p.y + dy))
        })
        .min_by_key(|&v| (sp.g.pos(v).x, v))?;
    Some((node, cells))
}

/// Splits every maximal run (of the given orientation) formed by the alive
/// descendants of `originals`.
fn split_descendant_runs(
    sp: &mut Splitter,
    originals: &[NodeId],
    orientation: Orientation,
) -> Result<(), DecompError> {
    let mut candidates: Vec<NodeId> = originals
        .iter()
        .flat_map(|&v| sp.alive_descendants(v))
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    let is_candidate = |v: NodeId| candidates.binary_search(&v).is_ok();
    let along = orientation.along();

    let mut runs: Vec<Vec<NodeId>> = Vec::new();
    for &v in &candidates {
        if sp.g.neighbor(v, along.opposite()).map_or(false, &is_candidate) {
            continue;
        }
        let mut run = vec![v];
        let mut cur = v;
        while let Some(n) = sp.g.neighbor(cur, along) {
            if !is_candidate(n) {
                break;
            }
            run.push(n);
            cur = n;
        }
        // Half-distance portals are maximal: membership is closed under
        // along-portal adjacency.
        debug_assert!(sp.g.neighbor(cur, along).is_none());
        debug_assert!(sp.g.neighbor(run[0], along.opposite()).is_none());
        runs.push(run);
    }
    runs.sort_by_key(|r| *r.iter().min().unwrap());
    for run in runs {
        sp.split_at_portal(&run, orientation)?;
    }
    Ok(())
}
