//! Landmark marking, landmark-graph construction, and landmark-path search.
//!
//! Landmarks are projected onto original nodes: copies at one position
//! collapse into a single landmark carrying the union of kinds and gate
//! memberships. Edge weights are exact within-region grid distances; every
//! edge carries the identifiers of the regions containing its underlying
//! path, and every landmark the identifiers of the gates it lies on.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::decomp::Decomposition;
use crate::error::LandmarkError;
use crate::grid::{Dir, GridGraph, NodeId, Orientation, Pos};
use crate::sssp::{build_portal_graphs, spsp_with, SpspSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum LandmarkKind {
    GateEndpoint,
    OverhangInduced,
    Projected,
}

#[derive(Debug, Clone, Serialize)]
pub struct Landmark {
    /// Original (base graph) node.
    pub orig: NodeId,
    pub pos: Pos,
    pub kinds: Vec<LandmarkKind>,
    /// Gates (indices into the decomposition) whose positions contain this
    /// landmark.
    pub gates: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandmarkEdge {
    /// Endpoints as landmark indices, u < v.
    pub u: usize,
    pub v: usize,
    pub weight: u32,
    /// Indices of regions containing the edge's underlying path.
    pub regions: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct LandmarkGraph {
    pub landmarks: Vec<Landmark>,
    pub edges: Vec<LandmarkEdge>,
    /// Adjacency: landmark -> incident edge indices.
    pub adj: Vec<Vec<usize>>,
    /// Original node -> landmark index.
    pub index_of: HashMap<NodeId, usize>,
}

impl LandmarkGraph {
    pub fn is_landmark(&self, orig: NodeId) -> bool {
        self.index_of.contains_key(&orig)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(|a| a.len()).max().unwrap_or(0)
    }
}

/// Marks all landmarks of the decomposition: gate endpoints, overhang-induced
/// landmarks, and their projections along full perpendicular portals.
pub fn mark_landmarks(d: &Decomposition) -> Vec<Landmark> {
    let mut kinds: BTreeMap<NodeId, BTreeSet<LandmarkKind>> = BTreeMap::new();
    let gates_at = gate_positions(d);

    // Kind i: gate endpoints, and nodes where gates of both orientations
    // intersect.
    for gate in &d.gates {
        for &p in [gate.positions.first(), gate.positions.last()].into_iter().flatten() {
            kinds
                .entry(d.base.node_at(p).unwrap())
                .or_default()
                .insert(LandmarkKind::GateEndpoint);
        }
    }
    for (&p, gates) in &gates_at {
        let has_v = gates.iter().any(|&g| d.gates[g].orientation == Orientation::Vertical);
        let has_h = gates.iter().any(|&g| d.gates[g].orientation == Orientation::Horizontal);
        if has_v && has_h {
            kinds
                .entry(d.base.node_at(p).unwrap())
                .or_default()
                .insert(LandmarkKind::GateEndpoint);
        }
    }

    // Kind ii: overhang-induced landmarks, evaluated per (gate, side region,
    // gate node) on the virtual copy inside the region.
    for (gi, gate) in d.gates.iter().enumerate() {
        let perp = gate.orientation.perpendicular();
        for &region in &[gate.region_a, gate.region_b] {
            let walls = &d.regions[region].walls;
            let mut wall_of: HashMap<NodeId, Vec<usize>> = HashMap::new();
            for (wi, w) in walls.iter().enumerate() {
                for &v in &w.nodes {
                    wall_of.entry(v).or_default().push(wi);
                }
            }
            let on_other_gate = |v: NodeId| -> bool {
                d.regions[region]
                    .gates
                    .iter()
                    .any(|&og| og != gi && d.gates[og].side_nodes(region).contains(&v))
            };
            let sides = match perp {
                Orientation::Vertical => [Dir::East, Dir::West],
                Orientation::Horizontal => [Dir::North, Dir::South],
            };
            for &cv in gate.side_nodes(region) {
                let run = perpendicular_run(&d.graph, cv, perp);
                if run.len() < 2 {
                    continue;
                }
                let u = *run.last().unwrap();
                let u_wall: &[usize] = wall_of.get(&u).map(|w| w.as_slice()).unwrap_or(&[]);
                let u_on_gate = on_other_gate(u);
                // An overhang is a wall stepping into the portal's flank: a
                // run node whose lateral neighbor disappears while the
                // previous node (towards the gate) still had one.
                let overhang = sides.iter().any(|&side| {
                    run.windows(2).any(|w| {
                        let step = d.graph.neighbor(w[0], side).is_some()
                            && d.graph.neighbor(w[1], side).is_none();
                        step && wall_of.get(&w[1]).is_some_and(|pw| {
                            u_on_gate || pw.iter().any(|wi| u_wall.contains(wi))
                        })
                    })
                });
                if overhang {
                    kinds
                        .entry(d.graph.orig(cv))
                        .or_default()
                        .insert(LandmarkKind::OverhangInduced);
                }
            }
        }
    }

    // Kind iii: projections along the full original-graph portal
    // perpendicular to the gate, regardless of intermediate regions. A
    // node does not project onto itself.
    let marked: BTreeSet<NodeId> = kinds.keys().copied().collect();
    let pv = d.base.portals(Orientation::Vertical);
    let ph = d.base.portals(Orientation::Horizontal);
    let mut portal_marks_v = vec![0usize; pv.count()];
    let mut portal_marks_h = vec![0usize; ph.count()];
    for &orig in &marked {
        portal_marks_v[pv.of_node(orig)] += 1;
        portal_marks_h[ph.of_node(orig)] += 1;
    }
    for (&p, gates) in &gates_at {
        let orig = d.base.node_at(p).unwrap();
        let own = usize::from(marked.contains(&orig));
        for &g in gates {
            let hit = match d.gates[g].orientation.perpendicular() {
                Orientation::Vertical => portal_marks_v[pv.of_node(orig)] > own,
                Orientation::Horizontal => portal_marks_h[ph.of_node(orig)] > own,
            };
            if hit {
                kinds.entry(orig).or_default().insert(LandmarkKind::Projected);
            }
        }
    }

    kinds
        .into_iter()
        .map(|(orig, ks)| {
            let pos = d.base.pos(orig);
            Landmark {
                orig,
                pos,
                kinds: ks.into_iter().collect(),
                gates: gates_at.get(&pos).cloned().unwrap_or_default(),
            }
        })
        .collect()
}

/// Gate indices per position.
fn gate_positions(d: &Decomposition) -> BTreeMap<Pos, Vec<usize>> {
    let mut map: BTreeMap<Pos, Vec<usize>> = BTreeMap::new();
    for (gi, gate) in d.gates.iter().enumerate() {
        for &p in &gate.positions {
            map.entry(p).or_default().push(gi);
        }
    }
    map
}

/// Maximal run of region nodes perpendicular to a gate, starting at the
/// gate copy `cv` and walking into the region. The copy is an endpoint of
/// the portal restricted to the region, so only one direction extends.
fn perpendicular_run(g: &GridGraph, cv: NodeId, perp: Orientation) -> Vec<NodeId> {
    let (fwd, back) = match perp {
        Orientation::Vertical => (Dir::North, Dir::South),
        Orientation::Horizontal => (Dir::East, Dir::West),
    };
    let dir = if g.neighbor(cv, back).is_some() && g.neighbor(cv, fwd).is_none() {
        back
    } else {
        fwd
    };
    let mut run = vec![cv];
    let mut cur = cv;
    while let Some(n) = g.neighbor(cur, dir) {
        run.push(n);
        cur = n;
    }
    run
}

/// Builds the landmark graph: rule (i) connects consecutive landmarks on
/// the same original-graph portal, rule (ii) connects each landmark to the
/// closest landmark on every other gate of a shared region.
pub fn build_landmark_graph(
    d: &Decomposition,
    landmarks: Vec<Landmark>,
) -> Result<LandmarkGraph, LandmarkError> {
    let mut index_of = HashMap::new();
    for (i, l) in landmarks.iter().enumerate() {
        index_of.insert(l.orig, i);
    }

    let mut edges: Vec<LandmarkEdge> = Vec::new();
    let push_edge = |edges: &mut Vec<LandmarkEdge>, u: usize, v: usize, weight: u32, region: Option<usize>| {
        if u == v {
            return;
        }
        let (u, v) = (u.min(v), u.max(v));
        if let Some(e) = edges.iter_mut().find(|e| e.u == u && e.v == v && e.weight == weight) {
            if let Some(r) = region {
                if !e.regions.contains(&r) {
                    e.regions.push(r);
                    e.regions.sort_unstable();
                }
            }
            return;
        }
        edges.push(LandmarkEdge { u, v, weight, regions: region.into_iter().collect() });
    };

    // Rule (i): consecutive landmarks along every original portal. The
    // connecting segment is straight, so its length is exact; region labels
    // are the regions containing the whole segment.
    for orientation in [Orientation::Vertical, Orientation::Horizontal] {
        let portals = d.base.portals(orientation);
        for members in &portals.members {
            let mut on_portal: Vec<usize> =
                members.iter().filter_map(|m| index_of.get(m).copied()).collect();
            on_portal.sort_by_key(|&i| {
                let p = landmarks[i].pos;
                (p.x, p.y)
            });
            for w in on_portal.windows(2) {
                let (a, b) = (w[0], w[1]);
                let pa = landmarks[a].pos;
                let pb = landmarks[b].pos;
                let weight = (pb.x - pa.x).unsigned_abs() + (pb.y - pa.y).unsigned_abs();
                let regions = segment_regions(d, pa, pb);
                if regions.is_empty() {
                    push_edge(&mut edges, a, b, weight, None);
                }
                for r in regions {
                    push_edge(&mut edges, a, b, weight, Some(r));
                }
            }
        }
    }

    // Rule (ii): one SPSP per (region, gate); the closest point of every
    // landmark of the region on that gate must itself be a landmark.
    for region in &d.regions {
        let (sub, to_parent) = d.graph.subgraph(&region.nodes);
        let orig_to_sub: HashMap<NodeId, usize> = to_parent
            .iter()
            .enumerate()
            .map(|(i, &v)| (d.graph.orig(v), i))
            .collect();
        let Ok((pv, ph)) = build_portal_graphs(&sub) else {
            continue; // non-simple region: reported by the verifier
        };
        let incident: Vec<usize> = landmarks
            .iter()
            .enumerate()
            .filter(|(_, l)| {
                l.gates.iter().any(|&g| d.gates[g].touches(region.index))
                    && orig_to_sub.contains_key(&l.orig)
            })
            .map(|(i, _)| i)
            .collect();
        for &gi in &region.gates {
            let gate = &d.gates[gi];
            let mut side: Vec<usize> = gate
                .side_nodes(region.index)
                .iter()
                .map(|&v| orig_to_sub[&d.graph.orig(v)])
                .collect();
            side.sort_unstable();
            side.dedup();
            let sol: SpspSolution =
                spsp_with(&sub, &pv, &ph, &side).expect("portal graphs prebuilt");
            for &li in &incident {
                let l = &landmarks[li];
                if l.gates.contains(&gi) {
                    continue; // the landmark lies on this gate
                }
                let ls = orig_to_sub[&l.orig];
                let entry = sol.entry[ls].expect("regions are connected");
                let entry_orig = d.graph.orig(to_parent[entry]);
                let Some(&target) = index_of.get(&entry_orig) else {
                    return Err(LandmarkError::ClosestPointNotLandmark {
                        point: entry_orig,
                        gate: gi,
                    });
                };
                push_edge(&mut edges, li, target, sol.d[ls], Some(region.index));
            }
        }
    }

    edges.sort_by(|a, b| (a.u, a.v, a.weight).cmp(&(b.u, b.v, b.weight)));
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); landmarks.len()];
    for (ei, e) in edges.iter().enumerate() {
        adj[e.u].push(ei);
        adj[e.v].push(ei);
    }
    Ok(LandmarkGraph { landmarks, edges, adj, index_of })
}

/// Regions containing the whole straight segment between two positions.
fn segment_regions(d: &Decomposition, a: Pos, b: Pos) -> Vec<usize> {
    let steps = (b.x - a.x).abs() + (b.y - a.y).abs();
    let dx = (b.x - a.x).signum();
    let dy = (b.y - a.y).signum();
    let mut common: Option<BTreeSet<usize>> = None;
    for k in 0..=steps {
        let p = Pos::new(a.x + dx * k, a.y + dy * k);
        let orig = d.base.node_at(p).expect("portal segments consist of nodes");
        let rs: BTreeSet<usize> = d.regions_of_original(orig).into_iter().collect();
        common = Some(match common {
            None => rs,
            Some(c) => c.intersection(&rs).copied().collect(),
        });
    }
    common.unwrap_or_default().into_iter().collect()
}

/// An attachment of a terminal node to the landmark graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Attachment {
    pub landmark: usize,
    pub dist: u32,
    /// Region the attachment path runs through.
    pub region: usize,
    /// Gate on which the landmark serves the terminal.
    pub gate: usize,
}

#[derive(Debug, Clone)]
pub struct LandmarkPath {
    /// Landmark indices from the source side to the target side.
    pub landmarks: Vec<usize>,
    /// Edge indices between consecutive landmarks.
    pub edges: Vec<usize>,
    pub s_attach: Attachment,
    pub t_attach: Attachment,
    pub length: u64,
}

/// Deterministic shortest landmark path between two attached terminals.
/// Ties break by (length, hop count, lexicographic landmark-id sequence).
pub fn landmark_shortest_path(
    lg: &LandmarkGraph,
    s_attach: &[Attachment],
    t_attach: &[Attachment],
) -> Result<LandmarkPath, LandmarkError> {
    if s_attach.is_empty() || t_attach.is_empty() {
        return Err(LandmarkError::NoPath);
    }
    let n = lg.landmarks.len();
    let mut dist: Vec<(u64, u32)> = vec![(u64::MAX, u32::MAX); n];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n]; // (landmark, edge)
    let mut seed: Vec<Option<usize>> = vec![None; n];
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(u64, u32, usize)>> =
        Default::default();
    for (ai, a) in s_attach.iter().enumerate() {
        let cand = (a.dist as u64, 1u32);
        if cand < dist[a.landmark] {
            dist[a.landmark] = cand;
            parent[a.landmark] = None;
            seed[a.landmark] = Some(ai);
            heap.push(std::cmp::Reverse((cand.0, cand.1, a.landmark)));
        }
    }
    while let Some(std::cmp::Reverse((dl, hops, u))) = heap.pop() {
        if (dl, hops) > dist[u] {
            continue;
        }
        for &ei in &lg.adj[u] {
            let e = &lg.edges[ei];
            let v = if e.u == u { e.v } else { e.u };
            let cand = (dl + e.weight as u64, hops + 1);
            let replace = cand < dist[v]
                || (cand == dist[v]
                    && chain_with(lg, u, &parent) < chain_key(lg, parent[v], &parent));
            if replace {
                dist[v] = cand;
                parent[v] = Some((u, ei));
                seed[v] = None;
                heap.push(std::cmp::Reverse((cand.0, cand.1, v)));
            }
        }
    }

    // Close at the target side.
    let mut best: Option<(u64, u32, usize, usize)> = None;
    for (ai, a) in t_attach.iter().enumerate() {
        if dist[a.landmark].0 == u64::MAX {
            continue;
        }
        let cand = (dist[a.landmark].0 + a.dist as u64, dist[a.landmark].1, a.landmark, ai);
        best = Some(match best {
            None => cand,
            Some(cur) => {
                let better = (cand.0, cand.1) < (cur.0, cur.1)
                    || ((cand.0, cand.1) == (cur.0, cur.1)
                        && chain_with(lg, cand.2, &parent) < chain_with(lg, cur.2, &parent));
                if better {
                    cand
                } else {
                    cur
                }
            }
        });
    }
    let (length, _, end, t_ai) = best.ok_or(LandmarkError::NoPath)?;

    let mut landmarks = vec![end];
    let mut edges = Vec::new();
    let mut cur = end;
    while let Some((p, e)) = parent[cur] {
        landmarks.push(p);
        edges.push(e);
        cur = p;
    }
    landmarks.reverse();
    edges.reverse();
    let s_ai = seed[cur].expect("path starts at a seeded landmark");
    Ok(LandmarkPath {
        landmarks,
        edges,
        s_attach: s_attach[s_ai],
        t_attach: t_attach[t_ai],
        length,
    })
}

/// Landmark-id sequence of the best-known path ending at the parent link.
fn chain_key(
    lg: &LandmarkGraph,
    from: Option<(usize, usize)>,
    parents: &[Option<(usize, usize)>],
) -> Vec<NodeId> {
    let mut seq = Vec::new();
    let mut cur = from;
    while let Some((p, _)) = cur {
        seq.push(lg.landmarks[p].orig);
        cur = parents[p];
    }
    seq.reverse();
    seq
}

/// Sequence including the node itself.
fn chain_with(lg: &LandmarkGraph, node: usize, parents: &[Option<(usize, usize)>]) -> Vec<NodeId> {
    let mut seq = chain_key(lg, parents[node], parents);
    seq.push(lg.landmarks[node].orig);
    seq
}
