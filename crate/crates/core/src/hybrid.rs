//! HYBRID-model cost accounting and message-level primitives.
//!
//! The round ledger realizes the per-stage round bounds as an auditable
//! cost model: every stage charges the literal formula of its bound with
//! constant 1. Pointer jumping, broadcast and aggregation additionally
//! support a message-level mode that simulates the per-round global sends
//! and fails loudly when a budget would be violated (deterministic
//! algorithms never exceed their budgets, so a violation is a bug).

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::HybridError;
use crate::grid::{Dir, GridGraph, NodeId, Pos};
use crate::holes::{detect_holes, HoleSet};

/// ceil(log2(n)) with ceil_log2(1) = 0.
pub fn ceil_log2(n: usize) -> u64 {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as u64
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HybridParams {
    pub n: usize,
    /// Multiplier for the local per-edge budget (lambda = cl * ceil(log n)).
    pub cl: u64,
    /// Multiplier for the global per-node budget (gamma = cg * ceil(log n)^2).
    pub cg: u64,
}

impl HybridParams {
    pub fn new(n: usize) -> Self {
        HybridParams { n, cl: 1, cg: 1 }
    }

    pub fn with_constants(n: usize, cl: u64, cg: u64) -> Self {
        assert!(cl > 0 && cg > 0, "budget constants must be strictly positive");
        HybridParams { n, cl, cg }
    }

    /// Bits per edge per round in the local mode.
    pub fn local_bits(&self) -> u64 {
        (self.cl * ceil_log2(self.n)).max(1)
    }

    /// Bits per node per round in the global mode.
    pub fn global_bits(&self) -> u64 {
        (self.cg * ceil_log2(self.n) * ceil_log2(self.n)).max(1)
    }

    /// Size of one identifier-sized message.
    pub fn msg_bits(&self) -> u64 {
        ceil_log2(self.n).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    CostModel,
    MessageLevel,
}

#[derive(Debug, Clone, Serialize)]
pub struct LedgerEntry {
    pub stage: String,
    pub size: usize,
    pub rounds: u64,
}

/// Audit log of simulated HYBRID rounds charged per pipeline stage.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RoundLedger {
    pub entries: Vec<LedgerEntry>,
}

impl RoundLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, stage: &str, size: usize, rounds: u64) {
        self.entries.push(LedgerEntry { stage: stage.to_string(), size, rounds });
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.rounds).sum()
    }

    pub fn rounds_of(&self, stage: &str) -> u64 {
        self.entries.iter().filter(|e| e.stage == stage).map(|e| e.rounds).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("stage,size,rounds\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{}\n", e.stage, e.size, e.rounds));
        }
        out.push_str(&format!("total,,{}\n", self.total()));
        out
    }
}

/// A path or cycle of node identifiers, the substrate of pointer jumping.
#[derive(Debug, Clone)]
pub struct Structure {
    pub ids: Vec<NodeId>,
    pub cycle: bool,
}

impl Structure {
    pub fn path(ids: Vec<NodeId>) -> Self {
        Structure { ids, cycle: false }
    }

    pub fn cycle(ids: Vec<NodeId>) -> Self {
        Structure { ids, cycle: true }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Per node and level i: the node at distance exactly 2^(i-1) left/right in
/// the base structure, or None past an endpoint.
#[derive(Debug, Clone)]
pub struct PointerStruct {
    pub structure: Structure,
    pub levels: usize,
    /// left[i-1][k] is l_{v,i} for the node at index k.
    pub left: Vec<Vec<Option<usize>>>,
    pub right: Vec<Vec<Option<usize>>>,
}

/// Runs pointer jumping on a path or cycle. Charges ceil(log2 L) rounds.
/// In message-level mode every per-round global send is counted against
/// the gamma budget.
pub fn pointer_jumping(
    structure: &Structure,
    params: &HybridParams,
    mode: SimMode,
    ledger: &mut RoundLedger,
) -> Result<PointerStruct, HybridError> {
    let len = structure.len();
    assert!(len >= 1, "structure must contain at least one node");
    let levels = ceil_log2(len) as usize;

    let idx_left = |k: usize, dist: usize| -> Option<usize> {
        if structure.cycle {
            Some((k + len - dist % len) % len)
        } else {
            k.checked_sub(dist)
        }
    };
    let idx_right = |k: usize, dist: usize| -> Option<usize> {
        if structure.cycle {
            Some((k + dist) % len)
        } else if k + dist < len {
            Some(k + dist)
        } else {
            None
        }
    };

    let mut left: Vec<Vec<Option<usize>>> = Vec::with_capacity(levels);
    let mut right: Vec<Vec<Option<usize>>> = Vec::with_capacity(levels);
    let mut budget = BudgetTracker::new(params, mode);
    for i in 1..=levels {
        let dist = 1usize << (i - 1);
        let l: Vec<Option<usize>> = (0..len).map(|k| idx_left(k, dist)).collect();
        let r: Vec<Option<usize>> = (0..len).map(|k| idx_right(k, dist)).collect();
        if i > 1 {
            // Round i: v sends l_{v,i-1} to r_{v,i-1} and vice versa.
            budget.next_round();
            for k in 0..len {
                let mut sends = 0;
                if idx_right(k, dist / 2).is_some() {
                    sends += 1;
                }
                if idx_left(k, dist / 2).is_some() {
                    sends += 1;
                }
                budget.send(structure.ids[k], sends * params.msg_bits())?;
            }
        }
        left.push(l);
        right.push(r);
    }
    ledger.charge("pointer_jumping", len, levels as u64);
    Ok(PointerStruct { structure: structure.clone(), levels, left, right })
}

struct BudgetTracker<'a> {
    params: &'a HybridParams,
    mode: SimMode,
    round: usize,
    sent: std::collections::HashMap<NodeId, u64>,
}

impl<'a> BudgetTracker<'a> {
    fn new(params: &'a HybridParams, mode: SimMode) -> Self {
        BudgetTracker { params, mode, round: 0, sent: Default::default() }
    }

    fn next_round(&mut self) {
        self.round += 1;
        self.sent.clear();
    }

    fn send(&mut self, node: NodeId, bits: u64) -> Result<(), HybridError> {
        if self.mode == SimMode::CostModel || bits == 0 {
            return Ok(());
        }
        let entry = self.sent.entry(node).or_insert(0);
        *entry += bits;
        if *entry > self.params.global_bits() {
            return Err(HybridError::BudgetExceeded {
                round: self.round,
                node,
                bits: *entry,
                budget: self.params.global_bits(),
            });
        }
        Ok(())
    }
}

impl PointerStruct {
    pub fn len(&self) -> usize {
        self.structure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.structure.is_empty()
    }

    /// Overlay adjacency (by structure index): base edges plus all shortcut
    /// pointers.
    pub fn overlay_adjacency(&self) -> Vec<Vec<usize>> {
        let len = self.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); len];
        let mut push = |a: usize, b: usize| {
            if a != b && !adj[a].contains(&b) {
                adj[a].push(b);
                adj[b].push(a);
            }
        };
        for k in 0..len {
            if k + 1 < len {
                push(k, k + 1);
            } else if self.structure.cycle && len > 1 {
                push(k, 0);
            }
        }
        for i in 0..self.levels {
            for k in 0..len {
                if let Some(l) = self.left[i][k] {
                    push(k, l);
                }
                if let Some(r) = self.right[i][k] {
                    push(k, r);
                }
            }
        }
        adj
    }

    pub fn max_degree(&self) -> usize {
        self.overlay_adjacency().iter().map(|a| a.len()).max().unwrap_or(0)
    }

    /// Eccentricity of one node in the overlay.
    pub fn eccentricity(&self, adj: &[Vec<usize>], start: usize) -> usize {
        let mut dist = vec![usize::MAX; adj.len()];
        let mut queue = VecDeque::new();
        dist[start] = 0;
        queue.push_back(start);
        let mut ecc = 0;
        while let Some(v) = queue.pop_front() {
            ecc = ecc.max(dist[v]);
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        ecc
    }

    /// Exact overlay diameter (all-pairs BFS; intended for moderate sizes).
    pub fn diameter(&self) -> usize {
        let adj = self.overlay_adjacency();
        (0..self.len()).map(|v| self.eccentricity(&adj, v)).max().unwrap_or(0)
    }
}

/// Broadcasts a message from `source_index` to every node on the structure.
/// Returns the per-index delivery flags and charges at most
/// 2 ceil(log2 L) rounds.
pub fn broadcast(
    ps: &PointerStruct,
    source_index: usize,
    params: &HybridParams,
    mode: SimMode,
    ledger: &mut RoundLedger,
) -> Result<Vec<bool>, HybridError> {
    let len = ps.len();
    let mut holds = vec![false; len];
    holds[source_index] = true;
    let mut budget = BudgetTracker::new(params, mode);
    let mut rounds = 0;
    for i in (0..=ps.levels).rev() {
        if len == 1 {
            break;
        }
        budget.next_round();
        rounds += 1;
        let snapshot = holds.clone();
        for k in 0..len {
            if !snapshot[k] {
                continue;
            }
            let targets = shortcut_targets(ps, k, i);
            budget.send(ps.structure.ids[k], targets.len() as u64 * params.msg_bits())?;
            for t in targets {
                holds[t] = true;
            }
        }
    }
    debug_assert!(holds.iter().all(|&h| h), "broadcast must reach every node");
    ledger.charge("broadcast", len, rounds);
    Ok(holds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateOp {
    Min,
    Max,
}

/// Aggregates the extremum of `values` so that every node knows it.
/// Duplicated extrema are resolved by value equality, so the result is
/// deterministic; callers aggregating identifiers pass them as values.
pub fn aggregate(
    ps: &PointerStruct,
    values: &[u64],
    op: AggregateOp,
    params: &HybridParams,
    mode: SimMode,
    ledger: &mut RoundLedger,
) -> Result<u64, HybridError> {
    assert_eq!(values.len(), ps.len());
    let len = ps.len();
    let mut best = values.to_vec();
    let mut budget = BudgetTracker::new(params, mode);
    let mut rounds = 0;
    // Two sweeps of decreasing shortcut lengths propagate the extremum both
    // ways along the structure.
    for _sweep in 0..2 {
        for i in (0..=ps.levels).rev() {
            if len == 1 {
                break;
            }
            budget.next_round();
            rounds += 1;
            let snapshot = best.clone();
            for k in 0..len {
                let targets = shortcut_targets(ps, k, i);
                budget.send(ps.structure.ids[k], targets.len() as u64 * params.msg_bits())?;
                for t in targets {
                    best[t] = match op {
                        AggregateOp::Min => best[t].min(snapshot[k]),
                        AggregateOp::Max => best[t].max(snapshot[k]),
                    };
                }
            }
        }
    }
    let expect = match op {
        AggregateOp::Min => *values.iter().min().unwrap(),
        AggregateOp::Max => *values.iter().max().unwrap(),
    };
    debug_assert!(best.iter().all(|&b| b == expect), "all nodes agree on the extremum");
    ledger.charge("aggregate", len, rounds);
    Ok(expect)
}

fn shortcut_targets(ps: &PointerStruct, k: usize, level: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(2);
    if level == 0 {
        let len = ps.len();
        if k + 1 < len {
            out.push(k + 1);
        } else if ps.structure.cycle && len > 1 {
            out.push(0);
        }
        if k > 0 {
            out.push(k - 1);
        } else if ps.structure.cycle && len > 1 {
            out.push(len - 1);
        }
    } else {
        if let Some(l) = ps.left[level - 1][k] {
            out.push(l);
        }
        if let Some(r) = ps.right[level - 1][k] {
            out.push(r);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

// ---------------------------------------------------------------------------
// Euler tour

/// A rooted tree over indices 0..n with explicit adjacency.
#[derive(Debug, Clone)]
pub struct Tree {
    pub adj: Vec<Vec<usize>>,
    pub root: usize,
}

/// One virtual node of an Euler tour path: the directed tree edge it
/// represents, owned by its source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EulerNode {
    pub owner: usize,
    pub to: usize,
}

pub const EULER_MAX_DEGREE: usize = 4;

/// Flattens a constant-degree rooted tree into a path of virtual nodes via
/// its DFS Euler tour; every tree edge is visited exactly twice and each
/// original node owns at most `degree` virtual nodes. Charges O(1) rounds.
pub fn euler_tour(tree: &Tree, ledger: &mut RoundLedger) -> Result<Vec<EulerNode>, HybridError> {
    for (v, a) in tree.adj.iter().enumerate() {
        if a.len() > EULER_MAX_DEGREE {
            return Err(HybridError::DegreeTooHigh {
                node: v,
                degree: a.len(),
                max: EULER_MAX_DEGREE,
            });
        }
    }
    let n = tree.adj.len();
    let mut path = Vec::new();
    if n > 1 {
        // Iterative DFS in local neighbor order.
        let mut visited = vec![false; n];
        let mut stack = vec![(tree.root, 0usize)];
        visited[tree.root] = true;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            let mut advanced = false;
            while *next < tree.adj[v].len() {
                let w = tree.adj[v][*next];
                *next += 1;
                if !visited[w] {
                    visited[w] = true;
                    path.push(EulerNode { owner: v, to: w });
                    stack.push((w, 0));
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                stack.pop();
                if let Some(&(parent, _)) = stack.last() {
                    path.push(EulerNode { owner: v, to: parent });
                }
            }
        }
    }
    ledger.charge("euler_tour", n, 1);
    Ok(path)
}

// ---------------------------------------------------------------------------
// Hole identifiers

#[derive(Debug)]
pub struct HoleIds {
    pub holes: HoleSet,
    /// Identifier per hole index (min east-incident node), if any.
    pub ids: Vec<Option<NodeId>>,
}

/// Assigns each hole its unique identifier (the minimum east-incident node)
/// and charges the boundary broadcasts: 2 ceil(log2 L) for the longest
/// boundary, since disjoint boundaries run in parallel.
pub fn assign_hole_ids(g: &GridGraph, ledger: &mut RoundLedger) -> HoleIds {
    let holes = detect_holes(g);
    let ids: Vec<Option<NodeId>> = holes.holes.iter().map(|h| h.id).collect();
    let max_boundary = holes.holes.iter().map(|h| h.boundary.len()).max().unwrap_or(1);
    ledger.charge("assign_hole_ids", g.len(), 2 * ceil_log2(max_boundary.max(1)));
    HoleIds { holes, ids }
}

// ---------------------------------------------------------------------------
// Overlay path

#[derive(Debug)]
pub struct OverlayPath {
    /// Undirected edges of the spanning tree (vertical edges + connectors).
    pub tree_edges: Vec<(NodeId, NodeId)>,
    /// Euler tour of the tree as a path of virtual nodes.
    pub euler: Vec<EulerNode>,
}

/// Builds the spanning overlay: all vertical edges, one horizontal
/// connector per portal bottom where able, and cycle-breaking removals at
/// the leftmost node atop each inner hole. The Euler tour flattens the
/// tree into a path. Charges ceil(log2 n) rounds.
pub fn overlay_path(g: &GridGraph, ledger: &mut RoundLedger) -> OverlayPath {
    let holes = detect_holes(g);
    let portals = g.portals(crate::grid::Orientation::Vertical);
    let mut connectors: Vec<(NodeId, NodeId)> = Vec::new();
    for members in &portals.members {
        let bottom = members[0];
        for dir in [Dir::West, Dir::East] {
            if let Some(w) = g.neighbor(bottom, dir) {
                let key = if bottom < w { (bottom, w) } else { (w, bottom) };
                if !connectors.contains(&key) {
                    connectors.push(key);
                }
            }
        }
    }
    // Break the cycle around each inner hole: the leftmost node directly on
    // top of the hole drops its west connector.
    for (hi, hole) in holes.holes.iter().enumerate() {
        if !hole.bounded {
            continue;
        }
        let mut tops: Vec<NodeId> = g
            .alive_ids()
            .filter(|&v| {
                g.neighbor(v, Dir::South).is_none() && {
                    let below = g.pos(v).step(Dir::South);
                    let cell = Pos::new(below.x, below.y); // cell with SW corner at `below` sits NE of the missing point; use the cell containing it
                    holes.hole_of_cell(cell) == Some(hi)
                }
            })
            .collect();
        tops.sort_by_key(|&v| (g.pos(v).x, g.pos(v).y, v));
        if let Some(&top) = tops.first() {
            if let Some(w) = g.neighbor(top, Dir::West) {
                let key = if top < w { (top, w) } else { (w, top) };
                connectors.retain(|&e| e != key);
            }
        }
    }

    let mut tree_edges: Vec<(NodeId, NodeId)> = Vec::new();
    for v in g.alive_ids() {
        if let Some(w) = g.neighbor(v, Dir::North) {
            tree_edges.push((v, w));
        }
    }
    tree_edges.extend(connectors);

    // Compact to indices for the Euler tour.
    let ids: Vec<NodeId> = g.alive_ids().collect();
    let index_of = {
        let mut m = std::collections::HashMap::new();
        for (i, &v) in ids.iter().enumerate() {
            m.insert(v, i);
        }
        m
    };
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
    for &(a, b) in &tree_edges {
        let (ia, ib) = (index_of[&a], index_of[&b]);
        adj[ia].push(ib);
        adj[ib].push(ia);
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let tree = Tree { adj, root: 0 };
    let mut scratch = RoundLedger::new();
    let euler = euler_tour(&tree, &mut scratch)
        .expect("grid-induced overlay trees have degree at most 4");
    let euler = euler
        .into_iter()
        .map(|e| EulerNode { owner: ids[e.owner], to: ids[e.to] })
        .collect();
    ledger.charge("overlay_path", g.len(), ceil_log2(g.len()));
    OverlayPath { tree_edges, euler }
}

/// Pipelined all-broadcast cost over the overlay butterfly: one
/// identifier-sized message slot per round plus the pipeline latency.
pub fn butterfly_cost(messages: usize, params: &HybridParams) -> u64 {
    messages as u64 + ceil_log2(params.n)
}
