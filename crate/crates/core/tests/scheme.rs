//! End-to-end properties of the landmark graph and routing scheme on
//! fixtures and hand-built decompositions.

use std::collections::VecDeque;

use gridroute::decomp::{Decomposition, Splitter};
use gridroute::dist::bfs;
use gridroute::fixtures;
use gridroute::grid::{GridGraph, NodeId, Orientation, Pos};
use gridroute::hybrid::HybridParams;
use gridroute::landmarks::{landmark_shortest_path, Attachment, LandmarkKind};
use gridroute::pipeline::{run_pipeline, Pipeline};
use gridroute::routing::{measure_sizes, next_gate, route, verify_region_sequences};

fn at(g: &GridGraph, x: i32, y: i32) -> NodeId {
    g.node_at(Pos::new(x, y)).unwrap()
}

/// 4x2 rectangle split at the x=2 column: two regions, one gate.
fn two_region_pipeline() -> Pipeline {
    let g = GridGraph::build(&fixtures::rect_points(4, 2)).unwrap();
    let col = vec![at(&g, 2, 0), at(&g, 2, 1)];
    let mut sp = Splitter::new(g.clone());
    sp.split_at_portal(&col, Orientation::Vertical).unwrap();
    let d = Decomposition::from_splitter(g, sp, 0);
    let landmarks = gridroute::landmarks::mark_landmarks(&d);
    let lg = gridroute::landmarks::build_landmark_graph(&d, landmarks).unwrap();
    let scheme = gridroute::routing::build_scheme(&d, &lg).unwrap();
    let ids = gridroute::routing::assign_identifiers(&d);
    Pipeline {
        decomposition: d,
        stats: Default::default(),
        landmark_graph: lg,
        scheme,
        ids,
        ledger: Default::default(),
    }
}

#[test]
fn rect_has_no_landmarks() {
    let p = run_pipeline(&fixtures::rect_3x2(), &HybridParams::new(6)).unwrap();
    assert!(p.landmark_graph.landmarks.is_empty());
}

#[test]
fn two_region_landmarks_are_gate_endpoints() {
    let p = two_region_pipeline();
    let lg = &p.landmark_graph;
    assert_eq!(lg.landmarks.len(), 2);
    let mut pos: Vec<Pos> = lg.landmarks.iter().map(|l| l.pos).collect();
    pos.sort();
    assert_eq!(pos, vec![Pos::new(2, 0), Pos::new(2, 1)]);
    assert!(lg
        .landmarks
        .iter()
        .all(|l| l.kinds == vec![LandmarkKind::GateEndpoint]));
    // One rule-(i) edge along the gate.
    assert_eq!(lg.edges.len(), 1);
    assert_eq!(lg.edges[0].weight, 1);
}

#[test]
fn two_region_labels_and_next_gate() {
    let p = two_region_pipeline();
    let d = &p.decomposition;
    let g = &d.base;
    // Interior node: two entries, the gate's endpoint landmarks.
    let v = at(g, 0, 0);
    let vl = &p.scheme.labels[v];
    assert_eq!(vl.entries.len(), 2);
    let dists: Vec<u32> = vl.entries.iter().map(|e| e.dist).collect();
    assert_eq!(dists.iter().min(), Some(&2));
    // A node on the gate: distances are pure offsets.
    let on_gate = at(g, 2, 1);
    for e in &p.scheme.labels[on_gate].entries {
        let lp = p.landmark_graph.landmarks[e.landmark].pos;
        assert_eq!(e.dist, (lp.y - 1).unsigned_abs());
    }
    // Cross-region query returns the single gate.
    let t = at(g, 3, 0);
    let gate = next_gate(d, &p.landmark_graph, &p.scheme, v, &p.scheme.labels[t]).unwrap();
    assert_eq!(d.gates[gate].positions, vec![Pos::new(2, 0), Pos::new(2, 1)]);
}

#[test]
fn two_region_routes_exactly() {
    let p = two_region_pipeline();
    let g = &p.decomposition.base;
    for s in g.alive_ids() {
        let oracle = bfs(g, s);
        for t in g.alive_ids() {
            let trace = route(&p.decomposition, &p.landmark_graph, &p.scheme, s, t).unwrap();
            assert_eq!((trace.len() - 1) as u32, oracle[t], "{s}->{t}");
        }
    }
}

#[test]
fn label_entry_distances_match_bfs() {
    // Entries are exact in-region distances to their landmarks.
    for g in [fixtures::donut(), fixtures::double_donut()] {
        let p = run_pipeline(&g, &HybridParams::new(g.len())).unwrap();
        for v in g.alive_ids() {
            for e in &p.scheme.labels[v].entries {
                let lm = p.landmark_graph.landmarks[e.landmark].orig;
                let proj = p.decomposition.projected(e.region);
                let dr = restricted_bfs(&g, &proj, v);
                assert_eq!(dr[lm], e.dist, "node {v} entry {e:?}");
            }
        }
    }
}

#[test]
fn landmark_edges_match_restricted_bfs() {
    let g = fixtures::donut();
    let p = run_pipeline(&g, &HybridParams::new(g.len())).unwrap();
    let lg = &p.landmark_graph;
    assert!(!lg.edges.is_empty());
    for e in &lg.edges {
        let (u, v) = (lg.landmarks[e.u].orig, lg.landmarks[e.v].orig);
        let best = e
            .regions
            .iter()
            .map(|&r| restricted_bfs(&g, &p.decomposition.projected(r), u)[v])
            .min()
            .unwrap_or(u32::MAX);
        assert_eq!(best, e.weight, "edge {e:?}");
    }
}

#[test]
fn landmark_degree_is_bounded() {
    for (g, holes) in [(fixtures::donut(), 1), (fixtures::double_donut(), 2)] {
        let p = run_pipeline(&g, &HybridParams::new(g.len())).unwrap();
        let max_gates = p
            .decomposition
            .regions
            .iter()
            .map(|r| r.gates.len())
            .max()
            .unwrap_or(0);
        // Rule (i) contributes at most 4 neighbors (two per orientation),
        // rule (ii) at most one per (region, gate) pair.
        let bound = 4 + 4 * max_gates;
        assert!(
            p.landmark_graph.max_degree() <= bound,
            "|H|={holes}: degree {} > bound {bound}",
            p.landmark_graph.max_degree()
        );
    }
}

#[test]
fn landmark_pair_distance_bounded_by_region_distance() {
    // Within every region, the landmark-graph distance between two of its
    // landmarks is at most the region-restricted grid distance.
    let g = fixtures::double_donut();
    let p = run_pipeline(&g, &HybridParams::new(g.len())).unwrap();
    let lg = &p.landmark_graph;
    for region in &p.decomposition.regions {
        let proj = p.decomposition.projected(region.index);
        let incident: Vec<usize> = (0..lg.landmarks.len())
            .filter(|&i| {
                lg.landmarks[i]
                    .gates
                    .iter()
                    .any(|&gi| p.decomposition.gates[gi].touches(region.index))
                    && proj.binary_search(&lg.landmarks[i].orig).is_ok()
            })
            .collect();
        for &a in &incident {
            let dr = restricted_bfs(&g, &proj, lg.landmarks[a].orig);
            for &b in &incident {
                if a == b {
                    continue;
                }
                let s = [Attachment { landmark: a, dist: 0, region: region.index, gate: 0 }];
                let t = [Attachment { landmark: b, dist: 0, region: region.index, gate: 0 }];
                let path = landmark_shortest_path(lg, &s, &t).unwrap();
                assert!(
                    path.length <= dr[lg.landmarks[b].orig] as u64,
                    "region {} landmarks {a}->{b}: lambda {} > region {}",
                    region.index,
                    path.length,
                    dr[lg.landmarks[b].orig]
                );
            }
        }
    }
}

#[test]
fn theorem_sequences_hold_on_fixtures() {
    for g in [fixtures::donut(), fixtures::double_donut()] {
        let p = run_pipeline(&g, &HybridParams::new(g.len())).unwrap();
        let ids: Vec<NodeId> = g.alive_ids().collect();
        let mut pairs = Vec::new();
        for &s in &ids {
            for &t in &ids {
                if s != t {
                    pairs.push((s, t));
                }
            }
        }
        let rep = verify_region_sequences(&p.decomposition, &p.landmark_graph, &p.scheme, &pairs);
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.pairs_checked > 0);
    }
}

#[test]
fn corrupted_landmark_graph_is_detected() {
    // Deleting a region-crossing edge makes some constrained route longer.
    let g = fixtures::double_donut();
    let p = run_pipeline(&g, &HybridParams::new(g.len())).unwrap();
    let ids: Vec<NodeId> = g.alive_ids().collect();
    let mut pairs = Vec::new();
    for &s in &ids {
        for &t in &ids {
            if s != t {
                pairs.push((s, t));
            }
        }
    }
    let mut found = false;
    for drop in 0..p.landmark_graph.edges.len() {
        let mut lg = p.landmark_graph.clone();
        lg.edges.remove(drop);
        for adj in &mut lg.adj {
            adj.clear();
        }
        let edges = lg.edges.clone();
        for (ei, e) in edges.iter().enumerate() {
            lg.adj[e.u].push(ei);
            lg.adj[e.v].push(ei);
        }
        let rep = verify_region_sequences(&p.decomposition, &lg, &p.scheme, &pairs);
        if !rep.passed() {
            found = true;
            break;
        }
    }
    assert!(found, "no single edge deletion was detected");
}

#[test]
fn labels_are_deterministic() {
    let g = fixtures::double_donut();
    let a = run_pipeline(&g, &HybridParams::new(g.len())).unwrap();
    let b = run_pipeline(&g, &HybridParams::new(g.len())).unwrap();
    let dump = |p: &Pipeline| {
        p.scheme
            .labels
            .iter()
            .map(|l| format!("{:?}|{:?}|{:?}", l.id, l.regions, l.entries))
            .collect::<Vec<_>>()
    };
    assert_eq!(dump(&a), dump(&b));
    assert_eq!(
        measure_sizes(&a.decomposition, &a.landmark_graph, &a.scheme).max_label_bits,
        measure_sizes(&b.decomposition, &b.landmark_graph, &b.scheme).max_label_bits
    );
}

#[test]
fn gate_next_hops_decrease_gate_distance() {
    let g = fixtures::double_donut();
    let p = run_pipeline(&g, &HybridParams::new(g.len())).unwrap();
    for table in &p.scheme.tables {
        for (_, sol) in &table.gate_spsp {
            for v in table.sub.alive_ids() {
                if let Some(w) = sol.next_hop[v] {
                    assert_eq!(sol.d[w] + 1, sol.d[v]);
                }
            }
        }
    }
}

fn restricted_bfs(g: &GridGraph, allowed: &[NodeId], source: NodeId) -> Vec<u32> {
    let mut ok = vec![false; g.id_bound()];
    for &v in allowed {
        ok[v] = true;
    }
    let mut dist = vec![u32::MAX; g.id_bound()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if ok[w] && dist[w] == u32::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}
