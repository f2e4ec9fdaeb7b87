//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (run with `--nocapture` to see them). Every tolerance and bound is
//! pinned here.
//!
//! The instance suite: the four canonical fixtures, a serpentine corridor,
//! and twenty seeded random-holes instances up to n = 2000 and |H| = 12.

use std::sync::OnceLock;

use gridroute::decomp::{
    decompose, simple_decomposition, verify_decomposition, Splitter, VerifyDepth,
};
use gridroute::dist::bfs;
use gridroute::fixtures;
use gridroute::gen;
use gridroute::grid::{GridGraph, NodeId};
use gridroute::holes::{detect_holes, inner_hole_count};
use gridroute::hybrid::{
    self, ceil_log2, HybridParams, RoundLedger, SimMode, Structure,
};
use gridroute::pipeline::{run_pipeline, Pipeline};
use gridroute::routing::{measure_sizes, route, verify_region_sequences};
use gridroute::sssp;
use gridroute::udg;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned bounds.
const ROUTING_PAIRS_PER_INSTANCE: usize = 1000;
const EXHAUSTIVE_NODE_LIMIT: usize = 200;
const MAX_REGIONS_PER_TUNNEL: usize = 10;
const MAX_REGIONS_PER_HOLE: f64 = 24.0;
const MAX_LANDMARKS_PER_HOLE_SQ: f64 = 24.0;
const MAX_EDGES_PER_LANDMARK: f64 = 16.0;
const MAX_LANDMARK_DEGREE: usize = 96;
const MAX_LABEL_UNITS: u64 = 6;
const MAX_TABLE_UNITS_PER_CLAIM: f64 = 320.0;
const MAX_LEDGER_PER_CLAIM: f64 = 64.0;
const POINTER_SWEEP_MAX: usize = 10_000;
const UDG_STRETCH_BOUND: f64 = 36.0;

struct Case {
    name: String,
    graph: GridGraph,
    holes: usize,
}

fn suite() -> &'static Vec<Case> {
    static SUITE: OnceLock<Vec<Case>> = OnceLock::new();
    SUITE.get_or_init(|| {
        let mut cases = vec![
            Case { name: "rect_3x2".into(), graph: fixtures::rect_3x2(), holes: 0 },
            Case { name: "path_5".into(), graph: fixtures::path_5(), holes: 0 },
            Case { name: "donut".into(), graph: fixtures::donut(), holes: 1 },
            Case { name: "double_donut".into(), graph: fixtures::double_donut(), holes: 2 },
            Case {
                name: "corridor".into(),
                graph: gen::corridor(2, 14, 4).unwrap(),
                holes: 0,
            },
        ];
        let shapes: [(usize, usize); 10] = [
            (1, 300),
            (1, 1100),
            (2, 700),
            (2, 2000),
            (4, 300),
            (4, 1600),
            (8, 1100),
            (8, 2000),
            (12, 1600),
            (12, 2000),
        ];
        for (i, &(holes, n)) in shapes.iter().enumerate() {
            for seed in 0..2u64 {
                let s = 1000 + i as u64 * 10 + seed;
                let graph = gen::random_holes(n, holes, s).unwrap();
                cases.push(Case { name: format!("random_h{holes}_n{n}_s{s}"), graph, holes });
            }
        }
        assert_eq!(cases.len(), 25);
        cases
    })
}

fn pipelines() -> &'static Vec<Pipeline> {
    static PIPES: OnceLock<Vec<Pipeline>> = OnceLock::new();
    PIPES.get_or_init(|| {
        suite()
            .iter()
            .map(|c| run_pipeline(&c.graph, &HybridParams::new(c.graph.len())).unwrap())
            .collect()
    })
}

/// Family with n fixed and |H| varying, for the size and ledger criteria.
fn family() -> &'static Vec<(usize, Pipeline)> {
    static FAMILY: OnceLock<Vec<(usize, Pipeline)>> = OnceLock::new();
    FAMILY.get_or_init(|| {
        let mut out = Vec::new();
        for holes in [1usize, 2, 4, 8, 12] {
            for seed in 0..3u64 {
                let g = gen::random_holes(1500, holes, seed * 31 + holes as u64).unwrap();
                let p = run_pipeline(&g, &HybridParams::new(g.len())).unwrap();
                out.push((holes, p));
            }
        }
        out
    })
}

fn criterion(id: u32, name: &str, pass: bool, details: &str) {
    println!(
        "criterion {id} ({name}): {} — {details}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {details}");
}

fn sample_pairs(g: &GridGraph, count: usize, seed: u64) -> Vec<(NodeId, NodeId)> {
    let ids: Vec<NodeId> = g.alive_ids().collect();
    if g.len() <= EXHAUSTIVE_NODE_LIMIT {
        let mut pairs = Vec::new();
        for &s in &ids {
            for &t in &ids {
                if s != t {
                    pairs.push((s, t));
                }
            }
        }
        return pairs;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let &s = ids.choose(&mut rng).unwrap();
        let &t = ids.choose(&mut rng).unwrap();
        if s != t {
            pairs.push((s, t));
        }
    }
    pairs
}

#[test]
fn criterion_1_exact_routing() {
    let mut checked = 0usize;
    let mut violations = Vec::new();
    for (case, p) in suite().iter().zip(pipelines()) {
        let pairs = sample_pairs(&case.graph, ROUTING_PAIRS_PER_INSTANCE, 0xC0FFEE);
        let mut by_source: std::collections::HashMap<NodeId, Vec<NodeId>> = Default::default();
        for (s, t) in pairs {
            by_source.entry(s).or_default().push(t);
        }
        for (s, ts) in by_source {
            let oracle = bfs(&case.graph, s);
            for t in ts {
                checked += 1;
                let routed = route(&p.decomposition, &p.landmark_graph, &p.scheme, s, t)
                    .map(|tr| (tr.len() - 1) as u64)
                    .unwrap_or(u64::MAX);
                if routed != oracle[t] as u64 {
                    violations.push((case.name.clone(), s, t, routed, oracle[t]));
                }
            }
        }
    }
    criterion(
        1,
        "exact routing",
        violations.is_empty(),
        &format!(
            "{checked} routed pairs over {} instances, {} violations {:?}",
            suite().len(),
            violations.len(),
            &violations[..violations.len().min(3)]
        ),
    );
}

#[test]
fn criterion_2_simple_decomposition() {
    let mut worst = String::new();
    let mut pass = true;
    for case in suite() {
        let holes = detect_holes(&case.graph);
        assert_eq!(holes.inner_count(), case.holes, "{}", case.name);
        let mut sp = Splitter::new(case.graph.clone());
        simple_decomposition(&mut sp, &holes).unwrap();
        let (comp_of, count) = sp.g.components();
        if count > case.holes + 1 {
            pass = false;
            worst = format!("{}: {} regions > |H|+1 = {}", case.name, count, case.holes + 1);
        }
        let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); count];
        for v in sp.g.alive_ids() {
            members[comp_of[v]].push(v);
        }
        for m in &members {
            let (sub, _) = sp.g.subgraph(m);
            if inner_hole_count(&sub) != 0 {
                pass = false;
                worst = format!("{}: non-simple stage-1 region", case.name);
            }
        }
        if case.name == "donut" && count != 2 {
            pass = false;
            worst = format!("donut: {count} regions != 2");
        }
        if case.name == "double_donut" && count != 3 {
            pass = false;
            worst = format!("double_donut: {count} regions != 3");
        }
    }
    criterion(
        2,
        "simple decomposition",
        pass,
        if worst.is_empty() { "region count <= |H|+1 and all regions simple on every instance" } else { &worst },
    );
}

#[test]
fn criterion_3_tunnel_and_convex_stages() {
    let mut max_ratio: f64 = 0.0;
    let mut detail = String::new();
    let mut pass = true;
    for case in suite() {
        let mut ledger = RoundLedger::new();
        let (d, stats) = decompose(&case.graph, &mut ledger).unwrap();
        if stats.max_gates_after_junction > 2 {
            pass = false;
            detail = format!("{}: {} gates after stage 2", case.name, stats.max_gates_after_junction);
        }
        if stats.max_regions_per_tunnel > MAX_REGIONS_PER_TUNNEL {
            pass = false;
            detail = format!("{}: {} regions in a tunnel", case.name, stats.max_regions_per_tunnel);
        }
        let report = verify_decomposition(&d, VerifyDepth::Standard { sampled_pairs: 2000, seed: 0x5eed });
        if !report.passed() {
            pass = false;
            detail = format!("{}: {:?}", case.name, report);
        }
        let ratio = d.regions.len() as f64 / case.holes.max(1) as f64;
        max_ratio = max_ratio.max(ratio);
        if ratio > MAX_REGIONS_PER_HOLE {
            pass = false;
            detail = format!("{}: regions/|H| = {ratio:.1}", case.name);
        }
    }
    criterion(
        3,
        "tunnel + convex stages",
        pass,
        &if detail.is_empty() {
            format!("<=2 gates, <=10 regions/tunnel, convexity exact; max regions/|H| = {max_ratio:.2} (bound {MAX_REGIONS_PER_HOLE})")
        } else {
            detail
        },
    );
}

#[test]
fn criterion_4_sssp_and_spsp() {
    // Every region of the fixtures plus a spread of random instances.
    let picks = [0usize, 1, 2, 3, 4, 5, 9, 13, 21];
    let mut regions_checked = 0;
    let mut pass = true;
    let mut detail = String::new();
    'outer: for &i in &picks {
        let p = &pipelines()[i];
        for table in &p.scheme.tables {
            regions_checked += 1;
            let sub = &table.sub;
            let ids: Vec<NodeId> = sub.alive_ids().collect();
            let source = ids[0];
            let sol = sssp::sssp(sub, source).unwrap();
            let oracle = bfs(sub, source);
            for &v in &ids {
                if sol.d[v] != oracle[v] {
                    pass = false;
                    detail = format!(
                        "instance {i} region {}: sssp {} != bfs {}",
                        table.region, sol.d[v], oracle[v]
                    );
                    break 'outer;
                }
            }
            // SPSP next hops reach the unique closest portal point in
            // exactly the reported distance.
            for (gi, gsol) in &table.gate_spsp {
                let portal: Vec<NodeId> =
                    gsol.portal.iter().copied().collect();
                let multi = gridroute::dist::bfs_multi(sub, &portal);
                for &v in &ids {
                    if gsol.d[v] != multi[v] {
                        pass = false;
                        detail = format!("instance {i} gate {gi}: spsp distance mismatch");
                        break 'outer;
                    }
                    let mut cur = v;
                    let mut steps = 0;
                    while let Some(n) = gsol.next_hop[cur] {
                        cur = n;
                        steps += 1;
                    }
                    if steps != gsol.d[v] || Some(cur) != gsol.entry[v] {
                        pass = false;
                        detail = format!("instance {i} gate {gi}: next hops diverge");
                        break 'outer;
                    }
                    // Unique closest point.
                    let dv = bfs(sub, v);
                    let min = portal.iter().map(|&p| dv[p]).min().unwrap();
                    let count = portal.iter().filter(|&&p| dv[p] == min).count();
                    if count != 1 || dv[cur] != min {
                        pass = false;
                        detail = format!("instance {i} gate {gi}: closest point not unique");
                        break 'outer;
                    }
                }
            }
        }
    }
    criterion(
        4,
        "portal-tree sssp and spsp",
        pass,
        &if detail.is_empty() {
            format!("{regions_checked} regions: combined distances == BFS, next hops reach the unique closest point")
        } else {
            detail
        },
    );
}

#[test]
fn criterion_5_landmark_sizes() {
    let mut max_v: f64 = 0.0;
    let mut max_e: f64 = 0.0;
    let mut max_deg = 0usize;
    for (holes, p) in family() {
        let lg = &p.landmark_graph;
        let h2 = (holes * holes).max(1) as f64;
        max_v = max_v.max(lg.landmarks.len() as f64 / h2);
        if !lg.landmarks.is_empty() {
            max_e = max_e.max(lg.edges.len() as f64 / lg.landmarks.len() as f64);
        }
        max_deg = max_deg.max(lg.max_degree());
    }
    let pass = max_v <= MAX_LANDMARKS_PER_HOLE_SQ
        && max_e <= MAX_EDGES_PER_LANDMARK
        && max_deg <= MAX_LANDMARK_DEGREE;
    criterion(
        5,
        "landmark sizes",
        pass,
        &format!(
            "|V|/|H|^2 <= {max_v:.2} (bound {MAX_LANDMARKS_PER_HOLE_SQ}), |E|/|V| <= {max_e:.2} (bound {MAX_EDGES_PER_LANDMARK}), max degree {max_deg} (bound {MAX_LANDMARK_DEGREE})"
        ),
    );
}

#[test]
fn criterion_6_region_sequences() {
    let mut checked = 0;
    let mut pass = true;
    let mut detail = String::new();
    for (case, p) in suite().iter().zip(pipelines()) {
        let pairs = sample_pairs(&case.graph, 300, 0x5E9);
        let report = verify_region_sequences(&p.decomposition, &p.landmark_graph, &p.scheme, &pairs);
        checked += report.pairs_checked;
        if !report.passed() {
            pass = false;
            detail = format!(
                "{}: {} violations, e.g. {:?}",
                case.name,
                report.violations.len(),
                &report.violations[..report.violations.len().min(2)]
            );
        }
    }
    criterion(
        6,
        "theorem 5.5 region sequences",
        pass,
        &if detail.is_empty() {
            format!("{checked} cross-region pairs, closest-point routing matches BFS exactly")
        } else {
            detail
        },
    );
}

#[test]
fn criterion_7_size_corollaries() {
    let mut max_label_units = 0u64;
    let mut max_table: f64 = 0.0;
    let mut max_intra = 0u64;
    for (holes, p) in family() {
        let sizes = measure_sizes(&p.decomposition, &p.landmark_graph, &p.scheme);
        let unit = sizes.unit_bits;
        max_label_units = max_label_units.max(sizes.max_label_bits / unit);
        let claim = ((holes * holes).max(1) as u64 * unit) as f64;
        max_table = max_table.max(sizes.table_bits as f64 / claim);
        max_intra = max_intra.max(sizes.max_intra_bits / unit);
    }
    let label_ok = max_label_units <= MAX_LABEL_UNITS;
    let table_ok = max_table <= MAX_TABLE_UNITS_PER_CLAIM;
    criterion(
        7,
        "size corollaries",
        label_ok && table_ok,
        &format!(
            "max label = {max_label_units} units of ceil(log2 n) bits (bound {MAX_LABEL_UNITS}); table/(|H|^2 log n) <= {max_table:.1} (bound {MAX_TABLE_UNITS_PER_CLAIM}); intra-region deviation <= {max_intra} units/node (reported separately)"
        ),
    );
}

#[test]
fn criterion_8_pointer_jumping_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB1F);
    let mut lengths: Vec<usize> = (1..=256).collect();
    lengths.extend((0..64).map(|_| rng.gen_range(257..POINTER_SWEEP_MAX)));
    lengths.push(POINTER_SWEEP_MAX);
    let mut pass = true;
    let mut detail = String::new();
    for &len in &lengths {
        let params = HybridParams::new(len.max(2));
        let structure = Structure::path((0..len).collect());
        let mut cost = RoundLedger::new();
        let mut msg = RoundLedger::new();
        let ps =
            hybrid::pointer_jumping(&structure, &params, SimMode::CostModel, &mut cost).unwrap();
        hybrid::pointer_jumping(&structure, &params, SimMode::MessageLevel, &mut msg).unwrap();
        if cost.total() != msg.total() {
            pass = false;
            detail = format!("L={len}: cost-model {} != message-level {}", cost.total(), msg.total());
            break;
        }
        let bound = 2 * ceil_log2(len) as usize + 2;
        if ps.max_degree() > bound {
            pass = false;
            detail = format!("L={len}: degree {} > {bound}", ps.max_degree());
            break;
        }
        // Exact diameter up to 512 nodes; eccentricities from a sampled
        // node set above that.
        let diameter = if len <= 512 {
            ps.diameter()
        } else {
            let adj = ps.overlay_adjacency();
            let mut probes: Vec<usize> = vec![0, len / 2, len - 1];
            probes.extend((0..16).map(|_| rng.gen_range(0..len)));
            probes.iter().map(|&v| ps.eccentricity(&adj, v)).max().unwrap()
        };
        if diameter > bound {
            pass = false;
            detail = format!("L={len}: diameter {diameter} > {bound}");
            break;
        }
    }
    criterion(
        8,
        "pointer-jumping overlay bounds",
        pass,
        &if detail.is_empty() {
            format!(
                "{} lengths swept up to {POINTER_SWEEP_MAX}: degree/diameter within 2 ceil(log2 L) + 2, round counts agree",
                lengths.len()
            )
        } else {
            detail
        },
    );
}

#[test]
fn criterion_9_round_ledger() {
    let mut max_ratio: f64 = 0.0;
    let mut pass = true;
    let mut detail = String::new();
    for (holes, p) in family() {
        let n = p.decomposition.base.len();
        let claim = (holes * holes) as f64 + ceil_log2(n) as f64;
        let ratio = p.ledger.total() as f64 / claim;
        max_ratio = max_ratio.max(ratio);
        if ratio > MAX_LEDGER_PER_CLAIM {
            pass = false;
            detail = format!("|H|={holes}: ledger ratio {ratio:.1}");
        }
        if *holes >= 8 {
            let max_entry = p.ledger.entries.iter().max_by_key(|e| e.rounds).unwrap();
            if max_entry.stage != "distribute_landmark_graph" {
                pass = false;
                detail = format!("|H|={holes}: dominated by {} instead of distribution", max_entry.stage);
            }
        }
    }
    criterion(
        9,
        "round ledger",
        pass,
        &if detail.is_empty() {
            format!("total/(|H|^2 + log n) <= {max_ratio:.1} (bound {MAX_LEDGER_PER_CLAIM}); distribution dominates for |H| >= 8")
        } else {
            detail
        },
    );
}

#[test]
fn criterion_10_udg_bridge() {
    let mut passing = 0;
    let mut failing = 0;
    let mut max_stretch: f64 = 0.0;
    let mut pass = true;
    let mut detail = String::new();
    for seed in 0..10u64 {
        let Ok(u) = udg::random_udg(220, 7.0, seed) else {
            failing += 1;
            continue;
        };
        let Some(a) = udg::grid_abstraction(&u) else {
            failing += 1;
            continue;
        };
        if !a.contract_ok {
            failing += 1;
            continue;
        }
        passing += 1;
        let p = run_pipeline(&a.grid, &HybridParams::new(a.grid.len())).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xDD);
        let mut sampled = 0;
        while sampled < 40 {
            let s = rng.gen_range(0..u.points.len());
            let t = rng.gen_range(0..u.points.len());
            if s == t {
                continue;
            }
            sampled += 1;
            let d_udg = u.bfs(s)[t];
            if d_udg == u32::MAX || d_udg == 0 {
                continue;
            }
            let (Some(gs), Some(gt)) = (nearest_rep(&u, &a, s), nearest_rep(&u, &a, t)) else {
                pass = false;
                detail = format!("seed {seed}: unreachable representative on a contract-passing instance");
                continue;
            };
            let Ok(grid_route) = route(&p.decomposition, &p.landmark_graph, &p.scheme, gs, gt)
            else {
                pass = false;
                detail = format!("seed {seed}: grid route failed");
                continue;
            };
            let Some(walk) = udg::lift_route(&u, &a, &grid_route, s, t) else {
                pass = false;
                detail = format!("seed {seed}: lift failed");
                continue;
            };
            assert!(walk_is_valid(&u, &walk, s, t));
            let stretch = (walk.len() - 1) as f64 / d_udg as f64;
            max_stretch = max_stretch.max(stretch);
            if stretch > UDG_STRETCH_BOUND {
                pass = false;
                detail = format!("seed {seed}: stretch {stretch:.2} > {UDG_STRETCH_BOUND}");
            }
        }
    }
    if passing == 0 {
        pass = false;
        detail = "no contract-passing instances".into();
    }
    criterion(
        10,
        "udg bridge",
        pass,
        &if detail.is_empty() {
            format!(
                "max lifted stretch {max_stretch:.2} <= {UDG_STRETCH_BOUND}; contract failure rate {failing}/{}",
                passing + failing
            )
        } else {
            detail
        },
    );
}

fn nearest_rep(u: &udg::Udg, a: &udg::GridAbstraction, v: usize) -> Option<usize> {
    let dv = u.bfs(v);
    let mut best: Option<(u32, usize)> = None;
    for g in a.grid.alive_ids() {
        let d = dv[a.representative[g]];
        if d <= 1 && best.map_or(true, |(bd, bg)| (d, g) < (bd, bg)) {
            best = Some((d, g));
        }
    }
    best.map(|(_, g)| g)
}

fn walk_is_valid(u: &udg::Udg, walk: &[usize], s: usize, t: usize) -> bool {
    walk.first() == Some(&s)
        && walk.last() == Some(&t)
        && walk.windows(2).all(|w| u.adjacent(w[0], w[1]))
}
