//! Property tests for the grid toolkit, SSSP machinery and primitives.

use gridroute::decomp::{decompose, verify_decomposition, Splitter, VerifyDepth};
use gridroute::dist;
use gridroute::gen;
use gridroute::grid::{GridGraph, Orientation};
use gridroute::holes::detect_holes;
use gridroute::hybrid::{
    self, ceil_log2, HybridParams, RoundLedger, SimMode, Structure,
};
use gridroute::sssp;
use proptest::prelude::*;

/// Random connected point set grown from the origin.
fn connected_points(max_extra: usize) -> impl Strategy<Value = Vec<(i32, i32)>> {
    proptest::collection::vec((0usize..4, 0usize..64), 0..max_extra).prop_map(|steps| {
        let mut pts = vec![(0i32, 0i32)];
        for (dir, pick) in steps {
            let (x, y) = pts[pick % pts.len()];
            let p = match dir {
                0 => (x + 1, y),
                1 => (x - 1, y),
                2 => (x, y + 1),
                _ => (x, y - 1),
            };
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        pts
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_lemmas_hold(pts in connected_points(48)) {
        let g = GridGraph::build(&pts).unwrap();
        prop_assert!(dist::check_even_cycles(&g));
        for w in g.alive_ids().take(4) {
            prop_assert!(dist::check_neighbor_distances(&g, w));
        }
        // d >= d_x + d_y everywhere.
        let ids: Vec<_> = g.alive_ids().collect();
        let s = ids[0];
        let d = dist::bfs(&g, s);
        let dx = dist::bfs01(&g, &[s], Orientation::Horizontal);
        let dy = dist::bfs01(&g, &[s], Orientation::Vertical);
        for &v in &ids {
            prop_assert!(d[v] >= dx[v] + dy[v]);
        }
    }

    #[test]
    fn simple_instances_have_tight_distance_split(pts in connected_points(32)) {
        let g = GridGraph::build(&pts).unwrap();
        prop_assume!(detect_holes(&g).inner_count() == 0);
        let ids: Vec<_> = g.alive_ids().collect();
        let s = ids[ids.len() / 2];
        // Combined portal-tree SSSP equals BFS, parts equal the 0/1 oracles.
        let sol = sssp::sssp(&g, s).unwrap();
        let d = dist::bfs(&g, s);
        let dx = dist::bfs01(&g, &[s], Orientation::Horizontal);
        let dy = dist::bfs01(&g, &[s], Orientation::Vertical);
        for &v in &ids {
            prop_assert_eq!(sol.d[v], d[v]);
            prop_assert_eq!(sol.d_x[v], dx[v]);
            prop_assert_eq!(sol.d_y[v], dy[v]);
            if v != s {
                let p = sol.pred[v].unwrap();
                prop_assert_eq!(sol.d[p] + 1, sol.d[v]);
            }
        }
    }

    #[test]
    fn shortest_paths_share_hop_split_on_simple(pts in connected_points(12)) {
        let g = GridGraph::build(&pts).unwrap();
        prop_assume!(g.len() <= 14);
        prop_assume!(detect_holes(&g).inner_count() == 0);
        let ids: Vec<_> = g.alive_ids().collect();
        for &s in &ids {
            for &t in &ids {
                let paths = dist::all_shortest_paths(&g, s, t);
                let splits: std::collections::BTreeSet<(usize, usize)> = paths
                    .iter()
                    .map(|p| (p.len_x(&g), p.len_y(&g)))
                    .collect();
                prop_assert!(splits.len() <= 1);
            }
        }
    }

    #[test]
    fn pointer_struct_bounds(len in 1usize..600, cycle in proptest::bool::ANY) {
        let structure = if cycle {
            Structure::cycle((0..len).collect())
        } else {
            Structure::path((0..len).collect())
        };
        let params = HybridParams::new(len.max(2));
        let mut ledger = RoundLedger::new();
        let ps = hybrid::pointer_jumping(&structure, &params, SimMode::CostModel, &mut ledger)
            .unwrap();
        let bound = 2 * ceil_log2(len) as usize + 2;
        prop_assert!(ps.max_degree() <= bound);
        prop_assert!(ps.diameter() <= bound);
    }

    #[test]
    fn hole_ids_are_injective(seed in 0u64..500, holes in 1usize..5) {
        let Ok(g) = gen::random_holes(220, holes, seed) else {
            return Ok(());
        };
        let mut ledger = RoundLedger::new();
        let ids = hybrid::assign_hole_ids(&g, &mut ledger);
        let mut inner: Vec<_> = ids
            .holes
            .holes
            .iter()
            .zip(&ids.ids)
            .filter(|(h, _)| h.bounded)
            .map(|(_, id)| id.unwrap())
            .collect();
        inner.sort_unstable();
        inner.dedup();
        prop_assert_eq!(inner.len(), holes);
    }

    #[test]
    fn decomposition_invariants(seed in 0u64..300, holes in 0usize..5) {
        let Ok(g) = gen::random_holes(260, holes, seed) else {
            return Ok(());
        };
        let mut ledger = RoundLedger::new();
        let (d, stats) = decompose(&g, &mut ledger).unwrap();
        prop_assert!(stats.regions_after_simple <= holes + 1);
        prop_assert!(stats.max_gates_after_junction <= 2);
        prop_assert!(stats.max_regions_per_tunnel <= 10);
        let report = verify_decomposition(&d, VerifyDepth::default());
        prop_assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn extra_splits_preserve_convexity(seed in 0u64..120) {
        // Splitting a verified path-convex region at any portal keeps the
        // pieces path-convex.
        let Ok(g) = gen::random_holes(150, 1, seed) else {
            return Ok(());
        };
        let mut ledger = RoundLedger::new();
        let (d, _) = decompose(&g, &mut ledger).unwrap();
        prop_assume!(verify_decomposition(&d, VerifyDepth::default()).passed());
        // Re-run the pipeline on a fresh splitter and add one extra split at
        // the largest region's first vertical portal.
        let holes = detect_holes(&g);
        let mut sp = Splitter::new(g.clone());
        gridroute::decomp::simple_decomposition(&mut sp, &holes).unwrap();
        gridroute::decomp::split_junctions(&mut sp).unwrap();
        gridroute::decomp::convex_split(&mut sp).unwrap();
        let portals = sp.g.portals(Orientation::Vertical);
        let biggest = portals
            .members
            .iter()
            .max_by_key(|m| m.len())
            .cloned()
            .unwrap();
        sp.split_at_portal(&biggest, Orientation::Vertical).unwrap();
        let d2 = gridroute::decomp::Decomposition::from_splitter(g, sp, holes.inner_count());
        let report = verify_decomposition(&d2, VerifyDepth::default());
        prop_assert!(report.convexity_violations.is_empty(), "{:?}", report);
    }
}
