//! Deterministic instance generators.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::GenError;
use crate::grid::GridGraph;
use crate::holes::detect_holes;

/// Rectangle of roughly `target_nodes` nodes minus `holes` random
/// non-touching rectangular holes. Deterministic under `seed`; retries
/// placements until the hole count checks out.
pub fn random_holes(
    target_nodes: usize,
    holes: usize,
    seed: u64,
) -> Result<GridGraph, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..64 {
        let aspect = rng.gen_range(0.6..1.7);
        let w = ((target_nodes as f64 * aspect).sqrt().round() as i32).max(4);
        let h = ((target_nodes as i32) / w).max(4);
        let mut blocked = vec![vec![false; h as usize]; w as usize];
        let mut placed = 0;
        let mut guard = 0;
        while placed < holes && guard < 4000 {
            guard += 1;
            let hw = rng.gen_range(1..=((w / 4).max(1)));
            let hh = rng.gen_range(1..=((h / 4).max(1)));
            let x0 = rng.gen_range(1..(w - hw).max(2));
            let y0 = rng.gen_range(1..(h - hh).max(2));
            if x0 + hw >= w - 1 || y0 + hh >= h - 1 {
                continue;
            }
            // Two cells of clearance so holes stay separate and off the rim.
            let clear = |x: i32, y: i32| {
                (x0 - 2..x0 + hw + 2).contains(&x) && (y0 - 2..y0 + hh + 2).contains(&y)
            };
            let mut free = true;
            'scan: for x in 0..w {
                for y in 0..h {
                    if blocked[x as usize][y as usize] && clear(x, y) {
                        free = false;
                        break 'scan;
                    }
                }
            }
            if !free {
                continue;
            }
            for x in x0..x0 + hw {
                for y in y0..y0 + hh {
                    blocked[x as usize][y as usize] = true;
                }
            }
            placed += 1;
        }
        if placed < holes {
            continue;
        }
        let pts: Vec<(i32, i32)> = (0..w)
            .flat_map(|x| (0..h).map(move |y| (x, y)))
            .filter(|&(x, y)| !blocked[x as usize][y as usize])
            .collect();
        if let Ok(g) = GridGraph::build(&pts) {
            if detect_holes(&g).inner_count() == holes {
                return Ok(g);
            }
        }
    }
    Err(GenError::InfeasibleParams(format!(
        "could not place {holes} holes in ~{target_nodes} nodes (seed {seed})"
    )))
}

/// Serpentine corridor of the given width folding every `length` steps.
pub fn corridor(width: i32, length: i32, folds: i32) -> Result<GridGraph, GenError> {
    if width < 1 || length < 2 || folds < 1 {
        return Err(GenError::InfeasibleParams(
            "corridor needs width >= 1, length >= 2, folds >= 1".into(),
        ));
    }
    let mut pts = Vec::new();
    for f in 0..folds {
        let x0 = f * 2 * width;
        // Vertical leg.
        for x in x0..x0 + width {
            for y in 0..length {
                pts.push((x, y));
            }
        }
        // Connector to the next leg, alternating top and bottom.
        if f + 1 < folds {
            let y_band = if f % 2 == 0 { length - width..length } else { 0..width };
            for x in x0 + width..x0 + 2 * width {
                for y in y_band.clone() {
                    pts.push((x, y));
                }
            }
        }
    }
    pts.sort_unstable();
    pts.dedup();
    GridGraph::build(&pts)
        .map_err(|e| GenError::InfeasibleParams(format!("corridor construction failed: {e}")))
}
