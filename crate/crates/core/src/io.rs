//! Instance files and artifact exports.
//!
//! Instance format: a JSON object `{"points": [[x, y], ...]}` with integer
//! coordinates; UDG files use the same shape with decimal reals.

use serde::{Deserialize, Serialize};

use crate::decomp::Decomposition;
use crate::error::GridError;
use crate::grid::{GridGraph, Orientation};
use crate::landmarks::LandmarkGraph;
use crate::routing::{NodeLabel, Scheme};
use crate::udg::Udg;

#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub points: Vec<(i32, i32)>,
}

pub fn parse_instance(json: &str) -> Result<GridGraph, String> {
    let file: InstanceFile = serde_json::from_str(json).map_err(|e| e.to_string())?;
    GridGraph::build(&file.points).map_err(|e: GridError| e.to_string())
}

pub fn instance_json(g: &GridGraph) -> String {
    let points: Vec<(i32, i32)> = g
        .alive_ids()
        .map(|v| {
            let p = g.pos(v);
            (p.x, p.y)
        })
        .collect();
    serde_json::to_string_pretty(&InstanceFile { points }).unwrap()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct UdgFile {
    pub points: Vec<(f64, f64)>,
}

pub fn parse_udg(json: &str) -> Result<Udg, String> {
    let file: UdgFile = serde_json::from_str(json).map_err(|e| e.to_string())?;
    Ok(Udg { points: file.points })
}

pub fn udg_json(udg: &Udg) -> String {
    serde_json::to_string_pretty(&UdgFile { points: udg.points.clone() }).unwrap()
}

// ---------------------------------------------------------------------------
// Exports

#[derive(Serialize)]
struct RegionExport {
    id: usize,
    nodes: Vec<usize>,
    gates: Vec<usize>,
    walls: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct GateExport {
    id: (usize, String),
    positions: Vec<(i32, i32)>,
    regions: (usize, usize),
}

#[derive(Serialize)]
struct DecompositionExport {
    regions: Vec<RegionExport>,
    gates: Vec<GateExport>,
    /// copy (virtual id) -> original id
    projection: Vec<(usize, usize)>,
}

pub fn decomposition_json(d: &Decomposition) -> String {
    let regions = d
        .regions
        .iter()
        .map(|r| RegionExport {
            id: r.id,
            nodes: r.nodes.clone(),
            gates: r.gates.clone(),
            walls: r.walls.iter().map(|w| w.nodes.clone()).collect(),
        })
        .collect();
    let gates = d
        .gates
        .iter()
        .map(|g| GateExport {
            id: (g.id.0, orientation_str(g.id.1).to_string()),
            positions: g.positions.iter().map(|p| (p.x, p.y)).collect(),
            regions: (d.regions[g.region_a].id, d.regions[g.region_b].id),
        })
        .collect();
    let projection = d
        .graph
        .alive_ids()
        .filter(|&v| d.graph.is_copy(v))
        .map(|v| (v, d.graph.orig(v)))
        .collect();
    serde_json::to_string_pretty(&DecompositionExport { regions, gates, projection }).unwrap()
}

fn orientation_str(o: Orientation) -> &'static str {
    match o {
        Orientation::Vertical => "vertical",
        Orientation::Horizontal => "horizontal",
    }
}

#[derive(Serialize)]
struct LandmarkExport {
    id: usize,
    pos: (i32, i32),
    kinds: Vec<String>,
    gates: Vec<usize>,
}

#[derive(Serialize)]
struct LandmarkEdgeExport {
    u: usize,
    v: usize,
    w: u32,
    regions: Vec<usize>,
}

#[derive(Serialize)]
struct LandmarkGraphExport {
    landmarks: Vec<LandmarkExport>,
    edges: Vec<LandmarkEdgeExport>,
}

pub fn landmarks_json(d: &Decomposition, lg: &LandmarkGraph) -> String {
    let landmarks = lg
        .landmarks
        .iter()
        .map(|l| LandmarkExport {
            id: l.orig,
            pos: (l.pos.x, l.pos.y),
            kinds: l.kinds.iter().map(|k| format!("{k:?}")).collect(),
            gates: l.gates.clone(),
        })
        .collect();
    let edges = lg
        .edges
        .iter()
        .map(|e| LandmarkEdgeExport {
            u: lg.landmarks[e.u].orig,
            v: lg.landmarks[e.v].orig,
            w: e.weight,
            regions: e.regions.iter().map(|&r| d.regions[r].id).collect(),
        })
        .collect();
    serde_json::to_string_pretty(&LandmarkGraphExport { landmarks, edges }).unwrap()
}

#[derive(Serialize)]
struct LabelExport {
    id: usize,
    pos: (i32, i32),
    regions: Vec<usize>,
    entries: Vec<(usize, u32)>,
}

pub fn labels_json(d: &Decomposition, lg: &LandmarkGraph, scheme: &Scheme) -> String {
    let labels: Vec<LabelExport> = scheme
        .labels
        .iter()
        .map(|l: &NodeLabel| LabelExport {
            id: l.id,
            pos: (l.pos.x, l.pos.y),
            regions: l.regions.iter().map(|&r| d.regions[r].id).collect(),
            entries: l
                .entries
                .iter()
                .map(|a| (lg.landmarks[a.landmark].orig, a.dist))
                .collect(),
        })
        .collect();
    serde_json::to_string_pretty(&labels).unwrap()
}
