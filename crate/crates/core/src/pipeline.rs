//! End-to-end pipeline: holes, decomposition, landmark graph, identifiers,
//! labels and tables, with one round-ledger entry per stage.

use crate::decomp::{decompose, Decomposition, PipelineStats};
use crate::error::{DecompError, LandmarkError};
use crate::grid::GridGraph;
use crate::hybrid::{assign_hole_ids, butterfly_cost, ceil_log2, HybridParams, RoundLedger};
use crate::landmarks::{build_landmark_graph, mark_landmarks, LandmarkGraph};
use crate::routing::{assign_identifiers, build_scheme, IdAssignments, Scheme};

#[derive(Debug)]
pub enum PipelineError {
    Decomp(DecompError),
    Landmark(LandmarkError),
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PipelineError::Decomp(e) => write!(f, "decomposition: {e}"),
            PipelineError::Landmark(e) => write!(f, "landmark graph: {e}"),
        }
    }
}

impl std::error::Error for PipelineError {}

pub struct Pipeline {
    pub decomposition: Decomposition,
    pub stats: PipelineStats,
    pub landmark_graph: LandmarkGraph,
    pub scheme: Scheme,
    pub ids: IdAssignments,
    pub ledger: RoundLedger,
}

/// Runs the whole preprocessing pipeline on a grid graph. Every stage
/// charges the literal formula of its round bound with constant 1; the
/// landmark-graph distribution charges one message slot per landmark-graph
/// edge plus the pipeline latency, which is the dominating stage once the
/// hole count grows.
pub fn run_pipeline(base: &GridGraph, params: &HybridParams) -> Result<Pipeline, PipelineError> {
    let n = base.len();
    let logn = ceil_log2(n);
    let mut ledger = RoundLedger::new();

    let _hole_ids = assign_hole_ids(base, &mut ledger);

    let (decomposition, stats) =
        decompose(base, &mut ledger).map_err(PipelineError::Decomp)?;

    let max_gates = decomposition
        .regions
        .iter()
        .map(|r| r.gates.len())
        .max()
        .unwrap_or(0) as u64;

    let landmarks = mark_landmarks(&decomposition);
    ledger.charge("mark_landmarks", n, logn);
    let landmark_graph = build_landmark_graph(&decomposition, landmarks)
        .map_err(PipelineError::Landmark)?;
    ledger.charge("landmark_graph", n, max_gates.max(1) * logn);

    let ids = assign_identifiers(&decomposition);
    ledger.charge("region_identifiers", n, logn);
    ledger.charge("gate_identifiers", n, logn);
    ledger.charge("gate_labels", n, logn);
    ledger.charge("landmark_edge_labels", landmark_graph.edges.len(), 1);

    let scheme = build_scheme(&decomposition, &landmark_graph).map_err(PipelineError::Landmark)?;
    ledger.charge("gate_sssp", n, max_gates.max(1) * logn);
    ledger.charge("intra_region_tables", n, logn);

    ledger.charge("overlay_butterfly", n, 2 * logn);
    ledger.charge(
        "distribute_landmark_graph",
        landmark_graph.edges.len(),
        butterfly_cost(landmark_graph.edges.len(), params),
    );

    Ok(Pipeline { decomposition, stats, landmark_graph, scheme, ids, ledger })
}
