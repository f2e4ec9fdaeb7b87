//! Deterministic routing schemes for grid graphs with holes.
//!
//! The pipeline: detect holes, decompose the graph into simple path-convex
//! regions, build a landmark graph over the gates, assemble O(log n)-bit
//! node labels and landmark-graph routing tables, and forward packets
//! exactly. A round ledger accounts every stage under the HYBRID cost
//! model, and a unit-disk front end maps UDG instances onto grid graphs.

pub mod decomp;
pub mod dist;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod grid;
pub mod holes;
pub mod hybrid;
pub mod io;
pub mod landmarks;
pub mod pipeline;
pub mod routing;
pub mod sssp;
pub mod udg;

pub use dist::{dist_oracle, DistTriple, GridPath};
pub use error::{
    DecompError, GenError, GridError, HybridError, LandmarkError, RoutingError, SsspError,
    UdgError,
};
pub use grid::{Dir, GridGraph, NodeId, Orientation, Pos};
pub use holes::{detect_holes, Hole, HoleSet};
pub use hybrid::{HybridParams, RoundLedger, SimMode};
