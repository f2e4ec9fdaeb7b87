//! Error types, one enum per subsystem.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("duplicate point ({x}, {y})")]
    DuplicatePoint { x: i32, y: i32 },
    #[error("input points do not form a connected grid graph")]
    Disconnected,
    #[error("node {0} is unreachable from the source")]
    Unreachable(usize),
    #[error("paths are not incident and cannot be composed")]
    NonIncidentComposition,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HybridError {
    #[error("global budget exceeded in round {round}: node {node} would send {bits} bits (gamma = {budget})")]
    BudgetExceeded { round: usize, node: usize, bits: u64, budget: u64 },
    #[error("tree node {node} has degree {degree}, above the supported constant {max}")]
    DegreeTooHigh { node: usize, degree: usize, max: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SsspError {
    #[error("{orientation:?} portal graph contains a cycle; the region is not simple")]
    NotATree { orientation: crate::grid::Orientation },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecompError {
    #[error("node {0} does not lie on the splitting portal")]
    NotOnPortal(usize),
    #[error("node {0} is not on the boundary of the named hole")]
    NotOnHoleBoundary(usize),
    #[error("gate-to-gate distance profile of tunnel {region} is not unimodal")]
    ProfileNotUnimodal { region: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LandmarkError {
    #[error("closest point {point} on gate {gate} is not a landmark")]
    ClosestPointNotLandmark { point: usize, gate: usize },
    #[error("no landmark path between the given attachments")]
    NoPath,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RoutingError {
    #[error("no landmark path from {from} towards target {to}")]
    NoPath { from: usize, to: usize },
    #[error("hop budget {budget} exceeded routing from {from} to {to}")]
    HopBudgetExceeded { from: usize, to: usize, budget: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UdgError {
    #[error("failed to generate a connected unit-disk graph after {0} attempts")]
    GenerationFailed(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("infeasible generator parameters: {0}")]
    InfeasibleParams(String),
}
