//! Exact data model: SSUF networks and flows, ring instances, error bodies.

mod body;
mod network;
mod ring;

pub use body::{difference, BoxErrorBody};
pub use network::{
    check_membership, eliminate_cycle_flow, induced_load, is_in_polytope, support_subnetwork, validate_path, Arc,
    ArcId, FractionalFlow, MembershipReport, NodeId, SupportRestriction, Terminal, UnsplittablePathFlow, Violation,
    WeightedSsufNetwork,
};
pub use ring::{Commodity, PathChoice, RingEdge, RingFractionalSolution, RingInstance, RingUnsplittableSolution};

#[cfg(test)]
pub(crate) use network::fixtures as network_fixtures;
#[cfg(test)]
pub(crate) use ring::fixtures as ring_fixtures;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("terminal {0} sits on the source")]
    TerminalAtSource(usize),
    #[error("demand of commodity/terminal {0} is negative")]
    NegativeDemand(usize),
    #[error("capacity of edge {0} is negative")]
    NegativeCapacity(usize),
    #[error("commodity {0} has identical endpoints")]
    DegenerateCommodity(usize),
    #[error("a ring needs at least two nodes, got {0}")]
    RingTooSmall(usize),
    #[error("split of commodity {0} is outside [0, 1]")]
    SplitOutOfRange(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid path for terminal {terminal}: {reason}")]
    InvalidPath { terminal: usize, reason: String },
    #[error("error body excludes the origin in coordinate {0}")]
    BodyMissesOrigin(usize),
}
