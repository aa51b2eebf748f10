//! Face-preserving rounding algorithms.
//!
//! An FPRA maps a fractional point `x` to an integral solution on the
//! minimal face of the polytope containing `x`, with the rounding error
//! `z − x` confined to an error body. For the flow polytope the faces are
//! cut out by tight nonnegativity constraints, so face preservation means
//! never loading an arc with `x(a) = 0`; for ring loading it means keeping
//! every unsplit commodity on its path.

mod decomposition;
mod ring;
mod ssuf;

pub use decomposition::{flow_decomposition, DecomposedPath, PathDecomposition};
pub use ring::{confirm_ring_counterexample, BruteForceRing, RingCounterexample, RingSearchMode};
pub use ssuf::{confirm_counterexample, BruteForceSsuf, GreedyPathStrip, SsufCounterexample};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    ArcId, BoxErrorBody, FractionalFlow, ModelError, RingFractionalSolution, RingInstance, RingUnsplittableSolution,
    UnsplittablePathFlow, WeightedSsufNetwork,
};

/// What to do when an output leaves the declared body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    /// Fail with an error.
    #[default]
    Strict,
    /// Keep the output and flag the failed checks.
    Report,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FpraDescriptor {
    pub name: String,
    /// `None` for heuristics that only report their realized deviation.
    pub declared_body: Option<BoxErrorBody>,
    pub strictness: Strictness,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FpraError {
    #[error("no unsplittable flow in the support lies within the error body")]
    NoSolutionInBody(Box<SsufCounterexample>),
    #[error("no path assignment lies within the error body")]
    NoRingSolutionInBody(Box<RingCounterexample>),
    #[error("enumeration size {size} exceeds the cap {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error("support contains a directed cycle through arcs {0:?}")]
    CyclicSupport(Vec<ArcId>),
    #[error("terminal {0} is unreachable from the source")]
    NoPath(usize),
    #[error("uniform reduction failed: {0}")]
    Reduction(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub trait SsufFpra {
    fn name(&self) -> &'static str;

    /// Whether every output is guaranteed to lie in the body given to [`SsufFpra::round`].
    fn honours_body(&self) -> bool;

    fn round(
        &self,
        network: &WeightedSsufNetwork,
        x: &FractionalFlow,
        body: &BoxErrorBody,
    ) -> Result<UnsplittablePathFlow, FpraError>;

    fn descriptor(&self, body: &BoxErrorBody, strictness: Strictness) -> FpraDescriptor {
        FpraDescriptor {
            name: self.name().to_string(),
            declared_body: self.honours_body().then(|| body.clone()),
            strictness,
        }
    }
}

pub trait RingFpra {
    fn name(&self) -> &'static str;

    fn honours_body(&self) -> bool;

    fn round(
        &self,
        ring: &RingInstance,
        x: &RingFractionalSolution,
        body: &BoxErrorBody,
    ) -> Result<RingUnsplittableSolution, FpraError>;

    fn descriptor(&self, body: &BoxErrorBody, strictness: Strictness) -> FpraDescriptor {
        FpraDescriptor {
            name: self.name().to_string(),
            declared_body: self.honours_body().then(|| body.clone()),
            strictness,
        }
    }
}

/// First path (in arc-id order) for a terminal that carries no demand:
/// inside `mask` if possible, otherwise anywhere.
pub(crate) fn fallback_path(
    network: &WeightedSsufNetwork,
    terminal: usize,
    mask: &[bool],
) -> Result<Vec<ArcId>, FpraError> {
    let target = network.terminals()[terminal].node;
    if let Some(path) = network.simple_paths(target, mask, 1).0.into_iter().next() {
        return Ok(path);
    }
    let all = vec![true; network.arc_count()];
    network
        .simple_paths(target, &all, 1)
        .0
        .into_iter()
        .next()
        .ok_or(FpraError::NoPath(terminal))
}
