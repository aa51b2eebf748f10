//! Cost-aware rounding for ring loading.
//!
//! The pipeline fixes unsplit commodities, removes parallel pairs, contracts
//! to crossing canonical form, solves the restricted LP there, rounds with a
//! ring FPRA and puts the fixed paths back. The capacity uniformization is
//! provided separately, together with the round trip it guarantees.

mod identity;
mod pipeline;
mod preprocess;
mod uniform;

pub use identity::{
    check_opposing_edges, check_opposing_fractional, check_opposing_unsplittable, opposing_edges_hold, two_sided_bound,
    TwoSidedReport,
};
pub use pipeline::{ring_check_names, ring_round_with_cost, RingCertificate, RingRun, RingRunConfig};
pub use preprocess::{
    canonicalize_crossing, commodities_cross, eliminate_parallel_pair, fix_unsplit_commodities, parallel_labeling,
    preprocess, CanonicalRingForm, FixedPath, ParallelShift, PartialForm,
};
pub use uniform::{
    nonuniform_to_uniform, strip_artificials, StripReport, Subdivision, UniformReduction, MAX_ARTIFICIALS_PER_EDGE,
};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("commodities {0} and {1} cross")]
    NotParallel(usize, usize),
    #[error("commodities {0} and {1} do not cross")]
    NotCrossing(usize, usize),
    #[error("commodities {0} and {1} are not both active")]
    NotActive(usize, usize),
    #[error("commodity {0} is not strictly split")]
    NotStrictlySplit(usize),
    #[error("every commodity is fixed; the canonical form is empty")]
    EmptyCanonicalForm,
    #[error("load exceeds the one-sided bound on canonical edge {0}")]
    OneSidedViolated(usize),
    #[error("opposing-edges identity fails")]
    OpposingEdgesFailed,
    #[error("capacities are required on every edge")]
    MissingCapacities,
    #[error("an edge needs subdividing but the largest demand is zero")]
    ZeroDmax,
    #[error("edge {0} would need too many artificial commodities")]
    TooManyArtificials(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}
