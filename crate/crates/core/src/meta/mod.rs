//! Turning a cost-oblivious FPRA into a cost-aware rounding.
//!
//! Solve `y* = argmin { cᵀy : y ∈ Q ∩ (x − λR) }`, then round `y*` with the
//! FPRA. The output `z` satisfies `cᵀz ≤ cᵀx / λ` (for `λ < 1` this needs
//! nonnegative costs) and `z ∈ x + (R − λR)`. The cost bound is witnessed by
//! two auxiliary points: `ȳ = y* + ε(y* − z)`, pushed from `y*` away from
//! `z` as far as `Q` allows, and `ŷ = (ε·x + λ·ȳ)/(λ + ε)`, which lies in
//! `Q ∩ (x − λR)` and so costs at least `cᵀy*`. Every run records these
//! points so that the inequality chain can be re-checked exactly.

mod certificate;
mod proof;
mod relaxation;
mod ssuf;

pub use certificate::{certify, check_names, Check, RoundingCertificate};
pub use proof::{compute_epsilon, compute_epsilon_in, verify_proof_points, Epsilon, ProofPoints};
pub use relaxation::{Relaxation, RingRelaxation, SsufRelaxation};
pub use ssuf::{round_with_cost, SsufRun};

use thiserror::Error;

use crate::fpra::FpraError;
use crate::model::{ArcId, ModelError};
use crate::rational::Rational;
use crate::ring::RingError;
use crate::solvers::SolverError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetaError {
    #[error("negative costs are only supported for lambda = 1")]
    NegativeCosts,
    #[error("negative edge costs are not supported for ring loading")]
    NegativeRingCosts,
    #[error("alpha must be nonnegative")]
    NegativeAlpha,
    #[error("the fractional solution is not in the polytope")]
    NotInPolytope,
    #[error("the support of the fractional solution has a directed cycle through arcs {0:?}")]
    CyclicSupport(Vec<ArcId>),
    #[error("coordinate {coordinate} leaves the minimal face of y*")]
    FaceViolation { coordinate: usize },
    #[error("solver failed: {0}")]
    Solver(#[from] SolverError),
    #[error("rounding failed on y* = {y_star:?}: {source}")]
    Fpra { source: FpraError, y_star: Vec<Rational> },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("certificate checks failed: {}", failed.join(", "))]
    CertificateViolation {
        failed: Vec<String>,
        certificate: Box<serde_json::Value>,
    },
}
