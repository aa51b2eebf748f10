//! Exact optimizers for the restricted problem `min { cᵀy : y ∈ Q ∩ (x − λR) }`
//! and a brute-force LP oracle used to cross-check them.

mod lp;
mod mcf;
mod oracle;
mod restricted;
mod simplex;

pub use lp::{LinearProgram, LpStatus, Optimum, Relation, Row};
pub use mcf::{min_cost_flow_bounded, ArcBounds};
pub use oracle::{lp_oracle_enumerate, ORACLE_MAX_VARS};
pub use restricted::{
    restricted_bounds, restricted_min_cost_ssuf, ring_lp, ring_objective_offset, ring_restricted_min_cost, ssuf_lp,
};
pub use simplex::solve as simplex_solve;

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("the restricted problem is infeasible")]
    Infeasible,
    #[error("the linear program is unbounded")]
    Unbounded,
    #[error("problem size {size} exceeds the cap {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("invalid arc bounds: {0}")]
    InvalidBounds(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
