//! Cost-aware rounding for unsplittable flow problems.
//!
//! Given a fractional solution `x` and a face-preserving rounding algorithm
//! (FPRA) whose rounding error stays in a box `R`, the tradeoff procedure
//! first solves `min { cᵀy : y ∈ Q ∩ (x − λR) }` and then rounds the
//! optimum `y*`. The result `z` satisfies `cᵀz ≤ cᵀx / λ` and
//! `z − x ∈ R − λR`. Everything is computed over exact rationals and each
//! run produces a [`meta::RoundingCertificate`] that [`verify`] can re-check
//! without access to any solver.
//!
//! Two applications are provided:
//!
//! * single-source unsplittable flow on acyclic networks ([`meta::round_with_cost`]);
//! * weighted ring loading ([`ring::ring_round_with_cost`]), including the
//!   preprocessing to crossing canonical form and the capacity
//!   uniformization used to justify the FPRA.

pub mod fpra;
pub mod generate;
pub mod io;
pub mod meta;
pub mod model;
pub mod rational;
pub mod ring;
pub mod solvers;
pub mod verify;

pub use rational::{Lambda, Rational};
