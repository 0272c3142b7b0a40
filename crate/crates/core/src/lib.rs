//! Sparse signal recovery helped by prior information.
//!
//! Given measurements `y = A x⋆` of a sparse signal and a prior guess `w ≈ x⋆`,
//! this crate implements the two penalized decoders
//!
//! ```text
//!   minimize ‖x‖₁ + β‖x − w‖₁       subject to Ax = y   (or ‖Ax − y‖₂ ≤ σ)
//!   minimize ‖x‖₁ + (β/2)‖x − w‖₂²  subject to Ax = y   (or ‖Ax − y‖₂ ≤ σ)
//! ```
//!
//! together with the machinery needed to predict when they succeed under
//! random Gaussian measurements:
//!
//! * [`model`] — support-set algebra relating `w` to `x⋆`: good/bad prior
//!   components, the counts (s, l, q, h, h̄, ξ), and their identities;
//! * [`bounds`] — closed-form upper bounds on the squared Gaussian width of
//!   the descent cones, hence on the number of measurements required;
//! * [`geometry`] — per-component subdifferential cone models, exact
//!   Gaussian-interval expectations, and Monte-Carlo width estimation;
//! * [`solver`] — operator-splitting solver with optimality certificates;
//! * [`lab`] — reproducible experiment harness (phase transitions,
//!   minimum-measurement sweeps, condition scans) emitting CSV.

pub mod bounds;
mod error;
pub mod geometry;
pub mod lab;
pub mod model;
pub mod solver;

pub use bounds::{BoundResult, CaseLabel, L1L2Profile};
pub use error::{Error, Result};
pub use geometry::{ConeKind, ConeModel};
pub use lab::{InstanceSpec, SolverKind, SweepResult};
pub use model::{CardinalityProfile, SignalPair, SupportProfile};
pub use solver::{Constraint, RecoveryProblem, Regularizer, Solution, SolveStatus, SolverConfig};
