//! Linear bandits for drifting environments.
//!
//! The crate provides a discounted weighted least-squares estimator, the
//! policies built on it (deterministic, randomized-confidence and
//! perturbed-estimate variants, plus their stationary counterparts), closed
//! form tuning constants, an EXP3 meta-bandit that picks the discount when the
//! drift budget is unknown, synthetic drifting environments and a seeded,
//! parallel experiment harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod environment;
pub mod estimator;
pub mod harness;
pub mod meta;
pub mod numerics;
pub mod oracle;
pub mod policies;
pub mod seed;
pub mod tuning;

pub use estimator::{surrogate_parameter, DiscountedWls};
pub use numerics::{Matrix, Vector};
pub use oracle::{amo, ActionSpace};
pub use policies::{LinearPolicy, Policy, PolicyConfig, PolicyKind, RandomConfidenceSpec};
