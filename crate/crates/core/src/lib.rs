//! Approximate furthest neighbor search in Euclidean space with random
//! projections, plus an LSH-based approximate annulus query structure.
//!
//! * [`ProjectionIndex`]: query-dependent index over `ell` projections that
//!   examines at most `m` candidates per query.
//! * [`QueryIndependentOrder`]: one precomputed ranking scanned prefix-first.
//! * [`AnnulusIndex`]: returns a point in a distance band around the query.
//! * [`bench`]: brute-force oracles and the experiment harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod annulus;
pub mod bench;
pub mod dataset;
pub mod datasets;
pub mod error;
pub mod lsh;
pub mod projection;
pub mod query_dependent;
pub mod query_independent;
pub mod random;
pub mod vector;

pub use annulus::{derive_params, AnnulusIndex, AnnulusOutcome, AnnulusParams, StopReason};
pub use dataset::{PointId, VectorDataset};
pub use error::{Error, Result};
pub use lsh::{collision_probability, sensitivity_for, ConcatenatedHash, HashAtom, Sensitivity};
pub use query_dependent::{default_params, AfnParams, ProjectionIndex, QueryResult};
pub use query_independent::{
    covering_number, suggested_ell, CoveringParams, OrderStrategy, QueryIndependentOrder,
};
pub use random::RandomSeed;
pub use vector::{SparseVector, Vector};
