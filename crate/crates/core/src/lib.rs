//! Online proximal point methods for time-varying convex-concave saddle
//! point games, with the metrics, environments and experiment harness used to
//! benchmark them.

// `!(v > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod environments;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod inner_solvers;
pub mod metrics;
pub(crate) mod numeric;
pub mod payoffs;

pub use algorithms::{BestResponses, RoundDiagnostics, SaddleLearner, StrategyPair};
pub use environments::{EnvironmentKind, EnvironmentSpec};
pub use error::{Error, Result};
pub use geometry::BoxSet;
pub use metrics::{MetricsAccumulator, Snapshot};
pub use payoffs::{PayoffOracle, SharedPayoff};
