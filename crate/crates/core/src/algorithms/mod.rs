//! Emit/observe state machines for the three online proximal point methods.
//!
//! Each round the harness calls `emit` to obtain the committed pair, lets the
//! environment reveal `f_t`, computes the best responses once, and hands both
//! to `observe`.

use serde::Serialize;

use crate::geometry::BoxSet;
use crate::payoffs::{PayoffOracle, SharedPayoff};
use crate::error::Result;

pub mod hedge;
pub mod multi;
pub mod oppm;
pub mod optoppm;
pub mod predictors;
pub mod simplex;

pub use hedge::{Hedge, HedgeStep};
pub use multi::{loss_vector, MultiPredictor};
pub use oppm::{Oppm, OppmConfig};
pub use optoppm::{OptOppm, OptOppmConfig, SinglePredictor};
pub use predictors::PredictorBank;
pub use simplex::clipped_simplex_solve;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyPair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// `x'_t = argmin_x f_t(x, y_t)` and `y'_t = argmax_y f_t(x_t, y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponses {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl BestResponses {
    pub fn compute(f: &dyn PayoffOracle, pair: &StrategyPair, box_x: &BoxSet, box_y: &BoxSet) -> Self {
        Self { x: f.best_response_x(&pair.y, box_x), y: f.best_response_y(&pair.x, box_y) }
    }
}

/// One prox step's movement against its `rate * gradient bound` budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contraction {
    pub label: &'static str,
    pub displacement: f64,
    pub bound: f64,
}

/// A finalized lagged term of the OPPM rate schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaRecord {
    /// Round the term belongs to (one behind the observing round).
    pub round: u64,
    pub stage: u32,
    pub sigma: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RoundDiagnostics {
    pub round: u64,
    pub eta: f64,
    pub gamma: f64,
    /// Stage each budget was in when this round's rates were set (one counter
    /// for OPPM, one per player for the optimistic variants).
    pub stages: Vec<u32>,
    pub doubled: bool,
    pub capped: bool,
    pub sigma: Option<SigmaRecord>,
    /// `(delta^1_t, delta^2_t)` as computed, for the optimistic variants.
    pub deltas: Option<(f64, f64)>,
    pub contractions: Vec<Contraction>,
    /// Weights that formed this round's predictor.
    pub weights: Option<Vec<f64>>,
    pub hedge: Option<HedgeStep>,
}

/// Common driver interface over the three algorithms.
pub trait SaddleLearner: Send {
    fn name(&self) -> &'static str;
    fn emit(&mut self) -> Result<StrategyPair>;
    fn observe(&mut self, f: SharedPayoff, responses: &BestResponses) -> Result<RoundDiagnostics>;
}
