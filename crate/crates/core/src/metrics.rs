//! Online accumulators for duality gap, NE regret, individual regrets,
//! comparator path length and temporal variability.

use serde::Serialize;

use crate::algorithms::{BestResponses, StrategyPair};
use crate::geometry::{distance, BoxSet};
use crate::payoffs::{rho_distance, SharedPayoff};

/// Per-round contributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundIncrements {
    pub reg1: f64,
    pub reg2: f64,
    pub dgap: f64,
    /// `None` when the payoff has no minimax oracle for these boxes.
    pub nereg: Option<f64>,
    pub path: f64,
    pub vt: Option<f64>,
}

/// Time-averaged view at round `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: u64,
    pub dgap_avg: f64,
    /// `|sum f_t(x_t, y_t) - maxmin f_t| / t`.
    pub nereg_avg: Option<f64>,
    pub reg1_avg: f64,
    pub reg2_avg: f64,
    pub path: f64,
    pub vt: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    box_x: BoxSet,
    box_y: BoxSet,
    dgap_sum: f64,
    nereg_signed_sum: Option<f64>,
    reg1_sum: f64,
    reg2_sum: f64,
    path_sum: f64,
    vt_sum: Option<f64>,
    prev_br: Option<BestResponses>,
    prev_payoff: Option<SharedPayoff>,
    t: u64,
}

impl MetricsAccumulator {
    pub fn new(box_x: BoxSet, box_y: BoxSet) -> Self {
        Self {
            box_x,
            box_y,
            dgap_sum: 0.0,
            nereg_signed_sum: Some(0.0),
            reg1_sum: 0.0,
            reg2_sum: 0.0,
            path_sum: 0.0,
            vt_sum: Some(0.0),
            prev_br: None,
            prev_payoff: None,
            t: 0,
        }
    }

    /// Computes best responses itself; use [`record_with`](Self::record_with)
    /// to share them with an algorithm.
    pub fn record(&mut self, f: &SharedPayoff, pair: &StrategyPair) -> RoundIncrements {
        let br = BestResponses::compute(f.as_ref(), pair, &self.box_x, &self.box_y);
        self.record_with(f, pair, &br)
    }

    pub fn record_with(&mut self, f: &SharedPayoff, pair: &StrategyPair, br: &BestResponses) -> RoundIncrements {
        let (x, y) = (&pair.x, &pair.y);
        let here = f.value(x, y);
        let at_xbr = f.value(&br.x, y);
        let at_ybr = f.value(x, &br.y);
        let reg1 = here - at_xbr;
        let reg2 = at_ybr - here;
        let dgap = at_ybr - at_xbr;
        let nereg = f.minimax_value(&self.box_x, &self.box_y).ok().map(|v| here - v);
        let path = match &self.prev_br {
            Some(prev) => distance(&br.x, &prev.x) + distance(&br.y, &prev.y),
            None => 0.0,
        };
        let vt = match &self.prev_payoff {
            Some(prev) => rho_distance(f.as_ref(), prev.as_ref(), &self.box_x, &self.box_y),
            None => Some(0.0),
        };

        self.t += 1;
        self.reg1_sum += reg1;
        self.reg2_sum += reg2;
        self.dgap_sum += dgap;
        self.nereg_signed_sum = self.nereg_signed_sum.zip(nereg).map(|(s, n)| s + n);
        self.path_sum += path;
        self.vt_sum = self.vt_sum.zip(vt).map(|(s, v)| s + v);
        self.prev_br = Some(br.clone());
        self.prev_payoff = Some(f.clone());
        RoundIncrements { reg1, reg2, dgap, nereg, path, vt }
    }

    pub fn rounds(&self) -> u64 {
        self.t
    }

    pub fn dgap_sum(&self) -> f64 {
        self.dgap_sum
    }

    pub fn reg_sums(&self) -> (f64, f64) {
        (self.reg1_sum, self.reg2_sum)
    }

    pub fn nereg_signed_sum(&self) -> Option<f64> {
        self.nereg_signed_sum
    }

    pub fn path_sum(&self) -> f64 {
        self.path_sum
    }

    pub fn vt_sum(&self) -> Option<f64> {
        self.vt_sum
    }

    /// Averages over the rounds recorded so far; `None` before the first.
    pub fn snapshot(&self) -> Option<Snapshot> {
        if self.t == 0 {
            return None;
        }
        let t = self.t as f64;
        Some(Snapshot {
            t: self.t,
            dgap_avg: self.dgap_sum / t,
            nereg_avg: self.nereg_signed_sum.map(|s| s.abs() / t),
            reg1_avg: self.reg1_sum / t,
            reg2_avg: self.reg2_sum / t,
            path: self.path_sum,
            vt: self.vt_sum,
        })
    }
}
