//! Runtime invariant checks over the per-round diagnostics.
//!
//! The monitor keeps its own copy of the telescoping state (running max of
//! the reported Sigma per stage, sum of the recomputed Delta) so a broken
//! Delta update inside an algorithm shows up as a mismatch rather than being
//! trusted.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algorithms::{RoundDiagnostics, StrategyPair};
use crate::geometry::BoxSet;
use crate::metrics::{MetricsAccumulator, RoundIncrements};

pub const TELESCOPING: &str = "telescoping";
pub const DELTA_NONNEGATIVE: &str = "delta-nonnegative";
pub const RATE_MONOTONE: &str = "rate-monotone";
pub const STABILITY: &str = "stability";
pub const IN_BOX: &str = "in-box";
pub const METRIC_IDENTITY: &str = "metric-identity";
pub const METRIC_DOMINATION: &str = "metric-domination";
pub const GAP_NONNEGATIVE: &str = "gap-nonnegative";

pub const ALL_INVARIANTS: [&str; 8] = [
    TELESCOPING,
    DELTA_NONNEGATIVE,
    RATE_MONOTONE,
    STABILITY,
    IN_BOX,
    METRIC_IDENTITY,
    METRIC_DOMINATION,
    GAP_NONNEGATIVE,
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Breach {
    pub invariant: &'static str,
    pub round: u64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct InvariantMonitor {
    box_x: BoxSet,
    box_y: BoxSet,
    counts: BTreeMap<&'static str, u64>,
    first: Option<Breach>,
    tele_stage: Option<u32>,
    tele_max: f64,
    tele_sum: f64,
    prev_rates: Option<(f64, f64, Vec<u32>)>,
}

impl InvariantMonitor {
    pub fn new(box_x: BoxSet, box_y: BoxSet) -> Self {
        Self {
            box_x,
            box_y,
            counts: ALL_INVARIANTS.iter().map(|&k| (k, 0)).collect(),
            first: None,
            tele_stage: None,
            tele_max: 0.0,
            tele_sum: 0.0,
            prev_rates: None,
        }
    }

    fn breach(&mut self, invariant: &'static str, round: u64, detail: String) {
        *self.counts.entry(invariant).or_insert(0) += 1;
        if self.first.is_none() {
            self.first = Some(Breach { invariant, round, detail });
        }
    }

    pub fn counts(&self) -> &BTreeMap<&'static str, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn first_breach(&self) -> Option<&Breach> {
        self.first.as_ref()
    }

    pub fn check_pair(&mut self, t: u64, pair: &StrategyPair) {
        if !self.box_x.contains(&pair.x, 1e-12) || !self.box_y.contains(&pair.y, 1e-12) {
            self.breach(IN_BOX, t, format!("pair ({:?}, {:?}) left the boxes", pair.x, pair.y));
        }
    }

    pub fn check_metrics(&mut self, t: u64, inc: &RoundIncrements, acc: &MetricsAccumulator) {
        let tf = t as f64;
        if inc.dgap < -1e-12 {
            self.breach(GAP_NONNEGATIVE, t, format!("gap increment {:e}", inc.dgap));
        }
        let (r1, r2) = acc.reg_sums();
        let gap = acc.dgap_sum();
        if (gap - (r1 + r2)).abs() > 1e-9 * tf {
            self.breach(METRIC_IDENTITY, t, format!("D-Gap {gap} vs Reg1 + Reg2 {}", r1 + r2));
        }
        if let Some(ne) = acc.nereg_signed_sum() {
            if ne.abs() > gap + 1e-9 * tf {
                self.breach(METRIC_DOMINATION, t, format!("|NE-Reg| {} exceeds D-Gap {gap}", ne.abs()));
            }
        }
    }

    pub fn check_diagnostics(&mut self, t: u64, d: &RoundDiagnostics) {
        if let Some(s) = &d.sigma {
            if self.tele_stage != Some(s.stage) {
                self.tele_stage = Some(s.stage);
                self.tele_max = 0.0;
                self.tele_sum = 0.0;
            }
            let expected = (s.sigma - self.tele_max).max(0.0);
            self.tele_max = self.tele_max.max(s.sigma);
            self.tele_sum += s.delta;
            let scale = 1.0f64.max(self.tele_max);
            if (s.delta - expected).abs() > 1e-12 * scale || (self.tele_sum - self.tele_max).abs() > 1e-12 * scale {
                self.breach(
                    TELESCOPING,
                    t,
                    format!(
                        "stage {}: Delta {} (expected {expected}), sum of Delta {} vs max Sigma {}",
                        s.stage, s.delta, self.tele_sum, self.tele_max
                    ),
                );
                // resynchronize so one bad update is counted once
                self.tele_sum = self.tele_max;
            }
        }
        if let Some((d1, d2)) = d.deltas {
            for (player, v) in [(1, d1), (2, d2)] {
                if v < -1e-9 {
                    self.breach(DELTA_NONNEGATIVE, t, format!("player {player} delta {v:e}"));
                }
            }
        }
        if let Some((eta, gamma, stages)) = self.prev_rates.take() {
            let same = |i: usize| stages.get(i) == d.stages.get(i) && !stages.is_empty();
            let (ix, iy) = (0, d.stages.len().saturating_sub(1));
            if same(ix) && d.eta > eta {
                self.breach(RATE_MONOTONE, t, format!("eta rose from {eta} to {} within a stage", d.eta));
            }
            if same(iy) && d.gamma > gamma {
                self.breach(RATE_MONOTONE, t, format!("gamma rose from {gamma} to {} within a stage", d.gamma));
            }
        }
        self.prev_rates = Some((d.eta, d.gamma, d.stages.clone()));
        for c in &d.contractions {
            if c.displacement > c.bound + 1e-9 {
                self.breach(STABILITY, t, format!("{} moved {} beyond {}", c.label, c.displacement, c.bound));
            }
        }
    }
}
