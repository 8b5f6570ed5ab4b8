use std::collections::BTreeMap;

use serde::Serialize;

use super::config::{AlgorithmKind, ExperimentConfig};
use super::monitor::{Breach, InvariantMonitor};
use super::rng::initial_pair;
use crate::algorithms::{
    BestResponses, Hedge, MultiPredictor, Oppm, OppmConfig, OptOppm, OptOppmConfig, PredictorBank, SaddleLearner,
    SinglePredictor, StrategyPair,
};
use crate::error::Result;
use crate::metrics::{MetricsAccumulator, RoundIncrements, Snapshot};

/// One row of the trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub t: u64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub x_br: Vec<f64>,
    pub y_br: Vec<f64>,
    pub dgap_avg: f64,
    pub nereg_avg: Option<f64>,
    pub reg1_avg: f64,
    pub reg2_avg: f64,
    pub path: f64,
    pub vt: Option<f64>,
    pub eta: f64,
    pub gamma: f64,
    pub stages: Vec<u32>,
    pub doubled: bool,
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub label: String,
    pub records: Vec<RoundRecord>,
}

impl Trace {
    pub fn at(&self, t: u64) -> Option<&RoundRecord> {
        self.records.binary_search_by_key(&t, |r| r.t).ok().map(|i| &self.records[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub rounds: u64,
    pub start: StrategyPair,
    pub last: Snapshot,
    /// Increments of the final round.
    pub last_increments: RoundIncrements,
    /// Raw (unaveraged) signed NE-Reg sum.
    pub nereg_signed_sum: Option<f64>,
    pub dgap_sum: f64,
    pub reg_sums: (f64, f64),
    pub violations: BTreeMap<&'static str, u64>,
    pub first_breach: Option<Breach>,
}

impl RunSummary {
    pub fn total_violations(&self) -> u64 {
        self.violations.values().sum()
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: Trace,
    pub summary: RunSummary,
}

/// Starting pair of a run: the configured one, else a seeded in-box draw.
pub fn start_pair(cfg: &ExperimentConfig) -> StrategyPair {
    match cfg.initial_pair {
        Some((x, y)) => StrategyPair { x: vec![x], y: vec![y] },
        None => initial_pair(cfg.seed, &cfg.environment.box_x(), &cfg.environment.box_y()),
    }
}

pub fn build_learner(cfg: &ExperimentConfig, start: StrategyPair) -> Result<Box<dyn SaddleLearner>> {
    let (bx, by) = (cfg.environment.box_x(), cfg.environment.box_y());
    let opt_cfg = OptOppmConfig {
        epsilon: cfg.epsilon,
        c1_preset: cfg.c1_preset,
        c2_preset: cfg.c2_preset,
        ..Default::default()
    };
    Ok(match cfg.algorithm {
        AlgorithmKind::Oppm => Box::new(Oppm::new(
            bx,
            by,
            start,
            OppmConfig { epsilon: cfg.epsilon, c_preset: cfg.c_preset, ..Default::default() },
        )?),
        AlgorithmKind::Optoppm => {
            let lag = cfg.effective_lags()[0];
            Box::new(SinglePredictor::new(OptOppm::new(bx, by, start, opt_cfg)?, lag)?)
        }
        AlgorithmKind::OptoppmMulti => {
            let bank = PredictorBank::new(cfg.effective_lags())?;
            let hedge = Hedge::new(bank.len(), cfg.effective_t_guess(), cfg.epsilon)?;
            Box::new(MultiPredictor::new(OptOppm::new(bx, by, start, opt_cfg)?, bank, hedge)?)
        }
    })
}

/// Plays `cfg.horizon` rounds: emit, reveal, best responses, metrics, observe.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let env = &cfg.environment;
    let (bx, by) = (env.box_x(), env.box_y());
    let start = start_pair(cfg);
    let mut learner = build_learner(cfg, start.clone())?;
    let mut metrics = MetricsAccumulator::new(bx.clone(), by.clone());
    let mut monitor = InvariantMonitor::new(bx.clone(), by.clone());
    let mut records = Vec::new();
    let mut last_inc = None;

    for t in 1..=cfg.horizon {
        let pair = learner.emit()?;
        monitor.check_pair(t, &pair);
        let f = env.next_payoff(t, &pair)?;
        let br = BestResponses::compute(f.as_ref(), &pair, &bx, &by);
        let inc = metrics.record_with(&f, &pair, &br);
        monitor.check_metrics(t, &inc, &metrics);
        let diag = learner.observe(f, &br)?;
        monitor.check_diagnostics(t, &diag);

        if cfg.is_checkpoint(t) {
            let s = metrics.snapshot().expect("at least one round recorded");
            records.push(RoundRecord {
                t,
                x: pair.x,
                y: pair.y,
                x_br: br.x,
                y_br: br.y,
                dgap_avg: s.dgap_avg,
                nereg_avg: s.nereg_avg,
                reg1_avg: s.reg1_avg,
                reg2_avg: s.reg2_avg,
                path: s.path,
                vt: s.vt,
                eta: diag.eta,
                gamma: diag.gamma,
                stages: diag.stages,
                doubled: diag.doubled,
                weights: diag.weights,
            });
        }
        last_inc = Some(inc);
    }

    let label = cfg.label();
    let summary = RunSummary {
        label: label.clone(),
        rounds: cfg.horizon,
        start,
        last: metrics.snapshot().expect("horizon >= 1"),
        last_increments: last_inc.expect("horizon >= 1"),
        nereg_signed_sum: metrics.nereg_signed_sum(),
        dgap_sum: metrics.dgap_sum(),
        reg_sums: metrics.reg_sums(),
        violations: monitor.counts().clone(),
        first_breach: monitor.first_breach().cloned(),
    };
    Ok(RunOutput { trace: Trace { label, records }, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{EnvironmentKind, EnvironmentSpec};

    #[test]
    fn start_at_stationary_saddle_is_free() {
        for alg in AlgorithmKind::ALL {
            let mut cfg = ExperimentConfig::new(EnvironmentSpec::stationary(0.0, 0.0), alg).with_horizon(300);
            cfg.initial_pair = Some((0.0, 0.0));
            let out = run_experiment(&cfg).unwrap();
            assert_eq!(out.summary.dgap_sum, 0.0, "{alg}");
            assert!(out.trace.records.iter().all(|r| r.dgap_avg == 0.0));
            assert_eq!(out.summary.total_violations(), 0);
        }
    }

    #[test]
    fn nereg_cancel_short_run() {
        for alg in AlgorithmKind::ALL {
            let cfg = ExperimentConfig::new(EnvironmentSpec::new(EnvironmentKind::NeregCancel), alg)
                .with_horizon(1000)
                .with_seed(5);
            let out = run_experiment(&cfg).unwrap();
            let s = out.summary;
            assert!((s.last.dgap_avg - 1.0).abs() < 1e-12);
            assert!(s.nereg_signed_sum.unwrap().abs() <= 1.0 + 1e-9);
            assert_eq!(s.total_violations(), 0, "{:?}", s.first_breach);
        }
    }

    #[test]
    fn trace_layout() {
        let cfg = ExperimentConfig::new(EnvironmentSpec::new(EnvironmentKind::Case3), AlgorithmKind::OptoppmMulti)
            .with_horizon(250);
        let out = run_experiment(&cfg).unwrap();
        let ts: Vec<u64> = out.trace.records.iter().map(|r| r.t).collect();
        assert_eq!(ts, vec![1, 10, 100, 200, 250]);
        assert_eq!(out.trace.records[0].weights.as_ref().unwrap().len(), 3);
        assert_eq!(out.trace.at(200).unwrap().t, 200);
        assert!(out.trace.at(201).is_none());
    }
}
