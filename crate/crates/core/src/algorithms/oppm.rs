//! Online proximal point method with adaptive rates and a doubling budget.
//!
//! Both players share `eta_t = gamma_t = L (2D + C) / (eps + sum_{tau <= t-2} Delta_tau)`.
//! The summand of round `tau` in the cumulative terms `Sigma^1`, `Sigma^2`
//! evaluates `f_tau` at the best responses of round `tau + 1`, so it is held
//! in a pending slot and finalized one round later; the two-round lag of the
//! rate keeps the schedule causal.

use std::sync::Arc;

use super::{BestResponses, Contraction, RoundDiagnostics, SaddleLearner, SigmaRecord, StrategyPair};
use crate::error::{Error, Result};
use crate::geometry::{distance, BoxSet, Regularizer, SquareNorm};
use crate::inner_solvers::{solve_joint_prox, ProxProblem, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::payoffs::SharedPayoff;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OppmConfig {
    pub epsilon: f64,
    pub c_preset: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OppmConfig {
    fn default() -> Self {
        Self { epsilon: 0.1, c_preset: 1.0, tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER }
    }
}

#[derive(Debug, Clone)]
struct PendingTerm {
    payoff: SharedPayoff,
    round: u64,
    x: Vec<f64>,
    y: Vec<f64>,
    x_br: Vec<f64>,
    y_br: Vec<f64>,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone)]
pub struct Oppm {
    box_x: BoxSet,
    box_y: BoxSet,
    x: Vec<f64>,
    y: Vec<f64>,
    cfg: OppmConfig,
    c_preset: f64,
    lipschitz: f64,
    diameter: f64,
    stage: u32,
    round: u64,
    path: f64,
    prev_br: Option<BestResponses>,
    sigma1_sum: f64,
    sigma2_sum: f64,
    sigma_max: f64,
    delta_sum: CompensatedSum,
    pending: Option<PendingTerm>,
}

impl Oppm {
    pub fn new(box_x: BoxSet, box_y: BoxSet, start: StrategyPair, cfg: OppmConfig) -> Result<Self> {
        if !box_x.contains(&start.x, 0.0) || !box_y.contains(&start.y, 0.0) {
            return Err(Error::Config("initial pair lies outside the boxes".into()));
        }
        if !(cfg.epsilon > 0.0) || !(cfg.c_preset > 0.0) {
            return Err(Error::Config("epsilon and the path budget must be positive".into()));
        }
        let reg = SquareNorm;
        let lipschitz = reg.coupling_lipschitz(&box_x).max(reg.coupling_lipschitz(&box_y));
        let diameter = box_x.diameter().max(box_y.diameter());
        Ok(Self {
            x: start.x,
            y: start.y,
            box_x,
            box_y,
            c_preset: cfg.c_preset,
            cfg,
            lipschitz,
            diameter,
            stage: 0,
            round: 0,
            path: 0.0,
            prev_br: None,
            sigma1_sum: 0.0,
            sigma2_sum: 0.0,
            sigma_max: 0.0,
            delta_sum: CompensatedSum::default(),
            pending: None,
        })
    }

    pub fn emit(&self) -> StrategyPair {
        StrategyPair { x: self.x.clone(), y: self.y.clone() }
    }

    pub fn c_preset(&self) -> f64 {
        self.c_preset
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn path_length(&self) -> f64 {
        self.path
    }

    /// `sum Delta` over finalized rounds of the current stage.
    pub fn delta_sum(&self) -> f64 {
        self.delta_sum.value()
    }

    /// `max Sigma` over finalized rounds of the current stage.
    pub fn sigma_running_max(&self) -> f64 {
        self.sigma_max
    }

    /// The rate the next `observe` would use if no doubling happened.
    pub fn rate(&self) -> f64 {
        self.lipschitz * (2.0 * self.diameter + self.c_preset) / (self.cfg.epsilon + self.delta_sum.value())
    }

    fn reset_stage(&mut self) {
        self.sigma1_sum = 0.0;
        self.sigma2_sum = 0.0;
        self.sigma_max = 0.0;
        self.delta_sum = CompensatedSum::default();
    }

    /// Feeds one cumulative Sigma value through the Delta recursion.
    fn push_sigma(&mut self, sigma: f64) -> f64 {
        let delta = (sigma - self.sigma_max).max(0.0);
        self.delta_sum.add(delta);
        self.sigma_max = self.sigma_max.max(sigma);
        delta
    }

    pub fn observe(&mut self, f: SharedPayoff, br: &BestResponses) -> Result<RoundDiagnostics> {
        self.round += 1;
        let t = self.round;

        if let Some(prev) = &self.prev_br {
            self.path += distance(&br.x, &prev.x) + distance(&br.y, &prev.y);
        }
        self.prev_br = Some(br.clone());
        let mut doubled = false;
        while self.path > self.c_preset {
            self.c_preset *= 2.0;
            self.stage += 1;
            self.reset_stage();
            doubled = true;
        }

        let rate = self.rate();
        let problem = ProxProblem {
            payoff: f.as_ref(),
            eta: rate,
            gamma: rate,
            x_anchor: &self.x,
            y_anchor: &self.y,
            box_x: &self.box_x,
            box_y: &self.box_y,
        };
        let report = solve_joint_prox(&problem, self.cfg.tol, self.cfg.max_iter)?;
        let contractions = vec![
            Contraction {
                label: "joint-x",
                displacement: distance(&report.x, &self.x),
                bound: report.eta * f.grad_bound_x(&self.box_x, &self.box_y),
            },
            Contraction {
                label: "joint-y",
                displacement: distance(&report.y, &self.y),
                bound: report.gamma * f.grad_bound_y(&self.box_x, &self.box_y),
            },
        ];

        // finalize round t-1 now that x'_t, y'_t and (x_t, y_t) are known
        let sigma = self.pending.take().map(|p| {
            let g = p.payoff.as_ref();
            let (x1, y1) = (&self.x, &self.y);
            let s1 = g.value(&p.x, &p.y) - g.value(x1, y1) + g.value(&br.x, y1) - g.value(&p.x_br, &p.y);
            let s2 = g.value(&p.x, &p.y_br) - g.value(x1, &br.y) + g.value(x1, y1) - g.value(&p.x, &p.y);
            self.sigma1_sum += s1;
            self.sigma2_sum += s2;
            let sigma = self.sigma1_sum.max(0.0).max(self.sigma2_sum.max(0.0));
            let delta = self.push_sigma(sigma);
            SigmaRecord { round: p.round, stage: self.stage, sigma, delta }
        });

        self.pending = Some(PendingTerm {
            payoff: Arc::clone(&f),
            round: t,
            x: std::mem::replace(&mut self.x, report.x),
            y: std::mem::replace(&mut self.y, report.y),
            x_br: br.x.clone(),
            y_br: br.y.clone(),
        });

        Ok(RoundDiagnostics {
            round: t,
            eta: report.eta,
            gamma: report.gamma,
            stages: vec![self.stage],
            doubled,
            capped: report.capped,
            sigma,
            contractions,
            ..Default::default()
        })
    }
}

impl SaddleLearner for Oppm {
    fn name(&self) -> &'static str {
        "oppm"
    }

    fn emit(&mut self) -> Result<StrategyPair> {
        Ok(Oppm::emit(self))
    }

    fn observe(&mut self, f: SharedPayoff, responses: &BestResponses) -> Result<RoundDiagnostics> {
        Oppm::observe(self, f, responses)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoffs::{PayoffOracle, QuadraticSaddle};

    fn b4() -> BoxSet {
        BoxSet::interval(-4.0, 4.0).unwrap()
    }

    fn pair(x: f64, y: f64) -> StrategyPair {
        StrategyPair { x: vec![x], y: vec![y] }
    }

    fn step(o: &mut Oppm, a: f64, b: f64) -> RoundDiagnostics {
        let f: SharedPayoff = Arc::new(QuadraticSaddle::new(a, b));
        let br = BestResponses::compute(f.as_ref(), &Oppm::emit(o), &b4(), &b4());
        o.observe(f, &br).unwrap()
    }

    #[test]
    fn emit_is_a_read() {
        let o = Oppm::new(b4(), b4(), pair(0.3, -1.2), OppmConfig::default()).unwrap();
        assert_eq!(o.emit(), pair(0.3, -1.2));
        assert_eq!(o.emit(), o.emit());
    }

    #[test]
    fn first_rate_uses_empty_delta_sum() {
        let mut o = Oppm::new(b4(), b4(), pair(0.0, 0.0), OppmConfig::default()).unwrap();
        let d = step(&mut o, 0.0, 0.0);
        assert!((d.eta - 1360.0).abs() < 1e-9);
        assert_eq!(d.eta, d.gamma);
        assert!(d.sigma.is_none());
    }

    #[test]
    fn observe_matches_prox_example() {
        // eps chosen so the first rate is exactly 1
        let cfg = OppmConfig { epsilon: 136.0, ..Default::default() };
        let mut o = Oppm::new(b4(), b4(), pair(1.0, 0.0), cfg).unwrap();
        step(&mut o, 0.0, 0.0);
        let p = o.emit();
        assert!((p.x[0] - 0.4).abs() < 1e-12 && (p.y[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn delta_recursion_telescopes() {
        let mut o = Oppm::new(b4(), b4(), pair(0.0, 0.0), OppmConfig::default()).unwrap();
        let deltas: Vec<f64> = [1.0, 0.5, 2.0].iter().map(|&s| o.push_sigma(s)).collect();
        assert_eq!(deltas, vec![1.0, 0.0, 1.0]);
        assert_eq!(o.delta_sum(), 2.0);
        assert_eq!(o.sigma_running_max(), 2.0);
    }

    #[test]
    fn path_budget_doubles() {
        let mut o = Oppm::new(b4(), b4(), pair(0.0, 0.0), OppmConfig::default()).unwrap();
        step(&mut o, 0.0, 0.0);
        // best responses jump by 0.6 in each coordinate: path 1.2 > C = 1
        let f: SharedPayoff = Arc::new(QuadraticSaddle::new(0.0, 0.0));
        let br = BestResponses { x: vec![0.6], y: vec![0.6] };
        let d = o.observe(f, &br).unwrap();
        assert!(d.doubled);
        assert_eq!(o.c_preset(), 2.0);
        assert_eq!(o.stage(), 1);
        assert!((o.path_length() - 1.2).abs() < 1e-15);
    }

    #[test]
    fn repeated_doubling_in_one_round() {
        let mut o = Oppm::new(b4(), b4(), pair(0.0, 0.0), OppmConfig::default()).unwrap();
        step(&mut o, 0.0, 0.0);
        let f: SharedPayoff = Arc::new(QuadraticSaddle::new(0.0, 0.0));
        o.observe(f, &BestResponses { x: vec![4.0], y: vec![-4.0] }).unwrap();
        assert_eq!(o.c_preset(), 8.0);
        assert_eq!(o.stage(), 3);
    }

    #[test]
    fn lagged_sigma_matches_direct_evaluation() {
        let mut o = Oppm::new(b4(), b4(), pair(2.0, -1.0), OppmConfig::default()).unwrap();
        let f1 = QuadraticSaddle::new(0.5, 0.5);
        let p1 = o.emit();
        let br1 = BestResponses::compute(&f1, &p1, &b4(), &b4());
        o.observe(Arc::new(f1), &br1).unwrap();
        let p2 = o.emit();
        let f2 = QuadraticSaddle::new(-1.0, 0.3);
        let br2 = BestResponses::compute(&f2, &p2, &b4(), &b4());
        let d = o.observe(Arc::new(f2), &br2).unwrap();
        let s1 = f1.value(&p1.x, &p1.y) - f1.value(&p2.x, &p2.y) + f1.value(&br2.x, &p2.y) - f1.value(&br1.x, &p1.y);
        let s2 = f1.value(&p1.x, &br1.y) - f1.value(&p2.x, &br2.y) + f1.value(&p2.x, &p2.y) - f1.value(&p1.x, &p1.y);
        let rec = d.sigma.unwrap();
        assert_eq!(rec.round, 1);
        assert_eq!(rec.sigma, s1.max(0.0).max(s2.max(0.0)));
        assert_eq!(rec.delta, rec.sigma);
    }

    #[test]
    fn stationary_start_at_saddle_stays() {
        let mut o = Oppm::new(b4(), b4(), pair(0.0, 0.0), OppmConfig::default()).unwrap();
        for _ in 0..50 {
            step(&mut o, 0.0, 0.0);
            assert_eq!(o.emit(), pair(0.0, 0.0));
        }
    }

    #[test]
    fn rejects_outside_start() {
        assert!(Oppm::new(b4(), b4(), pair(5.0, 0.0), OppmConfig::default()).is_err());
    }
}
