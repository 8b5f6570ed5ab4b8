//! Optimistic online proximal point method.
//!
//! The emitted pair is a joint prox step on the predictor `h_t` around the
//! auxiliary anchors; after `f_t` is revealed each player takes a one-sided
//! prox step on `f_t` to move its anchor. Rates follow
//! `eta_t = L_phi (D_X + C^1) / (eps + sum_{tau < t} delta^1_tau)` and the
//! symmetric rule for `gamma_t`, each player doubling its own path budget.

use std::sync::Arc;

use super::{BestResponses, Contraction, PredictorBank, RoundDiagnostics, SaddleLearner, StrategyPair};
use crate::error::{Error, Result};
use crate::geometry::{distance, BoxSet, Regularizer, SquareNorm};
use crate::inner_solvers::{prox_max_step, prox_min_step, solve_joint_prox, ProxProblem, SolveReport, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::payoffs::SharedPayoff;

/// Tolerance below zero before a delta is treated as a bookkeeping bug.
pub const DELTA_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptOppmConfig {
    pub epsilon: f64,
    pub c1_preset: f64,
    pub c2_preset: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OptOppmConfig {
    fn default() -> Self {
        Self { epsilon: 0.1, c1_preset: 1.0, c2_preset: 1.0, tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER }
    }
}

#[derive(Debug, Clone)]
struct Emitted {
    predictor: SharedPayoff,
    report: SolveReport,
    stages: (u32, u32),
}

/// What `observe` hands back besides the common diagnostics.
#[derive(Debug, Clone)]
pub struct OptOppmRound {
    pub diagnostics: RoundDiagnostics,
    pub pair: StrategyPair,
    pub predictor: SharedPayoff,
    pub x_tilde_next: Vec<f64>,
    pub y_tilde_next: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct OptOppm {
    box_x: BoxSet,
    box_y: BoxSet,
    x_tilde: Vec<f64>,
    y_tilde: Vec<f64>,
    cfg: OptOppmConfig,
    c1: f64,
    c2: f64,
    l_phi: f64,
    l_psi: f64,
    d_x: f64,
    d_y: f64,
    delta1_sum: f64,
    delta2_sum: f64,
    path1: f64,
    path2: f64,
    stage1: u32,
    stage2: u32,
    round: u64,
    prev_br: Option<BestResponses>,
    emitted: Option<Emitted>,
}

impl OptOppm {
    pub fn new(box_x: BoxSet, box_y: BoxSet, start: StrategyPair, cfg: OptOppmConfig) -> Result<Self> {
        if !box_x.contains(&start.x, 0.0) || !box_y.contains(&start.y, 0.0) {
            return Err(Error::Config("initial pair lies outside the boxes".into()));
        }
        if !(cfg.epsilon > 0.0) || !(cfg.c1_preset > 0.0) || !(cfg.c2_preset > 0.0) {
            return Err(Error::Config("epsilon and the path budgets must be positive".into()));
        }
        let reg = SquareNorm;
        Ok(Self {
            l_phi: reg.coupling_lipschitz(&box_x),
            l_psi: reg.coupling_lipschitz(&box_y),
            d_x: box_x.diameter(),
            d_y: box_y.diameter(),
            x_tilde: start.x,
            y_tilde: start.y,
            box_x,
            box_y,
            c1: cfg.c1_preset,
            c2: cfg.c2_preset,
            cfg,
            delta1_sum: 0.0,
            delta2_sum: 0.0,
            path1: 0.0,
            path2: 0.0,
            stage1: 0,
            stage2: 0,
            round: 0,
            prev_br: None,
            emitted: None,
        })
    }

    pub fn rates(&self) -> (f64, f64) {
        (
            self.l_phi * (self.d_x + self.c1) / (self.cfg.epsilon + self.delta1_sum),
            self.l_psi * (self.d_y + self.c2) / (self.cfg.epsilon + self.delta2_sum),
        )
    }

    pub fn anchors(&self) -> StrategyPair {
        StrategyPair { x: self.x_tilde.clone(), y: self.y_tilde.clone() }
    }

    pub fn presets(&self) -> (f64, f64) {
        (self.c1, self.c2)
    }

    pub fn delta_sums(&self) -> (f64, f64) {
        (self.delta1_sum, self.delta2_sum)
    }

    pub fn stages(&self) -> (u32, u32) {
        (self.stage1, self.stage2)
    }

    pub fn box_x(&self) -> &BoxSet {
        &self.box_x
    }

    pub fn box_y(&self) -> &BoxSet {
        &self.box_y
    }

    /// Joint prox step on the predictor around the auxiliary anchors.
    pub fn emit(&mut self, predictor: SharedPayoff) -> Result<StrategyPair> {
        let (eta, gamma) = self.rates();
        let problem = ProxProblem {
            payoff: predictor.as_ref(),
            eta,
            gamma,
            x_anchor: &self.x_tilde,
            y_anchor: &self.y_tilde,
            box_x: &self.box_x,
            box_y: &self.box_y,
        };
        let report = solve_joint_prox(&problem, self.cfg.tol, self.cfg.max_iter)?;
        let pair = StrategyPair { x: report.x.clone(), y: report.y.clone() };
        self.emitted = Some(Emitted { predictor, report, stages: (self.stage1, self.stage2) });
        Ok(pair)
    }

    pub fn observe(&mut self, f: SharedPayoff, br: &BestResponses) -> Result<OptOppmRound> {
        let Emitted { predictor: h, report, stages } = self.emitted.take().ok_or(Error::ObserveWithoutEmit)?;
        self.round += 1;
        let (x, y) = (&report.x, &report.y);
        let (eta, gamma) = (report.eta, report.gamma);

        if let Some(prev) = &self.prev_br {
            self.path1 += distance(&br.x, &prev.x);
            self.path2 += distance(&br.y, &prev.y);
        }
        self.prev_br = Some(br.clone());
        let mut doubled = false;
        while self.path1 > self.c1 {
            self.c1 *= 2.0;
            self.stage1 += 1;
            self.delta1_sum = 0.0;
            doubled = true;
        }
        while self.path2 > self.c2 {
            self.c2 *= 2.0;
            self.stage2 += 1;
            self.delta2_sum = 0.0;
            doubled = true;
        }

        let x_next = prox_min_step(f.as_ref(), y, eta, &self.x_tilde, &self.box_x, self.cfg.tol)?;
        let y_next = prox_max_step(f.as_ref(), x, gamma, &self.y_tilde, &self.box_y, self.cfg.tol)?;

        let reg = SquareNorm;
        let delta1 = f.value(x, y) - h.value(x, y) + h.value(&x_next, y) - f.value(&x_next, y)
            - reg.coupling(&x_next, x)? / eta;
        let delta2 = f.value(x, &y_next) - h.value(x, &y_next) + h.value(x, y) - f.value(x, y)
            - reg.coupling(&y_next, y)? / gamma;
        if delta1 < -DELTA_TOL {
            return Err(Error::NegativeDelta { player: 1, value: delta1 });
        }
        if delta2 < -DELTA_TOL {
            return Err(Error::NegativeDelta { player: 2, value: delta2 });
        }
        // rounding noise below zero would otherwise raise the next rate
        self.delta1_sum += delta1.max(0.0);
        self.delta2_sum += delta2.max(0.0);

        let contractions = vec![
            Contraction {
                label: "emit-x",
                displacement: distance(x, &self.x_tilde),
                bound: eta * h.grad_bound_x(&self.box_x, &self.box_y),
            },
            Contraction {
                label: "emit-y",
                displacement: distance(y, &self.y_tilde),
                bound: gamma * h.grad_bound_y(&self.box_x, &self.box_y),
            },
            Contraction {
                label: "anchor-x",
                displacement: distance(&x_next, &self.x_tilde),
                bound: eta * f.grad_bound_x(&self.box_x, &self.box_y),
            },
            Contraction {
                label: "anchor-y",
                displacement: distance(&y_next, &self.y_tilde),
                bound: gamma * f.grad_bound_y(&self.box_x, &self.box_y),
            },
        ];
        self.x_tilde = x_next.clone();
        self.y_tilde = y_next.clone();

        Ok(OptOppmRound {
            diagnostics: RoundDiagnostics {
                round: self.round,
                eta,
                gamma,
                stages: vec![stages.0, stages.1],
                doubled,
                capped: report.capped,
                deltas: Some((delta1, delta2)),
                contractions,
                ..Default::default()
            },
            pair: StrategyPair { x: report.x, y: report.y },
            predictor: h,
            x_tilde_next: x_next,
            y_tilde_next: y_next,
        })
    }
}

/// OptOPPM fed by a single lagged-payoff predictor.
#[derive(Debug, Clone)]
pub struct SinglePredictor {
    inner: OptOppm,
    bank: PredictorBank,
}

impl SinglePredictor {
    pub fn new(inner: OptOppm, lag: usize) -> Result<Self> {
        Ok(Self { inner, bank: PredictorBank::new(vec![lag])? })
    }

    pub fn inner(&self) -> &OptOppm {
        &self.inner
    }
}

impl SaddleLearner for SinglePredictor {
    fn name(&self) -> &'static str {
        "optoppm"
    }

    fn emit(&mut self) -> Result<StrategyPair> {
        let h = self.bank.predictions().remove(0);
        self.inner.emit(h)
    }

    fn observe(&mut self, f: SharedPayoff, responses: &BestResponses) -> Result<RoundDiagnostics> {
        let round = self.inner.observe(Arc::clone(&f), responses)?;
        self.bank.push(f);
        Ok(round.diagnostics)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoffs::{QuadraticSaddle, ZeroPayoff};

    fn b4() -> BoxSet {
        BoxSet::interval(-4.0, 4.0).unwrap()
    }

    fn start(x: f64, y: f64) -> StrategyPair {
        StrategyPair { x: vec![x], y: vec![y] }
    }

    #[test]
    fn zero_predictor_emits_anchor() {
        let mut o = OptOppm::new(b4(), b4(), start(1.5, -2.5), OptOppmConfig::default()).unwrap();
        let p = o.emit(Arc::new(ZeroPayoff)).unwrap();
        assert_eq!(p, start(1.5, -2.5));
    }

    #[test]
    fn first_rates() {
        let o = OptOppm::new(b4(), b4(), start(0.0, 0.0), OptOppmConfig::default()).unwrap();
        let (eta, gamma) = o.rates();
        assert!((eta - 720.0).abs() < 1e-9 && (gamma - 720.0).abs() < 1e-9);
    }

    fn unit_rate_config() -> OptOppmConfig {
        // L_phi (D_X + C) / eps = 8 * 9 / 72 = 1
        OptOppmConfig { epsilon: 72.0, ..Default::default() }
    }

    #[test]
    fn emit_matches_prox_example() {
        let mut o = OptOppm::new(b4(), b4(), start(1.0, 0.0), unit_rate_config()).unwrap();
        let p = o.emit(Arc::new(QuadraticSaddle::new(0.0, 0.0))).unwrap();
        assert!((p.x[0] - 0.4).abs() < 1e-12 && (p.y[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn delta_with_zero_predictor() {
        let mut o = OptOppm::new(b4(), b4(), start(1.0, 0.0), unit_rate_config()).unwrap();
        let pair = o.emit(Arc::new(ZeroPayoff)).unwrap();
        assert_eq!(pair, start(1.0, 0.0));
        let f: SharedPayoff = Arc::new(QuadraticSaddle::new(0.0, 0.0));
        let br = BestResponses::compute(f.as_ref(), &pair, &b4(), &b4());
        let r = o.observe(f, &br).unwrap();
        assert_eq!(r.x_tilde_next, vec![0.5]);
        let (d1, d2) = r.diagnostics.deltas.unwrap();
        assert!((d1 - 0.25).abs() < 1e-15, "{d1}");
        assert!(d2 >= 0.0);
        assert!((o.delta_sums().0 - 0.25).abs() < 1e-15);
        let (eta, _) = o.rates();
        assert!((eta - 72.0 / (72.0 + 0.25)).abs() < 1e-15);
    }

    #[test]
    fn perfect_predictor_at_fixed_point_has_zero_delta() {
        let q: SharedPayoff = Arc::new(QuadraticSaddle::new(0.5, -0.5));
        let mut o = OptOppm::new(b4(), b4(), start(0.5, -0.5), OptOppmConfig::default()).unwrap();
        let pair = o.emit(Arc::clone(&q)).unwrap();
        let br = BestResponses::compute(q.as_ref(), &pair, &b4(), &b4());
        let r = o.observe(q, &br).unwrap();
        assert_eq!(r.diagnostics.deltas, Some((0.0, 0.0)));
    }

    #[test]
    fn observe_requires_emit() {
        let mut o = OptOppm::new(b4(), b4(), start(0.0, 0.0), OptOppmConfig::default()).unwrap();
        let f: SharedPayoff = Arc::new(ZeroPayoff);
        let br = BestResponses { x: vec![0.0], y: vec![0.0] };
        assert!(matches!(o.observe(f, &br), Err(Error::ObserveWithoutEmit)));
    }

    #[test]
    fn per_player_doubling() {
        let mut o = OptOppm::new(b4(), b4(), start(0.0, 0.0), OptOppmConfig::default()).unwrap();
        let f: SharedPayoff = Arc::new(ZeroPayoff);
        o.emit(Arc::new(ZeroPayoff)).unwrap();
        o.observe(Arc::clone(&f), &BestResponses { x: vec![0.0], y: vec![0.0] }).unwrap();
        o.emit(Arc::new(ZeroPayoff)).unwrap();
        let r = o.observe(f, &BestResponses { x: vec![1.5], y: vec![0.5] }).unwrap();
        assert!(r.diagnostics.doubled);
        assert_eq!(o.presets(), (2.0, 1.0));
        assert_eq!(o.stages(), (1, 0));
    }

    #[test]
    fn deltas_nonnegative_on_mismatched_predictor() {
        let mut o = OptOppm::new(b4(), b4(), start(-3.0, 2.0), OptOppmConfig::default()).unwrap();
        let mut h: SharedPayoff = Arc::new(ZeroPayoff);
        for t in 0..200 {
            let a = 3.0 * ((t as f64) * 0.7).sin();
            let f: SharedPayoff = Arc::new(QuadraticSaddle::new(a, -a / 2.0));
            let pair = o.emit(Arc::clone(&h)).unwrap();
            let br = BestResponses::compute(f.as_ref(), &pair, &b4(), &b4());
            let r = o.observe(Arc::clone(&f), &br).unwrap();
            let (d1, d2) = r.diagnostics.deltas.unwrap();
            assert!(d1 >= -1e-9 && d2 >= -1e-9);
            for c in &r.diagnostics.contractions {
                assert!(c.displacement <= c.bound + 1e-9, "{c:?}");
            }
            assert!(f.value(&pair.x, &pair.y).is_finite());
            h = f;
        }
    }
}
