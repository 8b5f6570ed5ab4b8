//! OptOPPM driven by a clipped-Hedge mixture of lagged predictors.

use std::sync::Arc;

use super::optoppm::OptOppm;
use super::{BestResponses, Hedge, PredictorBank, RoundDiagnostics, SaddleLearner, StrategyPair};
use crate::error::{Error, Result};
use crate::payoffs::{combine, PayoffOracle, SharedPayoff};

/// Per-expert loss: the largest prediction error at the three points the
/// optimistic step evaluates.
pub fn loss_vector(
    f: &dyn PayoffOracle,
    predictors: &[SharedPayoff],
    x: &[f64],
    x_tilde_next: &[f64],
    y: &[f64],
    y_tilde_next: &[f64],
) -> Vec<f64> {
    let f_here = f.value(x, y);
    let f_xn = f.value(x_tilde_next, y);
    let f_yn = f.value(x, y_tilde_next);
    predictors
        .iter()
        .map(|h| {
            (f_here - h.value(x, y))
                .abs()
                .max((f_xn - h.value(x_tilde_next, y)).abs())
                .max((f_yn - h.value(x, y_tilde_next)).abs())
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MultiPredictor {
    inner: OptOppm,
    hedge: Hedge,
    bank: PredictorBank,
    current: Option<Vec<SharedPayoff>>,
    round: u64,
}

impl MultiPredictor {
    pub fn new(inner: OptOppm, bank: PredictorBank, hedge: Hedge) -> Result<Self> {
        if hedge.weights().len() != bank.len() {
            return Err(Error::LengthMismatch { weights: hedge.weights().len(), members: bank.len() });
        }
        Ok(Self { inner, hedge, bank, current: None, round: 0 })
    }

    pub fn hedge(&self) -> &Hedge {
        &self.hedge
    }

    pub fn inner(&self) -> &OptOppm {
        &self.inner
    }
}

impl SaddleLearner for MultiPredictor {
    fn name(&self) -> &'static str {
        "optoppm_multi"
    }

    fn emit(&mut self) -> Result<StrategyPair> {
        let predictions = self.bank.predictions();
        let h = combine(self.hedge.weights(), predictions.clone())?;
        self.current = Some(predictions);
        self.inner.emit(Arc::new(h))
    }

    fn observe(&mut self, f: SharedPayoff, responses: &BestResponses) -> Result<RoundDiagnostics> {
        let predictions = self.current.take().ok_or(Error::ObserveWithoutEmit)?;
        self.round += 1;
        let weights = self.hedge.weights().to_vec();
        let r = self.inner.observe(Arc::clone(&f), responses)?;
        let losses = loss_vector(f.as_ref(), &predictions, &r.pair.x, &r.x_tilde_next, &r.pair.y, &r.y_tilde_next);
        let step = self.hedge.step(&losses, self.round)?;
        self.bank.push(f);
        let mut d = r.diagnostics;
        d.weights = Some(weights);
        d.hedge = Some(step);
        Ok(d)
    }
}
