use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::payoffs::{SharedPayoff, ZeroPayoff};

/// Lagged-payoff predictors `h^k_t = f_{t - lag_k}`, zero until history exists.
#[derive(Debug, Clone)]
pub struct PredictorBank {
    lags: Vec<usize>,
    history: VecDeque<SharedPayoff>,
    capacity: usize,
}

impl PredictorBank {
    pub fn new(lags: Vec<usize>) -> Result<Self> {
        if lags.is_empty() || lags.contains(&0) {
            return Err(Error::Config(format!("predictor lags must be non-empty and >= 1, got {lags:?}")));
        }
        let capacity = *lags.iter().max().unwrap();
        Ok(Self { lags, history: VecDeque::with_capacity(capacity), capacity })
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }

    /// Predictors for the next round.
    pub fn predictions(&self) -> Vec<SharedPayoff> {
        let n = self.history.len();
        self.lags
            .iter()
            .map(|&lag| {
                if n >= lag {
                    Arc::clone(&self.history[n - lag])
                } else {
                    Arc::new(ZeroPayoff) as SharedPayoff
                }
            })
            .collect()
    }

    /// Records the payoff revealed this round.
    pub fn push(&mut self, f: SharedPayoff) {
        if self.history.len() == self.capacity {
            self.history.pop_front();
        }
        self.history.push_back(f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoffs::QuadraticSaddle;

    #[test]
    fn lags_index_history() {
        let mut bank = PredictorBank::new(vec![1, 3]).unwrap();
        let probe = |bank: &PredictorBank| -> Vec<f64> {
            bank.predictions().iter().map(|h| h.value(&[0.0], &[0.0])).collect()
        };
        assert_eq!(probe(&bank), vec![0.0, 0.0]);
        // f_t = q(t, 0) has value t^2 / 2 at the origin
        for t in 1..=6 {
            bank.push(Arc::new(QuadraticSaddle::new(t as f64, 0.0)));
            let next = t + 1;
            let expect_lag = |lag: usize| if next > lag { ((next - lag) as f64).powi(2) / 2.0 } else { 0.0 };
            assert_eq!(probe(&bank), vec![expect_lag(1), expect_lag(3)]);
        }
    }

    #[test]
    fn rejects_zero_lag() {
        assert!(PredictorBank::new(vec![0]).is_err());
        assert!(PredictorBank::new(vec![]).is_err());
    }
}
