use serde::Serialize;

use super::simplex::clipped_simplex_solve;
use crate::error::{Error, Result};

/// Clipped Hedge over `d` experts with an adaptive rate and a doubling horizon guess.
#[derive(Debug, Clone)]
pub struct Hedge {
    weights: Vec<f64>,
    t_guess: u64,
    epsilon: f64,
    sigma_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HedgeStep {
    pub theta: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub doubled: bool,
}

impl Hedge {
    /// Uniform start. `t_guess` must exceed `d` so the floor fraction stays below one.
    pub fn new(d: usize, t_guess: u64, epsilon: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroWeights);
        }
        if t_guess <= d as u64 {
            return Err(Error::InvalidAlpha { alpha: d as f64 / t_guess as f64 });
        }
        if !(epsilon > 0.0) {
            return Err(Error::Config(format!("hedge epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { weights: vec![1.0 / d as f64; d], t_guess, epsilon, sigma_sum: 0.0 })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn t_guess(&self) -> u64 {
        self.t_guess
    }

    pub fn alpha(&self) -> f64 {
        self.weights.len() as f64 / self.t_guess as f64
    }

    pub fn sigma_sum(&self) -> f64 {
        self.sigma_sum
    }

    /// Rate the next step would use, before any horizon doubling.
    pub fn theta(&self) -> f64 {
        (self.t_guess as f64).ln() / (self.epsilon + self.sigma_sum)
    }

    /// One update with the nonnegative loss vector of round `t`.
    pub fn step(&mut self, losses: &[f64], t: u64) -> Result<HedgeStep> {
        if losses.len() != self.weights.len() {
            return Err(Error::DimensionMismatch { expected: self.weights.len(), got: losses.len() });
        }
        if losses.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::NonFiniteWeights);
        }
        let doubled = t > self.t_guess;
        if doubled {
            self.t_guess *= 2;
        }
        let theta = self.theta();
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::NonPositiveRate { name: "theta", value: theta });
        }
        let alpha = self.alpha();

        let logits: Vec<f64> = self.weights.iter().zip(losses).map(|(w, l)| w.ln() - theta * l).collect();
        let shift = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let unnormalized: Vec<f64> = logits.iter().map(|z| (z - shift).exp()).collect();
        let next = clipped_simplex_solve(&unnormalized, alpha)?;
        if next.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFiniteWeights);
        }

        let linear: f64 = losses.iter().zip(self.weights.iter().zip(&next)).map(|(l, (w, n))| l * (w - n)).sum();
        let sigma = linear - kl(&next, &self.weights) / theta;
        self.sigma_sum += sigma;
        self.weights = next;
        Ok(HedgeStep { theta, sigma, alpha, doubled })
    }
}

/// `sum p ln(p / q)` for strictly positive `q`.
pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(pi, _)| **pi > 0.0).map(|(pi, qi)| pi * (pi / qi).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_loss_keeps_weights() {
        let mut h = Hedge::new(3, 7, 0.1).unwrap();
        let before = h.weights().to_vec();
        let s = h.step(&[0.0; 3], 1).unwrap();
        assert_eq!(h.weights(), &before[..]);
        assert_eq!(s.sigma, 0.0);
    }

    #[test]
    fn floor_binds_on_heavy_loss() {
        // t_guess 4 with d = 2 gives alpha = 0.5; pick the loss so theta * L = (0, ln 9)
        let mut h = Hedge::new(2, 4, 0.1).unwrap();
        let theta = 4f64.ln() / 0.1;
        let s = h.step(&[0.0, 9f64.ln() / theta], 1).unwrap();
        assert!((s.theta - theta).abs() < 1e-12);
        let w = h.weights();
        assert!((w[0] - 0.75).abs() < 1e-12 && (w[1] - 0.25).abs() < 1e-12, "{w:?}");
        let expected = (9f64.ln() / theta) * (0.5 - 0.25) - kl(&[0.75, 0.25], &[0.5, 0.5]) / theta;
        assert!((s.sigma - expected).abs() < 1e-15);
        assert!(s.sigma.is_finite());
        assert_eq!(h.sigma_sum(), s.sigma);
    }

    #[test]
    fn horizon_doubles() {
        let mut h = Hedge::new(3, 7, 0.1).unwrap();
        assert!(!h.step(&[0.1, 0.2, 0.3], 7).unwrap().doubled);
        let s = h.step(&[0.1, 0.2, 0.3], 8).unwrap();
        assert!(s.doubled);
        assert_eq!(h.t_guess(), 14);
        assert!((s.alpha - 3.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Hedge::new(3, 3, 0.1).is_err());
        let mut h = Hedge::new(2, 5, 0.1).unwrap();
        assert!(h.step(&[1.0], 1).is_err());
        assert!(h.step(&[-1.0, 0.0], 1).is_err());
    }
}
