//! Box-shaped feasible sets and the squared-norm regularizer.
//!
//! Every prox update in this crate lives on an axis-aligned box with the
//! regularizer `phi(x) = |x|^2 / 2`. Its Fenchel coupling with an anchor `z`
//! collapses to `|x - z|^2 / 2`, so the conjugate never has to be formed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box `{ x : lower <= x <= upper }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSet {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        for (index, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::InvalidBox { index, lower: lo, upper: hi });
            }
        }
        Ok(Self { lower, upper })
    }

    /// One-dimensional interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    /// `[lo, hi]^dim`.
    pub fn cube(lo: f64, hi: f64, dim: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Euclidean length of `upper - lower`.
    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    /// Coordinate-wise clamp; the Euclidean projection onto the box.
    pub fn project(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(p)?;
        Ok(self.project_unchecked(p))
    }

    pub(crate) fn project_unchecked(&self, p: &[f64]) -> Vec<f64> {
        p.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&lo, &hi))| v.clamp(lo, hi))
            .collect()
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| v >= lo - tol && v <= hi + tol)
    }

    /// Coordinates of the midpoint.
    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    pub fn check_dim(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: p.len() });
        }
        Ok(())
    }

    /// Bounds of a one-dimensional box. Panics on higher dimensions.
    pub(crate) fn bounds_1d(&self) -> (f64, f64) {
        assert_eq!(self.dim(), 1, "scalar closed forms need a one-dimensional box");
        (self.lower[0], self.upper[0])
    }
}

/// Euclidean distance between two points of equal dimension.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Distance-generating function of a player's domain.
pub trait Regularizer {
    /// A subgradient of the regularizer at `x`, the dual anchor of the coupling.
    fn anchor_gradient(&self, x: &[f64]) -> Vec<f64>;

    /// Fenchel coupling between `x` and the anchor point `anchor`.
    fn coupling(&self, x: &[f64], anchor: &[f64]) -> Result<f64>;

    /// Strong-convexity modulus.
    fn strong_convexity(&self) -> f64;

    /// Lipschitz constant of `coupling(., a)` over `domain`, uniformly in `a`.
    fn coupling_lipschitz(&self, domain: &BoxSet) -> f64;
}

/// `phi(x) = |x|^2 / 2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SquareNorm;

impl Regularizer for SquareNorm {
    fn anchor_gradient(&self, x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }

    fn coupling(&self, x: &[f64], anchor: &[f64]) -> Result<f64> {
        if x.len() != anchor.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: anchor.len() });
        }
        let sq: f64 = x.iter().zip(anchor).map(|(u, v)| (u - v) * (u - v)).sum();
        Ok(0.5 * sq)
    }

    fn strong_convexity(&self) -> f64 {
        1.0
    }

    // The gradient x - a of the coupling is bounded by the diameter on the box.
    fn coupling_lipschitz(&self, domain: &BoxSet) -> f64 {
        domain.diameter()
    }
}
