//! KL projection onto the clipped simplex.
//!
//! Solves `argmin_{w in S(alpha)} <ln(w / W), w>` where `S(alpha)` is the
//! probability simplex with every coordinate at least `alpha / d`. The
//! optimum clips the smallest inputs to the floor and rescales the rest;
//! the clipping threshold is located by a median-split search, expected
//! linear time.

use crate::error::{Error, Result};

/// Unnormalized weights `w` mapped onto the clipped simplex with floor `alpha / d`.
pub fn clipped_simplex_solve(weights: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let d = weights.len();
    if d == 0 {
        return Err(Error::ZeroWeights);
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidAlpha { alpha });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::NonFiniteWeights);
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroWeights);
    }
    let df = d as f64;

    let mut active: Vec<f64> = weights.to_vec();
    let mut clipped_count = 0usize;
    let mut clipped_mass = 0.0;
    let mut threshold = 0.0;
    while !active.is_empty() {
        let mid = (active.len() - 1) / 2;
        let (_, median, _) = active.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
        let w = *median;

        let (mut low_n, mut low_mass, mut mid_n, mut mid_mass) = (0usize, 0.0, 0usize, 0.0);
        for &v in &active {
            if v < w {
                low_n += 1;
                low_mass += v;
            } else if v == w {
                mid_n += 1;
                mid_mass += v;
            }
        }
        let scaled = w * (df - (clipped_count + low_n) as f64 * alpha) / (total - (clipped_mass + low_mass));
        threshold = w;
        if scaled < alpha {
            // w and everything below it sits on the floor
            clipped_count += low_n + mid_n;
            clipped_mass += low_mass + mid_mass;
            active.retain(|&v| v > w);
            if active.is_empty() {
                threshold = weights.iter().copied().filter(|&v| v > w).fold(f64::INFINITY, f64::min);
            }
        } else {
            active.retain(|&v| v < w);
        }
    }

    let floor = alpha / df;
    let scale = (df - clipped_count as f64 * alpha) / (total - clipped_mass);
    Ok(weights
        .iter()
        .map(|&v| if v < threshold { floor } else { v / df * scale })
        .collect())
}
