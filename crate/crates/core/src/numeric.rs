//! Small generic minimizers used when a payoff has no closed-form responses.

use crate::geometry::BoxSet;

pub const GOLDEN_TOL: f64 = 1e-10;
pub const GOLDEN_MAX_ITER: usize = 200;

/// Golden-section search for the minimizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> f64 {
    if hi - lo <= tol {
        return 0.5 * (lo + hi);
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iter {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // endpoints matter for monotone sections
    let mid = 0.5 * (a + b);
    [lo, mid, hi]
        .into_iter()
        .fold((mid, f(mid)), |best, p| {
            let v = f(p);
            if v < best.1 { (p, v) } else { best }
        })
        .0
}

/// Projected gradient descent with Armijo backtracking on a box.
///
/// Returns the iterate and the final projected-gradient residual.
pub fn projected_gradient_min<F, G>(
    f: F,
    grad: G,
    domain: &BoxSet,
    start: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64, usize)
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    let mut x = domain.project_unchecked(start);
    let mut step = 1.0;
    let mut residual = f64::INFINITY;
    for it in 0..max_iter {
        let g = grad(&x);
        let probe: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - gi).collect();
        let probe = domain.project_unchecked(&probe);
        residual = crate::geometry::distance(&x, &probe);
        if residual <= tol {
            return (x, residual, it);
        }
        let fx = f(&x);
        loop {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - step * gi).collect();
            let cand = domain.project_unchecked(&cand);
            let decrease: f64 = cand.iter().zip(&x).zip(&g).map(|((c, xi), gi)| gi * (c - xi)).sum();
            let dist2: f64 = cand.iter().zip(&x).map(|(c, xi)| (c - xi) * (c - xi)).sum();
            if f(&cand) <= fx + decrease + dist2 / (2.0 * step) || step < 1e-16 {
                x = cand;
                break;
            }
            step *= 0.5;
        }
        step *= 2.0;
    }
    (x, residual, max_iter)
}
