//! Per-round regularized subproblems.
//!
//! The joint step solves
//! `min_x max_y f(x, y) + |x - xa|^2 / (2 eta) - |y - ya|^2 / (2 gamma)`,
//! which is strongly convex-strongly concave. Scalar quadratic payoffs go
//! through an exact KKT enumeration; anything else runs projected
//! extragradient on the regularized operator.

use crate::error::{Error, Result};
use crate::geometry::{distance, BoxSet};
use crate::numeric::projected_gradient_min;
use crate::payoffs::{PayoffOracle, QuadraticForm};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Rates above this are clamped before solving.
pub const RATE_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy)]
pub struct ProxProblem<'a> {
    pub payoff: &'a dyn PayoffOracle,
    pub eta: f64,
    pub gamma: f64,
    pub x_anchor: &'a [f64],
    pub y_anchor: &'a [f64],
    pub box_x: &'a BoxSet,
    pub box_y: &'a BoxSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ClosedForm,
    Iterative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub method: SolveMethod,
    /// Rates actually used, after capping.
    pub eta: f64,
    pub gamma: f64,
    pub capped: bool,
}

fn check_rate(name: &'static str, value: f64) -> Result<f64> {
    if !(value > 0.0) || value.is_nan() {
        return Err(Error::NonPositiveRate { name, value });
    }
    Ok(value.min(RATE_CAP))
}

/// Projected fixed-point gap of a candidate joint solution.
pub fn joint_residual(p: &ProxProblem<'_>, eta: f64, gamma: f64, x: &[f64], y: &[f64]) -> f64 {
    let s = eta.min(gamma).min(1.0);
    let gx = p.payoff.grad_x(x, y);
    let gy = p.payoff.grad_y(x, y);
    let px: Vec<f64> = (0..x.len()).map(|i| x[i] - s * (gx[i] + (x[i] - p.x_anchor[i]) / eta)).collect();
    let py: Vec<f64> = (0..y.len()).map(|i| y[i] + s * (gy[i] - (y[i] - p.y_anchor[i]) / gamma)).collect();
    distance(x, &p.box_x.project_unchecked(&px)) + distance(y, &p.box_y.project_unchecked(&py))
}

/// Joint prox step of the online proximal point method.
pub fn solve_joint_prox(p: &ProxProblem<'_>, tol: f64, max_iter: usize) -> Result<SolveReport> {
    p.box_x.check_dim(p.x_anchor)?;
    p.box_y.check_dim(p.y_anchor)?;
    let eta = check_rate("eta", p.eta)?;
    let gamma = check_rate("gamma", p.gamma)?;
    let capped = eta < p.eta || gamma < p.gamma;

    if p.box_x.dim() == 1 && p.box_y.dim() == 1 {
        if let Some(q) = p.payoff.quadratic_form() {
            let (x, y) = quadratic_joint_kkt(&q, eta, gamma, p.x_anchor[0], p.y_anchor[0], p.box_x, p.box_y);
            let (x, y) = (vec![x], vec![y]);
            let residual = joint_residual(p, eta, gamma, &x, &y);
            return Ok(SolveReport { x, y, residual, iterations: 0, method: SolveMethod::ClosedForm, eta, gamma, capped });
        }
    }
    let (x, y, residual, iterations) = extragradient(p, eta, gamma, tol, max_iter)?;
    Ok(SolveReport { x, y, residual, iterations, method: SolveMethod::Iterative, eta, gamma, capped })
}

/// Same problem, forced through the iterative path.
pub fn solve_joint_prox_iterative(p: &ProxProblem<'_>, tol: f64, max_iter: usize) -> Result<SolveReport> {
    let eta = check_rate("eta", p.eta)?;
    let gamma = check_rate("gamma", p.gamma)?;
    let (x, y, residual, iterations) = extragradient(p, eta, gamma, tol, max_iter)?;
    Ok(SolveReport {
        x,
        y,
        residual,
        iterations,
        method: SolveMethod::Iterative,
        eta,
        gamma,
        capped: eta < p.eta || gamma < p.gamma,
    })
}

#[derive(Clone, Copy)]
enum Side {
    Free,
    Lower,
    Upper,
}

/// Enumerates the nine free/lower/upper cases of the scalar KKT system and
/// keeps the candidate with the smallest complementarity violation.
///
/// Stationarity rows are scaled by `eta` and `gamma` so a vanishing payoff
/// returns the anchor exactly.
fn quadratic_joint_kkt(q: &QuadraticForm, eta: f64, gamma: f64, xa: f64, ya: f64, bx: &BoxSet, by: &BoxSet) -> (f64, f64) {
    let (xl, xh) = bx.bounds_1d();
    let (yl, yh) = by.bounds_1d();
    // eta * d/dx:   ax x + cx y - rx = 0
    // gamma * d/dy: cy x - by y + ry = 0
    let ax = 1.0 + eta * q.p;
    let cx = eta * q.c;
    let rx = xa - eta * q.gx;
    let by_ = 1.0 + gamma * q.r;
    let cy = gamma * q.c;
    let ry = ya + gamma * q.gy;
    let dx = |x: f64, y: f64| ax * x + cx * y - rx;
    let dy = |x: f64, y: f64| cy * x - by_ * y + ry;

    let sides = [Side::Free, Side::Lower, Side::Upper];
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for sx in sides {
        for sy in sides {
            let (x, y) = match (sx, sy) {
                (Side::Free, Side::Free) => {
                    let det = -ax * by_ - cx * cy;
                    ((-rx * by_ + cx * ry) / det, (-ax * ry - rx * cy) / det)
                }
                (Side::Free, _) => {
                    let y = if matches!(sy, Side::Lower) { yl } else { yh };
                    ((rx - cx * y) / ax, y)
                }
                (_, Side::Free) => {
                    let x = if matches!(sx, Side::Lower) { xl } else { xh };
                    (x, (cy * x + ry) / by_)
                }
                _ => (
                    if matches!(sx, Side::Lower) { xl } else { xh },
                    if matches!(sy, Side::Lower) { yl } else { yh },
                ),
            };
            let mut viol = (xl - x).max(0.0) + (x - xh).max(0.0) + (yl - y).max(0.0) + (y - yh).max(0.0);
            let (gx, gy) = (dx(x, y) / (1.0 + eta), dy(x, y) / (1.0 + gamma));
            viol += match sx {
                Side::Free => 0.0,
                Side::Lower => (-gx).max(0.0),
                Side::Upper => gx.max(0.0),
            };
            viol += match sy {
                Side::Free => 0.0,
                Side::Lower => gy.max(0.0),
                Side::Upper => (-gy).max(0.0),
            };
            if viol < best.0 {
                best = (viol, x, y);
            }
        }
    }
    (best.1.clamp(xl, xh), best.2.clamp(yl, yh))
}

fn extragradient(p: &ProxProblem<'_>, eta: f64, gamma: f64, tol: f64, max_iter: usize) -> Result<(Vec<f64>, Vec<f64>, f64, usize)> {
    let nx = p.box_x.dim();
    let op = |z: &[f64]| -> Vec<f64> {
        let (x, y) = z.split_at(nx);
        let gx = p.payoff.grad_x(x, y);
        let gy = p.payoff.grad_y(x, y);
        let mut out = Vec::with_capacity(z.len());
        out.extend((0..nx).map(|i| gx[i] + (x[i] - p.x_anchor[i]) / eta));
        out.extend((0..y.len()).map(|i| -gy[i] + (y[i] - p.y_anchor[i]) / gamma));
        out
    };
    let project = |z: &[f64]| -> Vec<f64> {
        let (x, y) = z.split_at(nx);
        let mut out = p.box_x.project_unchecked(x);
        out.extend(p.box_y.project_unchecked(y));
        out
    };
    let step_along = |z: &[f64], d: &[f64], s: f64| -> Vec<f64> {
        project(&z.iter().zip(d).map(|(zi, di)| zi - s * di).collect::<Vec<_>>())
    };

    let mut z: Vec<f64> = p.x_anchor.iter().chain(p.y_anchor).copied().collect();
    z = project(&z);

    // curvature probe: secant of the payoff's gradient operator near the anchor
    let probe = {
        let h = 1e-3 * (1.0 + p.box_x.diameter() + p.box_y.diameter());
        let z2: Vec<f64> = z.iter().map(|v| v + h).collect();
        let (f1, f2) = (op(&z), op(&z2));
        let reg = 1.0 / eta + 1.0 / gamma;
        (distance(&f1, &f2) / distance(&z, &z2) - reg).max(0.0)
    };
    let mut s = 1.0 / (1.0 / eta + 1.0 / gamma + probe);

    let residual_of = |z: &[f64]| {
        let (x, y) = z.split_at(nx);
        joint_residual(p, eta, gamma, x, y)
    };
    let mut residual = residual_of(&z);
    for it in 0..max_iter {
        if residual <= tol {
            let (x, y) = z.split_at(nx);
            return Ok((x.to_vec(), y.to_vec(), residual, it));
        }
        let fz = op(&z);
        let fhalf = loop {
            let half = step_along(&z, &fz, s);
            let fhalf = op(&half);
            if s * distance(&fhalf, &fz) <= 0.9 * distance(&half, &z) || s < 1e-300 {
                break fhalf;
            }
            s *= 0.5;
        };
        z = step_along(&z, &fhalf, s);
        residual = residual_of(&z);
    }
    if residual <= tol {
        let (x, y) = z.split_at(nx);
        return Ok((x.to_vec(), y.to_vec(), residual, max_iter));
    }
    Err(Error::InnerSolveDiverged { residual, iterations: max_iter })
}

/// `argmin_{x in box} eta * f(x, y_fixed) + |x - anchor|^2 / 2`.
pub fn prox_min_step(
    payoff: &dyn PayoffOracle,
    y_fixed: &[f64],
    eta: f64,
    anchor: &[f64],
    domain: &BoxSet,
    tol: f64,
) -> Result<Vec<f64>> {
    domain.check_dim(anchor)?;
    let eta = check_rate("eta", eta)?;
    if let (Some(q), 1, 1) = (payoff.quadratic_form(), domain.dim(), y_fixed.len()) {
        let (lo, hi) = domain.bounds_1d();
        let x = (anchor[0] - eta * (q.c * y_fixed[0] + q.gx)) / (1.0 + eta * q.p);
        return Ok(vec![x.clamp(lo, hi)]);
    }
    let obj = |x: &[f64]| eta * payoff.value(x, y_fixed) + 0.5 * distance(x, anchor).powi(2);
    let grad = |x: &[f64]| {
        payoff.grad_x(x, y_fixed).iter().zip(x.iter().zip(anchor)).map(|(g, (xi, ai))| eta * g + xi - ai).collect()
    };
    let (x, residual, iterations) = projected_gradient_min(obj, grad, domain, anchor, tol, DEFAULT_MAX_ITER);
    if residual > tol {
        return Err(Error::InnerSolveDiverged { residual, iterations });
    }
    Ok(x)
}

/// `argmax_{y in box} gamma * f(x_fixed, y) - |y - anchor|^2 / 2`.
pub fn prox_max_step(
    payoff: &dyn PayoffOracle,
    x_fixed: &[f64],
    gamma: f64,
    anchor: &[f64],
    domain: &BoxSet,
    tol: f64,
) -> Result<Vec<f64>> {
    domain.check_dim(anchor)?;
    let gamma = check_rate("gamma", gamma)?;
    if let (Some(q), 1, 1) = (payoff.quadratic_form(), domain.dim(), x_fixed.len()) {
        let (lo, hi) = domain.bounds_1d();
        let y = (anchor[0] + gamma * (q.c * x_fixed[0] + q.gy)) / (1.0 + gamma * q.r);
        return Ok(vec![y.clamp(lo, hi)]);
    }
    let obj = |y: &[f64]| -gamma * payoff.value(x_fixed, y) + 0.5 * distance(y, anchor).powi(2);
    let grad = |y: &[f64]| {
        payoff.grad_y(x_fixed, y).iter().zip(y.iter().zip(anchor)).map(|(g, (yi, ai))| -gamma * g + yi - ai).collect()
    };
    let (y, residual, iterations) = projected_gradient_min(obj, grad, domain, anchor, tol, DEFAULT_MAX_ITER);
    if residual > tol {
        return Err(Error::InnerSolveDiverged { residual, iterations });
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoffs::{QuadraticSaddle, ZeroPayoff};

    fn b4() -> BoxSet {
        BoxSet::interval(-4.0, 4.0).unwrap()
    }

    fn joint(q: &dyn PayoffOracle, eta: f64, gamma: f64, xa: f64, ya: f64) -> SolveReport {
        let (bx, by) = (b4(), b4());
        let p = ProxProblem { payoff: q, eta, gamma, x_anchor: &[xa], y_anchor: &[ya], box_x: &bx, box_y: &by };
        solve_joint_prox(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap()
    }

    #[test]
    fn joint_prox_examples() {
        let q = QuadraticSaddle::new(0.0, 0.0);
        let r = joint(&q, 1.0, 1.0, 1.0, 0.0);
        assert_eq!(r.method, SolveMethod::ClosedForm);
        assert!((r.x[0] - 0.4).abs() < 1e-12 && (r.y[0] - 0.2).abs() < 1e-12);
        assert!(r.residual <= DEFAULT_TOL);
        for (eta, gamma) in [(0.01, 3.0), (1e6, 1e-3)] {
            let r = joint(&q, eta, gamma, 0.0, 0.0);
            assert_eq!((r.x[0], r.y[0]), (0.0, 0.0));
        }
    }

    // Anchor (9, 0) lies outside the box, yet the regularized saddle is
    // interior: 2x + y = 9 and x = 2y give (3.6, 1.8).
    #[test]
    fn joint_prox_far_anchor() {
        let r = joint(&QuadraticSaddle::new(0.0, 0.0), 1.0, 1.0, 9.0, 0.0);
        assert!((r.x[0] - 3.6).abs() < 1e-12 && (r.y[0] - 1.8).abs() < 1e-12);
    }

    #[test]
    fn joint_prox_clamped_case() {
        // anchor (20, 0): unconstrained (8, 4) leaves the box; KKT gives x = 4, y = 2
        let r = joint(&QuadraticSaddle::new(0.0, 0.0), 1.0, 1.0, 20.0, 0.0);
        assert_eq!((r.x[0], r.y[0]), (4.0, 2.0));
        assert!(r.residual <= DEFAULT_TOL);
    }

    #[test]
    fn zero_payoff_prox_stays_at_anchor() {
        let r = joint(&ZeroPayoff, 5.0, 0.2, 1.5, -3.0);
        assert_eq!((r.x[0], r.y[0]), (1.5, -3.0));
    }

    #[test]
    fn rate_cap_is_reported() {
        let r = joint(&QuadraticSaddle::new(1.0, 1.0), 1e15, 1.0, 0.0, 0.0);
        assert!(r.capped);
        assert_eq!(r.eta, RATE_CAP);
    }

    #[test]
    fn nonpositive_rate_rejected() {
        let (bx, by) = (b4(), b4());
        let q = QuadraticSaddle::new(0.0, 0.0);
        let p = ProxProblem { payoff: &q, eta: 0.0, gamma: 1.0, x_anchor: &[0.0], y_anchor: &[0.0], box_x: &bx, box_y: &by };
        assert!(matches!(solve_joint_prox(&p, 1e-10, 10), Err(Error::NonPositiveRate { .. })));
    }

    #[test]
    fn iterative_divergence_is_an_error() {
        let (bx, by) = (b4(), b4());
        let q = QuadraticSaddle::new(0.0, 0.0);
        let p = ProxProblem { payoff: &q, eta: 1.0, gamma: 1.0, x_anchor: &[3.0], y_anchor: &[-2.0], box_x: &bx, box_y: &by };
        let err = solve_joint_prox_iterative(&p, 1e-14, 2).unwrap_err();
        assert!(err.to_string().starts_with("inner-solve-diverged"));
    }

    #[test]
    fn prox_min_examples() {
        let q = QuadraticSaddle::new(0.0, 0.0);
        assert_eq!(prox_min_step(&q, &[0.0], 1.0, &[1.0], &b4(), 1e-10).unwrap(), vec![0.5]);
        assert_eq!(prox_min_step(&q, &[0.0], 1.0, &[9.0], &b4(), 1e-10).unwrap(), vec![4.0]);
        // section f(., 1) is minimized at x = -1
        for eta in [0.01, 1.0, 100.0] {
            assert_eq!(prox_min_step(&q, &[1.0], eta, &[-1.0], &b4(), 1e-10).unwrap(), vec![-1.0]);
        }
    }

    #[test]
    fn prox_max_examples() {
        let q = QuadraticSaddle::new(0.0, 0.0);
        assert_eq!(prox_max_step(&q, &[0.0], 1.0, &[1.0], &b4(), 1e-10).unwrap(), vec![0.5]);
        assert_eq!(prox_max_step(&q, &[4.0], 1.0, &[4.0], &b4(), 1e-10).unwrap(), vec![4.0]);
        for gamma in [0.01, 1.0, 100.0] {
            assert_eq!(prox_max_step(&q, &[2.0], gamma, &[2.0], &b4(), 1e-10).unwrap(), vec![2.0]);
        }
    }
}
