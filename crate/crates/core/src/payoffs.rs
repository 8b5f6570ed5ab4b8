//! Convex-concave payoff oracles.
//!
//! Player 1 minimizes over `x`, player 2 maximizes over `y`. Every oracle
//! exposes values, partial gradients, exact best responses and the
//! max-min value; the environments in this crate only emit members of the
//! scalar quadratic family, which also publish their polynomial coefficients
//! so the inner solvers can take closed-form paths.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::BoxSet;
use crate::numeric::{golden_section_min, projected_gradient_min, GOLDEN_MAX_ITER, GOLDEN_TOL};

pub type SharedPayoff = Arc<dyn PayoffOracle>;

/// A payoff `f(x, y)`, convex in `x` and concave in `y`.
pub trait PayoffOracle: fmt::Debug + Send + Sync {
    fn value(&self, x: &[f64], y: &[f64]) -> f64;
    fn grad_x(&self, x: &[f64], y: &[f64]) -> Vec<f64>;
    fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64>;
    /// `argmin_{x in X} f(x, y)`.
    fn best_response_x(&self, y: &[f64], box_x: &BoxSet) -> Vec<f64>;
    /// `argmax_{y in Y} f(x, y)`.
    fn best_response_y(&self, x: &[f64], box_y: &BoxSet) -> Vec<f64>;
    /// `max_y min_x f` over the boxes.
    fn minimax_value(&self, box_x: &BoxSet, box_y: &BoxSet) -> Result<f64>;
    /// Upper bound on `|grad_x f|` over `X x Y`.
    fn grad_bound_x(&self, box_x: &BoxSet, box_y: &BoxSet) -> f64;
    /// Upper bound on `|grad_y f|` over `X x Y`.
    fn grad_bound_y(&self, box_x: &BoxSet, box_y: &BoxSet) -> f64;

    /// Polynomial coefficients, when the payoff is a scalar quadratic.
    fn quadratic_form(&self) -> Option<QuadraticForm> {
        None
    }
}

/// `p/2 x^2 - r/2 y^2 + c x y + gx x + gy y + k` with `p, r >= 0`, on scalars.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadraticForm {
    pub p: f64,
    pub r: f64,
    pub c: f64,
    pub gx: f64,
    pub gy: f64,
    pub k: f64,
}

impl QuadraticForm {
    pub fn value(&self, x: f64, y: f64) -> f64 {
        0.5 * self.p * x * x - 0.5 * self.r * y * y + self.c * x * y + self.gx * x + self.gy * y + self.k
    }

    pub fn grad_x(&self, x: f64, y: f64) -> f64 {
        self.p * x + self.c * y + self.gx
    }

    pub fn grad_y(&self, x: f64, y: f64) -> f64 {
        self.c * x - self.r * y + self.gy
    }

    pub fn best_response_x(&self, y: f64, lo: f64, hi: f64) -> f64 {
        let slope = self.c * y + self.gx;
        if self.p > 0.0 {
            (-slope / self.p).clamp(lo, hi)
        } else if slope > 0.0 {
            lo
        } else if slope < 0.0 {
            hi
        } else {
            0f64.clamp(lo, hi)
        }
    }

    pub fn best_response_y(&self, x: f64, lo: f64, hi: f64) -> f64 {
        let slope = self.c * x + self.gy;
        if self.r > 0.0 {
            (slope / self.r).clamp(lo, hi)
        } else if slope > 0.0 {
            hi
        } else if slope < 0.0 {
            lo
        } else {
            0f64.clamp(lo, hi)
        }
    }

    pub fn scaled(&self, w: f64) -> Self {
        Self {
            p: w * self.p,
            r: w * self.r,
            c: w * self.c,
            gx: w * self.gx,
            gy: w * self.gy,
            k: w * self.k,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            p: self.p + o.p,
            r: self.r + o.r,
            c: self.c + o.c,
            gx: self.gx + o.gx,
            gy: self.gy + o.gy,
            k: self.k + o.k,
        }
    }

    /// Exact `max |q(x, y)|` over a rectangle, by enumerating corners, edge
    /// stationary points and the interior stationary point.
    pub fn sup_abs(&self, (xl, xh): (f64, f64), (yl, yh): (f64, f64)) -> f64 {
        let mut pts = vec![(xl, yl), (xl, yh), (xh, yl), (xh, yh)];
        // q is quadratic in y along x = const edges
        if self.r != 0.0 {
            for x in [xl, xh] {
                let y = (self.c * x + self.gy) / self.r;
                if y > yl && y < yh {
                    pts.push((x, y));
                }
            }
        }
        if self.p != 0.0 {
            for y in [yl, yh] {
                let x = -(self.c * y + self.gx) / self.p;
                if x > xl && x < xh {
                    pts.push((x, y));
                }
            }
        }
        let det = -self.p * self.r - self.c * self.c;
        if det != 0.0 {
            // p x + c y = -gx ; c x - r y = -gy
            let x = (self.gx * self.r + self.c * self.gy) / det;
            let y = (-self.p * self.gy + self.c * self.gx) / det;
            if x > xl && x < xh && y > yl && y < yh {
                pts.push((x, y));
            }
        }
        pts.into_iter().map(|(x, y)| self.value(x, y).abs()).fold(0.0, f64::max)
    }

    fn corner_grad_bounds(&self, (xl, xh): (f64, f64), (yl, yh): (f64, f64)) -> (f64, f64) {
        let corners = [(xl, yl), (xl, yh), (xh, yl), (xh, yh)];
        let gx = corners.iter().map(|&(x, y)| self.grad_x(x, y).abs()).fold(0.0, f64::max);
        let gy = corners.iter().map(|&(x, y)| self.grad_y(x, y).abs()).fold(0.0, f64::max);
        (gx, gy)
    }

    /// Value at the unconstrained saddle, if that saddle is feasible.
    fn minimax_value(&self, bx: (f64, f64), by: (f64, f64)) -> Result<f64> {
        let det = -self.p * self.r - self.c * self.c;
        if det == 0.0 {
            if self.gx == 0.0 && self.gy == 0.0 {
                return Ok(self.k);
            }
            return Err(Error::SaddleNotInterior { x: f64::NAN, y: f64::NAN });
        }
        let x = (self.gx * self.r + self.c * self.gy) / det;
        let y = (-self.p * self.gy + self.c * self.gx) / det;
        if x < bx.0 || x > bx.1 || y < by.0 || y > by.1 {
            return Err(Error::SaddleNotInterior { x, y });
        }
        Ok(self.value(x, y))
    }
}

fn scalar(v: &[f64]) -> f64 {
    debug_assert_eq!(v.len(), 1);
    v[0]
}

fn inside(bx: &BoxSet, by: &BoxSet, a: f64, b: f64) -> bool {
    bx.contains(&[a], 0.0) && by.contains(&[b], 0.0)
}

/// `1/2 (x-a)^2 - 1/2 (y-b)^2 + (x-a)(y-b)`, saddle at `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticSaddle {
    pub a: f64,
    pub b: f64,
}

impl QuadraticSaddle {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }
}

impl PayoffOracle for QuadraticSaddle {
    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let (u, v) = (scalar(x) - self.a, scalar(y) - self.b);
        0.5 * u * u - 0.5 * v * v + u * v
    }

    fn grad_x(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        vec![(scalar(x) - self.a) + (scalar(y) - self.b)]
    }

    fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        vec![-(scalar(y) - self.b) + (scalar(x) - self.a)]
    }

    fn best_response_x(&self, y: &[f64], box_x: &BoxSet) -> Vec<f64> {
        let (lo, hi) = box_x.bounds_1d();
        vec![(self.a - (scalar(y) - self.b)).clamp(lo, hi)]
    }

    fn best_response_y(&self, x: &[f64], box_y: &BoxSet) -> Vec<f64> {
        let (lo, hi) = box_y.bounds_1d();
        vec![(self.b + (scalar(x) - self.a)).clamp(lo, hi)]
    }

    fn minimax_value(&self, box_x: &BoxSet, box_y: &BoxSet) -> Result<f64> {
        if inside(box_x, box_y, self.a, self.b) {
            Ok(0.0)
        } else {
            Err(Error::SaddleNotInterior { x: self.a, y: self.b })
        }
    }

    fn grad_bound_x(&self, box_x: &BoxSet, box_y: &BoxSet) -> f64 {
        self.form().corner_grad_bounds(box_x.bounds_1d(), box_y.bounds_1d()).0
    }

    fn grad_bound_y(&self, box_x: &BoxSet, box_y: &BoxSet) -> f64 {
        self.form().corner_grad_bounds(box_x.bounds_1d(), box_y.bounds_1d()).1
    }

    fn quadratic_form(&self) -> Option<QuadraticForm> {
        Some(self.form())
    }
}

impl QuadraticSaddle {
    fn form(&self) -> QuadraticForm {
        let (a, b) = (self.a, self.b);
        QuadraticForm {
            p: 1.0,
            r: 1.0,
            c: 1.0,
            gx: -a - b,
            gy: b - a,
            k: 0.5 * a * a - 0.5 * b * b + a * b,
        }
    }
}

/// `(x-a)^2 - (y-b)^2`: unit coefficients, no cross term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparableSaddle {
    pub a: f64,
    pub b: f64,
}

impl SeparableSaddle {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    fn form(&self) -> QuadraticForm {
        QuadraticForm {
            p: 2.0,
            r: 2.0,
            c: 0.0,
            gx: -2.0 * self.a,
            gy: 2.0 * self.b,
            k: self.a * self.a - self.b * self.b,
        }
    }
}

impl PayoffOracle for SeparableSaddle {
    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let (u, v) = (scalar(x) - self.a, scalar(y) - self.b);
        u * u - v * v
    }

    fn grad_x(&self, x: &[f64], _y: &[f64]) -> Vec<f64> {
        vec![2.0 * (scalar(x) - self.a)]
    }

    fn grad_y(&self, _x: &[f64], y: &[f64]) -> Vec<f64> {
        vec![-2.0 * (scalar(y) - self.b)]
    }

    fn best_response_x(&self, _y: &[f64], box_x: &BoxSet) -> Vec<f64> {
        let (lo, hi) = box_x.bounds_1d();
        vec![self.a.clamp(lo, hi)]
    }

    fn best_response_y(&self, _x: &[f64], box_y: &BoxSet) -> Vec<f64> {
        let (lo, hi) = box_y.bounds_1d();
        vec![self.b.clamp(lo, hi)]
    }

    fn minimax_value(&self, box_x: &BoxSet, box_y: &BoxSet) -> Result<f64> {
        if inside(box_x, box_y, self.a, self.b) {
            Ok(0.0)
        } else {
            Err(Error::SaddleNotInterior { x: self.a, y: self.b })
        }
    }

    fn grad_bound_x(&self, box_x: &BoxSet, box_y: &BoxSet) -> f64 {
        self.form().corner_grad_bounds(box_x.bounds_1d(), box_y.bounds_1d()).0
    }

    fn grad_bound_y(&self, box_x: &BoxSet, box_y: &BoxSet) -> f64 {
        self.form().corner_grad_bounds(box_x.bounds_1d(), box_y.bounds_1d()).1
    }

    fn quadratic_form(&self) -> Option<QuadraticForm> {
        Some(self.form())
    }
}

/// The identically-zero payoff; stands in for predictors without history.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ZeroPayoff;

impl PayoffOracle for ZeroPayoff {
    fn value(&self, _x: &[f64], _y: &[f64]) -> f64 {
        0.0
    }

    fn grad_x(&self, x: &[f64], _y: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }

    fn grad_y(&self, _x: &[f64], y: &[f64]) -> Vec<f64> {
        vec![0.0; y.len()]
    }

    fn best_response_x(&self, _y: &[f64], box_x: &BoxSet) -> Vec<f64> {
        box_x.project_unchecked(&vec![0.0; box_x.dim()])
    }

    fn best_response_y(&self, _x: &[f64], box_y: &BoxSet) -> Vec<f64> {
        box_y.project_unchecked(&vec![0.0; box_y.dim()])
    }

    fn minimax_value(&self, _box_x: &BoxSet, _box_y: &BoxSet) -> Result<f64> {
        Ok(0.0)
    }

    fn grad_bound_x(&self, _box_x: &BoxSet, _box_y: &BoxSet) -> f64 {
        0.0
    }

    fn grad_bound_y(&self, _box_x: &BoxSet, _box_y: &BoxSet) -> f64 {
        0.0
    }

    fn quadratic_form(&self) -> Option<QuadraticForm> {
        Some(QuadraticForm::default())
    }
}

/// Pointwise convex combination `sum_k w_k f_k`.
#[derive(Debug, Clone)]
pub struct WeightedPayoff {
    weights: Vec<f64>,
    members: Vec<SharedPayoff>,
}

/// Weighted combination of predictors; weights must lie on the simplex.
pub fn combine(weights: &[f64], members: Vec<SharedPayoff>) -> Result<WeightedPayoff> {
    if weights.len() != members.len() || members.is_empty() {
        return Err(Error::LengthMismatch { weights: weights.len(), members: members.len() });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || weights.iter().any(|w| !(*w >= -1e-9)) {
        return Err(Error::OffSimplex { sum });
    }
    Ok(WeightedPayoff { weights: weights.to_vec(), members })
}

impl WeightedPayoff {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[SharedPayoff] {
        &self.members
    }

    fn weighted_vec<F: Fn(&SharedPayoff) -> Vec<f64>>(&self, f: F) -> Vec<f64> {
        let mut acc: Vec<f64> = Vec::new();
        for (w, m) in self.weights.iter().zip(&self.members) {
            let g = f(m);
            if acc.is_empty() {
                acc = vec![0.0; g.len()];
            }
            for (a, gi) in acc.iter_mut().zip(g) {
                *a += w * gi;
            }
        }
        acc
    }
}

impl PayoffOracle for WeightedPayoff {
    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        self.weights.iter().zip(&self.members).map(|(w, m)| w * m.value(x, y)).sum()
    }

    fn grad_x(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.weighted_vec(|m| m.grad_x(x, y))
    }

    fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.weighted_vec(|m| m.grad_y(x, y))
    }

    fn best_response_x(&self, y: &[f64], box_x: &BoxSet) -> Vec<f64> {
        if let Some(q) = self.quadratic_form() {
            let (lo, hi) = box_x.bounds_1d();
            return vec![q.best_response_x(scalar(y), lo, hi)];
        }
        numeric_best_response(box_x, |x| self.value(x, y), |x| self.grad_x(x, y))
    }

    fn best_response_y(&self, x: &[f64], box_y: &BoxSet) -> Vec<f64> {
        if let Some(q) = self.quadratic_form() {
            let (lo, hi) = box_y.bounds_1d();
            return vec![q.best_response_y(scalar(x), lo, hi)];
        }
        numeric_best_response(
            box_y,
            |y| -self.value(x, y),
            |y| self.grad_y(x, y).into_iter().map(|g| -g).collect(),
        )
    }

    fn minimax_value(&self, box_x: &BoxSet, box_y: &BoxSet) -> Result<f64> {
        match self.quadratic_form() {
            Some(q) => q.minimax_value(box_x.bounds_1d(), box_y.bounds_1d()),
            None => Err(Error::SaddleNotInterior { x: f64::NAN, y: f64::NAN }),
        }
    }

    fn grad_bound_x(&self, box_x: &BoxSet, box_y: &BoxSet) -> f64 {
        self.weights.iter().zip(&self.members).map(|(w, m)| w * m.grad_bound_x(box_x, box_y)).sum()
    }

    fn grad_bound_y(&self, box_x: &BoxSet, box_y: &BoxSet) -> f64 {
        self.weights.iter().zip(&self.members).map(|(w, m)| w * m.grad_bound_y(box_x, box_y)).sum()
    }

    fn quadratic_form(&self) -> Option<QuadraticForm> {
        let mut acc = QuadraticForm::default();
        for (w, m) in self.weights.iter().zip(&self.members) {
            acc = acc.add(&m.quadratic_form()?.scaled(*w));
        }
        Some(acc)
    }
}

/// Minimizer of a convex section over a box without a closed form.
pub(crate) fn numeric_best_response<F, G>(domain: &BoxSet, f: F, grad: G) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    if domain.dim() == 1 {
        let (lo, hi) = domain.bounds_1d();
        vec![golden_section_min(|t| f(&[t]), lo, hi, GOLDEN_TOL, GOLDEN_MAX_ITER)]
    } else {
        projected_gradient_min(f, grad, domain, &domain.center(), GOLDEN_TOL, 100_000).0
    }
}

/// `max_{X x Y} |f1 - f2|`, available when both payoffs are scalar quadratics.
pub fn rho_distance(f1: &dyn PayoffOracle, f2: &dyn PayoffOracle, box_x: &BoxSet, box_y: &BoxSet) -> Option<f64> {
    if box_x.dim() != 1 || box_y.dim() != 1 {
        return None;
    }
    let diff = f1.quadratic_form()?.add(&f2.quadratic_form()?.scaled(-1.0));
    Some(diff.sup_abs(box_x.bounds_1d(), box_y.bounds_1d()))
}
