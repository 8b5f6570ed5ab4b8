//! Self-checks: the invariant suite over randomized runs and brute-force
//! oracles for the two inner solvers.

use std::sync::Arc;

use serde::Serialize;

use super::config::{AlgorithmKind, ExperimentConfig};
use super::grid::run_many;
use super::rng::Sampler;
use crate::algorithms::clipped_simplex_solve;
use crate::environments::{EnvironmentKind, EnvironmentSpec};
use crate::error::{Error, Result};
use crate::geometry::BoxSet;
use crate::inner_solvers::{solve_joint_prox, solve_joint_prox_iterative, ProxProblem, SolveMethod, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::payoffs::{combine, QuadraticSaddle, SeparableSaddle, SharedPayoff};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, detail }
    }
}

/// Seeded environments used by the invariant suite: every shipped stream plus
/// a custom stream of 64 random in-box saddles.
pub fn randomized_configs(seed: u64, rounds: u64) -> Vec<ExperimentConfig> {
    let mut s = Sampler::new(seed ^ 0x9e37_79b9_7f4a_7c15);
    let saddles: Vec<(f64, f64)> = (0..64).map(|_| (s.uniform(-3.9, 3.9), s.uniform(-3.9, 3.9))).collect();
    let mut envs: Vec<EnvironmentSpec> = [
        EnvironmentKind::Case1,
        EnvironmentKind::Case2,
        EnvironmentKind::Case3,
        EnvironmentKind::Case4,
        EnvironmentKind::NeregCancel,
    ]
    .into_iter()
    .map(EnvironmentSpec::new)
    .collect();
    envs.push(EnvironmentSpec::stationary(s.uniform(-4.0, 4.0), s.uniform(-4.0, 4.0)));
    envs.push(EnvironmentSpec::custom(saddles));
    envs.into_iter()
        .flat_map(|env| {
            AlgorithmKind::ALL
                .into_iter()
                .map(move |alg| ExperimentConfig::new(env.clone(), alg).with_horizon(rounds).with_seed(seed))
        })
        .collect()
}

/// Runs every randomized config for every seed; passes when no run breaches
/// an invariant or errors.
pub fn invariant_suite(seeds: &[u64], rounds: u64, threads: usize) -> CheckOutcome {
    let cfgs: Vec<ExperimentConfig> = seeds.iter().flat_map(|&s| randomized_configs(s, rounds)).collect();
    let mut violations = 0u64;
    let mut first: Option<String> = None;
    for (cfg, out) in cfgs.iter().zip(run_many(&cfgs, threads)) {
        match out {
            Ok(o) => {
                violations += o.summary.total_violations();
                if let (None, Some(b)) = (&first, &o.summary.first_breach) {
                    first = Some(format!(
                        "{} seed {}: invariant `{}` at round {}: {}",
                        cfg.label(),
                        cfg.seed,
                        b.invariant,
                        b.round,
                        b.detail
                    ));
                }
            }
            Err(e) => {
                violations += 1;
                first.get_or_insert_with(|| format!("{} seed {}: {e}", cfg.label(), cfg.seed));
            }
        }
    }
    let detail = match first {
        Some(f) => format!("{violations} violations over {} runs; first: {f}", cfgs.len()),
        None => format!("0 violations over {} runs x {rounds} rounds", cfgs.len()),
    };
    CheckOutcome::new("invariant-suite", violations == 0, detail)
}

/// Exhaustive active-set search for the KL projection of `w` (all positive)
/// onto the clipped simplex `{v : sum v = 1, v_i >= alpha / d}`.
pub fn brute_clipped_simplex(w: &[f64], alpha: f64) -> Vec<f64> {
    let d = w.len();
    let floor = alpha / d as f64;
    let total: f64 = w.iter().sum();
    let q: Vec<f64> = w.iter().map(|v| v / total).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << d) {
        let clamped = mask.count_ones() as usize;
        if clamped == d
            && (alpha - 1.0).abs() > 1e-12 {
                continue;
            }
        let free_mass: f64 = (0..d).filter(|i| mask & (1 << i) == 0).map(|i| q[i]).sum();
        let remaining = 1.0 - clamped as f64 * floor;
        let v: Vec<f64> = (0..d)
            .map(|i| if mask & (1 << i) != 0 { floor } else if free_mass > 0.0 { q[i] * remaining / free_mass } else { floor })
            .collect();
        if v.iter().any(|&x| x < floor - 1e-15) || (v.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            continue;
        }
        let kl: f64 = v.iter().zip(&q).map(|(a, b)| a * (a / b).ln()).sum();
        if best.as_ref().is_none_or(|(k, _)| kl < *k) {
            best = Some((kl, v));
        }
    }
    best.expect("uniform floor point is always feasible").1
}

/// Solver vs brute force on `n` random instances with `d` in 2..=5.
pub fn simplex_oracle(seed: u64, n: usize) -> CheckOutcome {
    let mut s = Sampler::new(seed);
    let (mut worst_err, mut worst_feas) = (0.0f64, 0.0f64);
    let mut order_ok = true;
    for _ in 0..n {
        let d = s.range(2, 5) as usize;
        let alpha = s.uniform(0.01, 1.0);
        let w: Vec<f64> = (0..d).map(|_| (s.uniform(-6.0, 3.0)).exp()).collect();
        let got = match clipped_simplex_solve(&w, alpha) {
            Ok(v) => v,
            Err(e) => return CheckOutcome::new("clipped-simplex-oracle", false, e.to_string()),
        };
        let want = brute_clipped_simplex(&w, alpha);
        for (g, b) in got.iter().zip(&want) {
            worst_err = worst_err.max((g - b).abs());
        }
        let floor = alpha / d as f64;
        worst_feas = worst_feas.max((got.iter().sum::<f64>() - 1.0).abs());
        worst_feas = got.iter().fold(worst_feas, |m, &v| m.max(floor - v));
        for i in 0..d {
            for j in 0..d {
                if w[i] > w[j] && got[i] < got[j] {
                    order_ok = false;
                }
            }
        }
    }
    let passed = worst_err <= 1e-8 && worst_feas <= 1e-12 && order_ok;
    CheckOutcome::new(
        "clipped-simplex-oracle",
        passed,
        format!("{n} instances: sup error {worst_err:e}, feasibility slack {worst_feas:e}, order preserved {order_ok}"),
    )
}

/// Random scalar quadratic payoff mixing both saddle shapes.
pub fn random_quadratic(s: &mut Sampler, b: &BoxSet) -> Result<SharedPayoff> {
    let (lo, hi) = b.bounds_1d();
    let w = s.unit();
    let members: Vec<SharedPayoff> = vec![
        Arc::new(QuadraticSaddle::new(s.uniform(lo, hi), s.uniform(lo, hi))),
        Arc::new(SeparableSaddle::new(s.uniform(lo, hi), s.uniform(lo, hi))),
    ];
    Ok(Arc::new(combine(&[w, 1.0 - w], members)?))
}

/// Saddle of the prox objective by exhaustive search over a `step` grid:
/// `x` minimizes the grid max over `y`, then `y` maximizes at that `x`.
pub fn grid_joint_prox(p: &ProxProblem<'_>, step: f64) -> (f64, f64) {
    let (xl, xh) = p.box_x.bounds_1d();
    let (yl, yh) = p.box_y.bounds_1d();
    let nx = ((xh - xl) / step).round() as usize;
    let ny = ((yh - yl) / step).round() as usize;
    let (xa, ya) = (p.x_anchor[0], p.y_anchor[0]);
    let form = p.payoff.quadratic_form();
    let value = |x: f64, y: f64| match &form {
        Some(q) => q.value(x, y),
        None => p.payoff.value(&[x], &[y]),
    };
    let obj = |x: f64, y: f64| value(x, y) + (x - xa).powi(2) / (2.0 * p.eta) - (y - ya).powi(2) / (2.0 * p.gamma);
    let grid = |lo: f64, hi: f64, n: usize, i: usize| if i == n { hi } else { lo + i as f64 * step };
    let inner = |x: f64| {
        (0..=ny).map(|j| grid(yl, yh, ny, j)).fold((f64::NEG_INFINITY, yl), |(m, arg), y| {
            let v = obj(x, y);
            if v > m { (v, y) } else { (m, arg) }
        })
    };
    let (mut best, mut bx, mut by) = (f64::INFINITY, xl, yl);
    for i in 0..=nx {
        let x = grid(xl, xh, nx, i);
        let (m, y) = inner(x);
        if m < best {
            (best, bx, by) = (m, x, y);
        }
    }
    (bx, by)
}

/// Closed-form joint prox vs grid brute force and vs the iterative solver.
pub fn joint_prox_oracle(seed: u64, n: usize) -> CheckOutcome {
    let b = BoxSet::interval(-1.0, 1.0).expect("fixed bounds");
    let mut s = Sampler::new(seed);
    let (mut worst_grid, mut worst_iter) = (0.0f64, 0.0f64);
    let mut closed_form = true;
    for _ in 0..n {
        let f = match random_quadratic(&mut s, &b) {
            Ok(f) => f,
            Err(e) => return CheckOutcome::new("joint-prox-oracle", false, e.to_string()),
        };
        let eta = s.uniform(-2.0, 0.7).exp();
        let gamma = s.uniform(-2.0, 0.7).exp();
        let xa = [s.uniform(-1.0, 1.0)];
        let ya = [s.uniform(-1.0, 1.0)];
        let p = ProxProblem { payoff: f.as_ref(), eta, gamma, x_anchor: &xa, y_anchor: &ya, box_x: &b, box_y: &b };
        let run = || -> Result<_> {
            Ok((
                solve_joint_prox(&p, DEFAULT_TOL, DEFAULT_MAX_ITER)?,
                solve_joint_prox_iterative(&p, 1e-12, DEFAULT_MAX_ITER)?,
            ))
        };
        let (cf, it) = match run() {
            Ok(r) => r,
            Err(e) => return CheckOutcome::new("joint-prox-oracle", false, e.to_string()),
        };
        closed_form &= cf.method == SolveMethod::ClosedForm;
        let (gx, gy) = grid_joint_prox(&p, 1e-3);
        worst_grid = worst_grid.max((cf.x[0] - gx).abs()).max((cf.y[0] - gy).abs());
        worst_iter = worst_iter.max((cf.x[0] - it.x[0]).abs()).max((cf.y[0] - it.y[0]).abs());
    }
    let passed = worst_grid <= 2e-3 && worst_iter <= 1e-7 && closed_form;
    CheckOutcome::new(
        "joint-prox-oracle",
        passed,
        format!("{n} instances: grid error {worst_grid:e}, iterative disagreement {worst_iter:e}, closed form used {closed_form}"),
    )
}

/// Everything `verify` runs.
pub fn run_verify(seed: u64, rounds: u64, threads: usize) -> Vec<CheckOutcome> {
    let seeds: Vec<u64> = (0..10).map(|k| seed.wrapping_add(k)).collect();
    vec![
        invariant_suite(&seeds, rounds, threads),
        simplex_oracle(seed, 1000),
        joint_prox_oracle(seed, 100),
    ]
}

pub fn into_result(outcomes: &[CheckOutcome]) -> Result<()> {
    match outcomes.iter().find(|c| !c.passed) {
        None => Ok(()),
        Some(c) => Err(Error::InvariantBreach { invariant: c.name.clone(), round: 0, detail: c.detail.clone() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_clipped_simplex(&[1.0, 1.0], 0.5), vec![0.5, 0.5]);
        let v = brute_clipped_simplex(&[1.0, 9.0], 0.5);
        assert!((v[0] - 0.25).abs() < 1e-15 && (v[1] - 0.75).abs() < 1e-15);
        let v = brute_clipped_simplex(&[1.0, 3.0], 0.1);
        assert!((v[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn small_oracles_pass() {
        assert!(simplex_oracle(1, 50).passed);
        let c = joint_prox_oracle(1, 3);
        assert!(c.passed, "{}", c.detail);
    }

    #[test]
    fn randomized_configs_cover_everything() {
        let cfgs = randomized_configs(3, 10);
        assert_eq!(cfgs.len(), 21);
        assert!(cfgs.iter().all(|c| c.validate().is_ok()));
    }
}
