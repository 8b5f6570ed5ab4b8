//! Browser bindings: run a short experiment, project onto the clipped
//! simplex, and take one joint proximal step.
//!
//! Every export has a plain-Rust twin returning `Result<_, String>` so the
//! logic is testable off the browser.

use serde_json::json;
use wasm_bindgen::prelude::*;

use osp_prox::algorithms::clipped_simplex_solve;
use osp_prox::environments::{EnvironmentKind, EnvironmentSpec};
use osp_prox::geometry::BoxSet;
use osp_prox::harness::{run_experiment, AlgorithmKind, ExperimentConfig};
use osp_prox::inner_solvers::{solve_joint_prox, ProxProblem, DEFAULT_MAX_ITER, DEFAULT_TOL};
use osp_prox::payoffs::QuadraticSaddle;

/// Longest run the page may request; keeps the tab responsive.
pub const MAX_ROUNDS: u32 = 200_000;

pub fn simulate_json(env: &str, algorithm: &str, rounds: u32, seed: u32) -> Result<String, String> {
    if rounds == 0 || rounds > MAX_ROUNDS {
        return Err(format!("rounds must be in 1..={MAX_ROUNDS}"));
    }
    let kind: EnvironmentKind = env.parse().map_err(|e: osp_prox::Error| e.to_string())?;
    if kind == EnvironmentKind::Custom {
        return Err("the custom stream needs a saddle list; use the CLI".into());
    }
    let alg: AlgorithmKind = algorithm.parse().map_err(|e: osp_prox::Error| e.to_string())?;
    let mut cfg = ExperimentConfig::new(EnvironmentSpec::new(kind), alg)
        .with_horizon(rounds as u64)
        .with_seed(seed as u64);
    // roughly 200 points regardless of horizon
    cfg.record_stride = Some((rounds as u64 / 200).max(1));
    let out = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let t: Vec<u64> = out.trace.records.iter().map(|r| r.t).collect();
    let dgap: Vec<f64> = out.trace.records.iter().map(|r| r.dgap_avg).collect();
    let nereg: Vec<Option<f64>> = out.trace.records.iter().map(|r| r.nereg_avg).collect();
    let x: Vec<f64> = out.trace.records.iter().map(|r| r.x[0]).collect();
    let y: Vec<f64> = out.trace.records.iter().map(|r| r.y[0]).collect();
    Ok(json!({
        "label": out.summary.label,
        "t": t,
        "dgap_avg": dgap,
        "nereg_avg": nereg,
        "x": x,
        "y": y,
        "summary": out.summary,
    })
    .to_string())
}

pub fn clipped_simplex_vec(weights: &[f64], alpha: f64) -> Result<Vec<f64>, String> {
    clipped_simplex_solve(weights, alpha).map_err(|e| e.to_string())
}

/// Joint prox step on the saddle payoff centered at `(a, b)` over `[-4, 4]^2`.
pub fn joint_prox_vec(a: f64, b: f64, eta: f64, gamma: f64, x_anchor: f64, y_anchor: f64) -> Result<Vec<f64>, String> {
    let bx = BoxSet::interval(-4.0, 4.0).map_err(|e| e.to_string())?;
    let (xa, ya) = (bx.project(&[x_anchor]).map_err(|e| e.to_string())?, bx.project(&[y_anchor]).map_err(|e| e.to_string())?);
    let f = QuadraticSaddle::new(a, b);
    let p = ProxProblem { payoff: &f, eta, gamma, x_anchor: &xa, y_anchor: &ya, box_x: &bx, box_y: &bx };
    let r = solve_joint_prox(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(|e| e.to_string())?;
    Ok(vec![r.x[0], r.y[0], r.residual])
}

/// Runs one experiment and returns its sampled trace and summary as JSON.
#[wasm_bindgen]
pub fn simulate(env: &str, algorithm: &str, rounds: u32, seed: u32) -> Result<String, JsValue> {
    simulate_json(env, algorithm, rounds, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn clipped_simplex(weights: Vec<f64>, alpha: f64) -> Result<Vec<f64>, JsValue> {
    clipped_simplex_vec(&weights, alpha).map_err(|e| JsValue::from_str(&e))
}

/// Returns `[x, y, residual]`.
#[wasm_bindgen]
pub fn joint_prox(a: f64, b: f64, eta: f64, gamma: f64, x_anchor: f64, y_anchor: f64) -> Result<Vec<f64>, JsValue> {
    joint_prox_vec(a, b, eta, gamma, x_anchor, y_anchor).map_err(|e| JsValue::from_str(&e))
}
