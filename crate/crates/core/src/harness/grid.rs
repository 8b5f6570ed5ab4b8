use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::config::{AlgorithmKind, ExperimentConfig};
use super::csv::write_csv;
use super::runner::{run_experiment, RunOutput, RunSummary, Trace};
use super::svg::{write_svg, PlotMetric};
use crate::environments::{EnvironmentKind, EnvironmentSpec};
use crate::error::Result;

pub const GRID_CASES: [EnvironmentKind; 4] =
    [EnvironmentKind::Case1, EnvironmentKind::Case2, EnvironmentKind::Case3, EnvironmentKind::Case4];

pub const THREADS_VAR: &str = "OSP_PROX_THREADS";

/// Worker count: `OSP_PROX_THREADS` if set (`0` means serial), else the
/// machine's parallelism.
pub fn thread_count() -> usize {
    match std::env::var(THREADS_VAR).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(n) => n.max(1),
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    }
}

/// Runs independent experiments on up to `threads` workers; results keep input order.
pub fn run_many(cfgs: &[ExperimentConfig], threads: usize) -> Vec<Result<RunOutput>> {
    let threads = threads.clamp(1, cfgs.len().max(1));
    if threads == 1 {
        return cfgs.iter().map(run_experiment).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<RunOutput>>>> = cfgs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cfgs.len() {
                    break;
                }
                let out = run_experiment(&cfgs[i]);
                *slots[i].lock().expect("slot lock") = Some(out);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("every slot filled")).collect()
}

/// The four nonstationary cases crossed with the three algorithms.
pub fn grid_configs(rounds: u64, seed: u64) -> Vec<ExperimentConfig> {
    let base = ExperimentConfig::new(EnvironmentSpec::new(EnvironmentKind::Case1), AlgorithmKind::Oppm);
    grid_configs_from(&base, rounds, seed)
}

/// Same grid, sharing `base`'s rates and budgets. Environment, algorithm,
/// name, lags and output paths are replaced per cell.
pub fn grid_configs_from(base: &ExperimentConfig, rounds: u64, seed: u64) -> Vec<ExperimentConfig> {
    GRID_CASES
        .iter()
        .flat_map(|&kind| {
            AlgorithmKind::ALL.iter().map(move |&alg| ExperimentConfig {
                name: None,
                environment: EnvironmentSpec::new(kind),
                algorithm: alg,
                lags: None,
                hedge_t_guess: None,
                initial_pair: None,
                csv_path: None,
                svg_path: None,
                ..base.clone()
            }
            .with_horizon(rounds)
            .with_seed(seed))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct GridReport {
    pub summaries: Vec<RunSummary>,
    pub files: Vec<PathBuf>,
}

impl GridReport {
    pub fn total_violations(&self) -> u64 {
        self.summaries.iter().map(RunSummary::total_violations).sum()
    }
}

/// Writes `<label>.csv` and a D-Gap panel `<label>.svg` for a single run,
/// unless the config names its own output paths.
pub fn write_run_outputs(cfg: &ExperimentConfig, out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let label = cfg.label();
    let csv = cfg.csv_path.clone().unwrap_or_else(|| dir.join(format!("{label}.csv")));
    let svg = cfg.svg_path.clone().unwrap_or_else(|| dir.join(format!("{label}.svg")));
    write_csv(&out.trace.records, &csv)?;
    write_svg(std::slice::from_ref(&out.trace), PlotMetric::DgapAvg, &label, &svg)?;
    Ok(vec![csv, svg])
}

/// Runs the grid, writing one CSV per run and a D-Gap and NE-Reg panel per case.
pub fn run_grid(rounds: u64, seed: u64, out_dir: &Path, threads: usize) -> Result<GridReport> {
    run_grid_configs(&grid_configs(rounds, seed), out_dir, threads)
}

pub fn run_grid_configs(cfgs: &[ExperimentConfig], out_dir: &Path, threads: usize) -> Result<GridReport> {
    std::fs::create_dir_all(out_dir)?;
    for c in cfgs {
        c.validate()?;
    }
    let outputs = run_many(cfgs, threads).into_iter().collect::<Result<Vec<_>>>()?;
    let mut files = Vec::new();
    for (cfg, out) in cfgs.iter().zip(&outputs) {
        let p = out_dir.join(format!("{}.csv", cfg.label()));
        write_csv(&out.trace.records, &p)?;
        files.push(p);
    }
    let mut kinds: Vec<EnvironmentKind> = Vec::new();
    for c in cfgs {
        if !kinds.contains(&c.environment.kind) {
            kinds.push(c.environment.kind);
        }
    }
    for kind in kinds {
        let traces: Vec<Trace> = cfgs
            .iter()
            .zip(&outputs)
            .filter(|(c, _)| c.environment.kind == kind)
            .map(|(c, o)| Trace { label: c.algorithm.to_string(), records: o.trace.records.clone() })
            .collect();
        for metric in [PlotMetric::DgapAvg, PlotMetric::NeregAvg] {
            let short = if metric == PlotMetric::DgapAvg { "dgap" } else { "nereg" };
            let p = out_dir.join(format!("{kind}_{short}.svg"));
            write_svg(&traces, metric, kind.as_str(), &p)?;
            files.push(p);
        }
    }
    Ok(GridReport { summaries: outputs.into_iter().map(|o| o.summary).collect(), files })
}
