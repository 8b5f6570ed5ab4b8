use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use osp_prox::environments::{EnvironmentKind, EnvironmentSpec};
use osp_prox::harness::{
    grid_configs_from, run_experiment, run_grid_configs, run_verify, thread_count, write_run_outputs, AlgorithmKind,
    ExperimentConfig, RunSummary,
};
use osp_prox::Error;

#[derive(Parser)]
#[command(name = "osp-prox", version, about = "Online saddle point benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for initial pairs and randomized instances
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Number of rounds per experiment
    #[arg(long, value_name = "N")]
    rounds: Option<u64>,
    /// JSON experiment config; flags override its values
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV trace and SVG panel
    Run {
        #[command(flatten)]
        common: Common,
        /// Environment, when no config file is given
        #[arg(long, value_name = "KIND")]
        env: Option<String>,
        /// Algorithm, when no config file is given
        #[arg(long, value_name = "NAME")]
        algorithm: Option<String>,
    },
    /// Run the 4 nonstationary cases x 3 algorithms and plot D-Gap / NE-Reg panels
    Grid {
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suite and the solver oracles
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<Option<ExperimentConfig>, Error> {
    common.config.as_deref().map(ExperimentConfig::from_file).transpose()
}

fn print_summary(s: &RunSummary) {
    println!(
        "{:<24} T={:<7} avg D-Gap {:<12.6e} avg NE-Reg {:<12} C_T {:<10.4} violations {}",
        s.label,
        s.rounds,
        s.last.dgap_avg,
        s.last.nereg_avg.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "n/a".into()),
        s.last.path,
        s.total_violations()
    );
}

fn breach_error(s: &RunSummary) -> Option<Error> {
    s.first_breach.as_ref().map(|b| Error::InvariantBreach {
        invariant: b.invariant.to_string(),
        round: b.round,
        detail: format!("{}: {}", s.label, b.detail),
    })
}

fn cmd_run(common: &Common, env: Option<&str>, algorithm: Option<&str>) -> Result<(), Error> {
    let mut cfg = match (load(common)?, env, algorithm) {
        (Some(cfg), None, None) => cfg,
        (None, Some(env), Some(alg)) => {
            ExperimentConfig::new(EnvironmentSpec::new(env.parse::<EnvironmentKind>()?), alg.parse::<AlgorithmKind>()?)
        }
        (Some(_), _, _) => return Err(Error::Config("--env/--algorithm cannot be combined with --config".into())),
        _ => return Err(Error::Config("run needs --config FILE or both --env and --algorithm".into())),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(rounds) = common.rounds {
        cfg.horizon = rounds;
    }
    cfg.validate()?;
    let out = run_experiment(&cfg)?;
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let files = write_run_outputs(&cfg, &out, &dir)?;
    print_summary(&out.summary);
    for f in files {
        println!("wrote {}", f.display());
    }
    breach_error(&out.summary).map_or(Ok(()), Err)
}

fn cmd_grid(common: &Common) -> Result<(), Error> {
    let file = load(common)?;
    let base = file.clone().unwrap_or_else(|| {
        ExperimentConfig::new(EnvironmentSpec::new(EnvironmentKind::Case1), AlgorithmKind::Oppm).with_seed(1)
    });
    let rounds = common.rounds.unwrap_or(base.horizon);
    let seed = common.seed.unwrap_or(base.seed);
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("fig1"));
    let report = run_grid_configs(&grid_configs_from(&base, rounds, seed), &dir, thread_count())?;
    for s in &report.summaries {
        print_summary(s);
    }
    println!("wrote {} files to {}", report.files.len(), dir.display());
    report.summaries.iter().find_map(breach_error).map_or(Ok(()), Err)
}

fn cmd_verify(common: &Common) -> Result<(), Error> {
    let file = load(common)?;
    let seed = common.seed.or(file.as_ref().map(|c| c.seed)).unwrap_or(1);
    let rounds = common.rounds.or(file.as_ref().map(|c| c.horizon)).unwrap_or(10_000);
    let outcomes = run_verify(seed, rounds, thread_count());
    for c in &outcomes {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if let Some(dir) = &common.out {
        write_report(dir, &outcomes)?;
    }
    osp_prox::harness::verify::into_result(&outcomes)
}

fn write_report(dir: &Path, outcomes: &[osp_prox::harness::CheckOutcome]) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    let text: String = outcomes
        .iter()
        .map(|c| format!("{}\t{}\t{}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
        .collect();
    std::fs::write(dir.join("verify.tsv"), text)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { common, env, algorithm } => cmd_run(common, env.as_deref(), algorithm.as_deref()),
        Command::Grid { common } => cmd_grid(common),
        Command::Verify { common } => cmd_verify(common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
