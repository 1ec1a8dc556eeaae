//! Experiments wired to configurations and reports.
//!
//! Each experiment produces a sample table and checks evaluated from that table alone.
//! Subcommands group experiments; `all` runs every one in a fixed order.

pub mod basic;
pub mod config;
pub mod kernel;
pub mod report;
pub mod sharpness;
pub mod surface;
pub mod sweep;

use std::time::Instant;

pub use config::{ExperimentConfig, LambdaSeq, Profile, ZSweep};
pub use report::{Check, Comparison, ExperimentReport, Outcome, Statistic, Table};

use crate::error::{Error, Result};

pub type Runner = fn(&ExperimentConfig) -> Result<ExperimentReport>;

/// An experiment with the subcommand that runs it.
pub struct Experiment {
    pub name: &'static str,
    pub subcommand: &'static str,
    pub run: Runner,
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment { name: "region", subcommand: "region", run: basic::region },
    Experiment { name: "dyadic", subcommand: "dyadic-check", run: basic::dyadic },
    Experiment { name: "pv", subcommand: "pv-check", run: basic::pv },
    Experiment { name: "abc", subcommand: "pv-check", run: basic::abc },
    Experiment { name: "kernel-support", subcommand: "kernel", run: kernel::kernel_support },
    Experiment { name: "kernel-decay", subcommand: "kernel", run: kernel::kernel_decay },
    Experiment { name: "t-scaling", subcommand: "kernel", run: kernel::t_scaling },
    Experiment { name: "oscillatory", subcommand: "oscillatory", run: kernel::oscillatory },
    Experiment { name: "restrict-extend", subcommand: "restrict-extend", run: surface::restrict_extend },
    Experiment { name: "polar", subcommand: "polar-check", run: basic::polar },
    Experiment { name: "glambda", subcommand: "sharpness-glambda", run: sharpness::glambda },
    Experiment { name: "knapp", subcommand: "sharpness-knapp", run: sharpness::knapp },
    Experiment { name: "stationary", subcommand: "sharpness-stationary", run: sharpness::stationary },
    Experiment { name: "cone", subcommand: "sharpness-cone", run: sharpness::cone },
    Experiment { name: "sweep", subcommand: "sweep", run: sweep::sweep },
    Experiment { name: "normest", subcommand: "normest", run: basic::normest },
];

pub const SUBCOMMANDS: &[&str] = &[
    "region",
    "dyadic-check",
    "pv-check",
    "kernel",
    "oscillatory",
    "restrict-extend",
    "polar-check",
    "sharpness-glambda",
    "sharpness-knapp",
    "sharpness-stationary",
    "sharpness-cone",
    "sweep",
    "normest",
    "all",
];

pub fn experiment(name: &str) -> Result<&'static Experiment> {
    EXPERIMENTS
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment {name}")))
}

/// Experiments run by a subcommand, in registry order.
pub fn experiments_for(subcommand: &str) -> Result<Vec<&'static Experiment>> {
    if !SUBCOMMANDS.contains(&subcommand) {
        return Err(Error::InvalidParameter(format!("unknown subcommand {subcommand}")));
    }
    Ok(EXPERIMENTS
        .iter()
        .filter(|e| subcommand == "all" || e.subcommand == subcommand)
        .collect())
}

/// Validates the configuration and runs one experiment, recording its wall time.
pub fn run_experiment(exp: &Experiment, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut report = (exp.run)(cfg)?;
    report.seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Runs every experiment of a subcommand; reports come back in registry order.
pub fn run(subcommand: &str, cfg: &ExperimentConfig) -> Result<Vec<ExperimentReport>> {
    cfg.validate()?;
    experiments_for(subcommand)?
        .into_iter()
        .map(|e| run_experiment(e, cfg))
        .collect()
}

/// Worker count from `USOL_WORKERS`, if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var("USOL_WORKERS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Sizes the global rayon pool; only the first call in a process takes effect.
pub fn init_pool(workers: Option<usize>) {
    if let Some(n) = workers.or_else(workers_from_env) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
