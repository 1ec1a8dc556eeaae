//! Acceptance suite: each criterion runs its experiments at the default configuration
//! (d = 3, k = 1, quick profile) and must pass every check within its time budget.

use std::process::ExitCode;
use std::time::Instant;

use usol_core::harness::{experiment, run_experiment, ExperimentConfig};

struct Criterion {
    id: &'static str,
    title: &'static str,
    experiments: &'static [&'static str],
    budget_s: f64,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: "1", title: "dyadic delta identity", experiments: &["dyadic"], budget_s: 5.0 },
    Criterion { id: "2", title: "p.v. identity and Fourier support", experiments: &["pv"], budget_s: 5.0 },
    Criterion { id: "3", title: "A/B/C decomposition completeness", experiments: &["abc"], budget_s: 10.0 },
    Criterion { id: "4", title: "kernel support", experiments: &["kernel-support"], budget_s: 30.0 },
    Criterion { id: "5", title: "kernel decay slopes", experiments: &["kernel-decay"], budget_s: 300.0 },
    Criterion { id: "6", title: "oscillatory decay", experiments: &["oscillatory"], budget_s: 300.0 },
    Criterion { id: "7", title: "T lambda-scaling", experiments: &["t-scaling"], budget_s: 300.0 },
    Criterion { id: "8", title: "polar coordinates", experiments: &["polar"], budget_s: 60.0 },
    Criterion { id: "9", title: "chart vs mollified restriction-extension", experiments: &["restrict-extend"], budget_s: 120.0 },
    Criterion { id: "10", title: "Knapp regression", experiments: &["knapp"], budget_s: 300.0 },
    Criterion { id: "11", title: "g_lambda regression", experiments: &["glambda"], budget_s: 300.0 },
    Criterion { id: "12", title: "stationary and cone partial masses", experiments: &["stationary", "cone"], budget_s: 600.0 },
    Criterion { id: "13", title: "uniform sweep", experiments: &["sweep"], budget_s: 900.0 },
    Criterion { id: "14", title: "norm estimator sanity", experiments: &["normest"], budget_s: 30.0 },
    Criterion { id: "15", title: "region classifier", experiments: &["region"], budget_s: 1.0 },
];

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let cfg = ExperimentConfig::default();
    let mut failed = 0;
    let mut ran = 0;
    for c in CRITERIA {
        if !filter.is_empty() && !filter.iter().any(|f| f == c.id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let mut ok = true;
        let mut detail = Vec::new();
        for name in c.experiments {
            let exp = experiment(name).expect("registered experiment");
            match run_experiment(exp, &cfg) {
                Ok(report) => {
                    for (check, outcome) in report.checks.iter().zip(&report.outcomes) {
                        ok &= outcome.pass;
                        detail.push(format!(
                            "{}/{} observed {:.4e} expected {}",
                            name,
                            check.name,
                            outcome.observed,
                            check.comparison.describe()
                        ));
                    }
                }
                Err(e) => {
                    ok = false;
                    detail.push(format!("{name}: error {e}"));
                }
            }
        }
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs <= c.budget_s;
        let pass = ok && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {}: {:.2} s (budget {} s){}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            secs,
            c.budget_s,
            if in_time { "" } else { " over budget" }
        );
        for d in detail {
            println!("     {d}");
        }
    }
    println!("acceptance: {} of {} criteria passed", ran - failed, ran);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
