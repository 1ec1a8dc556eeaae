//! `usol`: runs the experiments and writes CSV reports.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use usol_core::harness::{self, ExperimentConfig, ExperimentReport};
use usol_core::Error;

const CSV_NOTE: &str = "\
Every CSV has a header row `series,<text columns>,<value columns>,check,fitted,predicted,tolerance,verdict`, \
one record per sample, and ends with one `# <check>: observed .. expected .. [anchor] pass|fail` line per check. \
Verdicts are recomputable from the records alone. With several experiments, --out and --svg name a directory \
holding `<experiment>.csv` / `<experiment>.svg`.";

#[derive(Parser)]
#[command(name = "usol", version, about = "Numerical experiments for uniform resolvent and Sobolev estimates on non-elliptic quadrics", after_help = CSV_NOTE)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the named points of the exponent diagram.
    #[command(after_help = "CSV columns: series, point, resolvent, resolvent_expected, sobolev, sobolev_expected, inv_p, inv_q.")]
    Region(Common),
    /// Dyadic decomposition of the delta function.
    #[command(after_help = "CSV columns: series, function, exact, dyadic_sum, error.")]
    DyadicCheck(Common),
    /// Principal value identity, Fourier support of psi, and the A/B/C decomposition.
    #[command(after_help = "pv: series, label, x, reference, value, error.\nabc: series, re_z, im_z, q, residual.")]
    PvCheck(Common),
    /// Localized kernels: support, decay and the lambda-scaling of T.
    #[command(after_help = "kernel-support: series, region, lambda, x_d, abs_k, peak, relative.\n\
kernel-decay: series, lambda, rho, sup_k.\nt-scaling: series, lambda, ratio.")]
    Kernel(Common),
    /// Decay of the oscillatory integral I(x) along the x_d axis.
    #[command(after_help = "CSV columns: series, x_d, rho, abs_i.")]
    Oscillatory(Common),
    /// Chart against Poisson-mollified restriction-extension.
    #[command(after_help = "CSV columns: series, epsilon, relative_l2.")]
    RestrictExtend(Common),
    /// Generalized polar coordinates against Cartesian integration.
    #[command(after_help = "CSV columns: series, function, exact, polar, plus, minus, cartesian, rel_error.")]
    PolarCheck(Common),
    /// Quotient slopes of the g_lambda family.
    #[command(after_help = "CSV columns: series, lambda, norm_p, norm_q, ratio.")]
    SharpnessGlambda(Common),
    /// Quotient slopes of Knapp caps.
    #[command(after_help = "CSV columns: series, lambda, norm_p, norm_q, ratio.")]
    SharpnessKnapp(Common),
    /// Partial-mass growth for the stationary-phase bump.
    #[command(after_help = "CSV columns: series, q, T, mass.")]
    SharpnessStationary(Common),
    /// Partial-mass growth for the cone kernel.
    #[command(after_help = "CSV columns: series, q, T, mass.")]
    SharpnessCone(Common),
    /// Resolvent lower bounds over a sweep of z.
    #[command(after_help = "CSV columns: series, re_z, im_z, lower_bound.")]
    Sweep(Common),
    /// Sanity checks of the norm estimator.
    #[command(after_help = "CSV columns: series, operator, exact, lower_bound, error.")]
    Normest(Common),
    /// Every experiment in a fixed order.
    All(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Ambient dimension d.
    #[arg(long)]
    dim: Option<usize>,
    /// Signature k of the quadratic form.
    #[arg(long = "signature-k")]
    signature_k: Option<usize>,
    /// Grid points per axis (a power of two).
    #[arg(long)]
    grid: Option<usize>,
    /// Box length L.
    #[arg(long = "box")]
    box_len: Option<f64>,
    /// Exponent pair: a vertex name or `ip,iq` (fractions allowed).
    #[arg(long)]
    pair: Option<String>,
    /// Geometric lambda sequence `a:b:count`.
    #[arg(long = "lambda-seq")]
    lambda_seq: Option<String>,
    /// Spectral parameters `circle:N` or `line:a0,b0:a1,b1:count`.
    #[arg(long = "z-sweep")]
    z_sweep: Option<String>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG output path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// `quick` or `full`.
    #[arg(long)]
    profile: Option<String>,
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Command::Region(c) => ("region", c),
            Command::DyadicCheck(c) => ("dyadic-check", c),
            Command::PvCheck(c) => ("pv-check", c),
            Command::Kernel(c) => ("kernel", c),
            Command::Oscillatory(c) => ("oscillatory", c),
            Command::RestrictExtend(c) => ("restrict-extend", c),
            Command::PolarCheck(c) => ("polar-check", c),
            Command::SharpnessGlambda(c) => ("sharpness-glambda", c),
            Command::SharpnessKnapp(c) => ("sharpness-knapp", c),
            Command::SharpnessStationary(c) => ("sharpness-stationary", c),
            Command::SharpnessCone(c) => ("sharpness-cone", c),
            Command::Sweep(c) => ("sweep", c),
            Command::Normest(c) => ("normest", c),
            Command::All(c) => ("all", c),
        }
    }
}

fn build_config(c: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    let mut set = |key: &str, value: Option<String>| -> Result<(), Error> {
        match value {
            Some(v) => cfg.set(key, &v),
            None => Ok(()),
        }
    };
    set("dim", c.dim.map(|v| v.to_string()))?;
    set("signature_k", c.signature_k.map(|v| v.to_string()))?;
    set("grid", c.grid.map(|v| v.to_string()))?;
    set("box", c.box_len.map(|v| v.to_string()))?;
    set("pair", c.pair.clone())?;
    set("lambda_seq", c.lambda_seq.clone())?;
    set("z_sweep", c.z_sweep.clone())?;
    set("out", c.out.as_ref().map(|p| p.display().to_string()))?;
    set("svg", c.svg.as_ref().map(|p| p.display().to_string()))?;
    set("seed", c.seed.map(|v| v.to_string()))?;
    set("profile", c.profile.clone())?;
    for t in &c.tol {
        let (name, value) = t
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("--tol expects NAME=VALUE, got `{t}`")))?;
        cfg.set(&format!("tol.{}", name.trim()), value.trim())?;
    }
    if let Some(p) = &cfg.pair {
        harness::config::parse_pair(p, cfg.dim)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Output file for one report: `path` itself for a single report, `path/<name>.<ext>` otherwise.
fn target(path: &Path, name: &str, ext: &str, several: bool) -> std::io::Result<PathBuf> {
    if several {
        fs::create_dir_all(path)?;
        Ok(path.join(format!("{name}.{ext}")))
    } else {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        Ok(path.to_path_buf())
    }
}

fn write_outputs(cfg: &ExperimentConfig, reports: &[ExperimentReport]) -> anyhow::Result<()> {
    let several = reports.len() > 1;
    for r in reports {
        match &cfg.out {
            Some(path) => r.write_csv(fs::File::create(target(path, &r.name, "csv", several)?)?)?,
            None => {
                let mut out = std::io::stdout().lock();
                r.write_csv(&mut out)?;
                out.flush()?;
            }
        }
        if let Some(path) = &cfg.svg {
            r.write_svg(fs::File::create(target(path, &r.name, "svg", several)?)?)?;
        }
    }
    Ok(())
}

/// Config errors exit with 2, numerical failures with 3.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) | Error::EllipticForm { .. } | Error::DimensionMismatch { .. } | Error::MemoryBudget { .. } => 2,
        Error::Io(_) | Error::Format(_) => 1,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (sub, common) = cli.command.parts();
    let cfg = match build_config(common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usol: configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    harness::init_pool(cfg.workers);
    let experiments = match harness::experiments_for(sub) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("usol: {e}");
            return ExitCode::from(2);
        }
    };
    let mut reports = Vec::new();
    for exp in experiments {
        match harness::run_experiment(exp, &cfg) {
            Ok(r) => {
                eprint!("{}", r.summary());
                eprintln!("  {} finished in {:.2} s", r.name, r.seconds);
                reports.push(r);
            }
            Err(e) => {
                eprintln!("usol: {} failed: {e}", exp.name);
                return ExitCode::from(exit_code(&e));
            }
        }
    }
    if let Err(e) = write_outputs(&cfg, &reports) {
        eprintln!("usol: writing output: {e}");
        return ExitCode::from(1);
    }
    if reports.iter().all(ExperimentReport::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
