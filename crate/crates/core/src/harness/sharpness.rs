//! Regressions over the counterexample families: Knapp caps and `g_lambda` against the
//! predicted quotient slopes, and partial-mass growth for the stationary bump and the cone
//! kernel.

use super::config::{ExperimentConfig, Profile};
use super::report::{Check, Comparison, ExperimentReport, Statistic, Table};
use crate::error::Result;
use crate::exponent_region::{predicted_slopes, to_f64, vertex, ExponentPair, Vertex};
use crate::extremizers::{box_lq, dyadic_lambdas, physical_lp, sample_box, shell_masses, ConeKernel, GLambda, Knapp, Stationary};
use crate::quadform::QuadraticForm;
use crate::quadrature::OscillatoryCubature;
use crate::regression::geometric;

fn lambdas(cfg: &ExperimentConfig, lo: i32, hi: i32) -> Vec<f64> {
    match &cfg.lambdas {
        Some(s) => s.values(),
        None => match cfg.profile {
            Profile::Quick => dyadic_lambdas(lo, lo + 4),
            Profile::Full => dyadic_lambdas(lo, hi),
        },
    }
}

/// The fixed pair of a family plus `F` (or the configured pair).
fn pairs(cfg: &ExperimentConfig, fixed: (&'static str, ExponentPair)) -> Result<Vec<(String, ExponentPair)>> {
    let second = match &cfg.pair {
        Some(p) => (p.clone(), cfg.pair_or(Vertex::F)?),
        None => ("F".to_string(), vertex(cfg.dim, Vertex::F)?),
    };
    Ok(vec![(fixed.0.to_string(), fixed.1), second])
}

fn slope_checks(
    cfg: &ExperimentConfig,
    pairs: &[(String, ExponentPair)],
    predicted: impl Fn(ExponentPair) -> f64,
    tol: f64,
    anchor: &str,
) -> Vec<Check> {
    pairs
        .iter()
        .map(|(label, pair)| {
            Check::new(
                &format!("slope_{label}"),
                label,
                Statistic::LogLogSlope { x: "lambda".into(), y: "ratio".into() },
                Comparison::Within { target: predicted(*pair), tol: cfg.tol("slope", tol) },
                anchor,
            )
        })
        .collect()
}

/// `||E f_lambda||_{L^q(dual box)} / ||f_lambda||_p` for Knapp caps on `{Q = 1}`.
pub fn knapp(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let form = QuadraticForm::new(cfg.dim, cfg.k)?;
    let d = cfg.dim;
    let pairs = pairs(cfg, ("L2_L2", ExponentPair::from_ints(1, 2, 1, 2)))?;
    let n = cfg.grid.unwrap_or(if d == 3 { 32 } else { 16 });
    let per_axis = if d == 3 { 6 } else { 4 };
    let cub = OscillatoryCubature::default();
    let mut t = Table::new(&[], &["lambda", "norm_p", "norm_q", "ratio"]);
    for lam in lambdas(cfg, 2, 6) {
        let family = Knapp::new(form, lam)?;
        let field = family.field(n)?;
        let samples = sample_box(&family.dual_box(), per_axis, |x| family.extension_at(x, &cub))?;
        for (label, pair) in &pairs {
            let np = physical_lp(&field, pair.p())?;
            let nq = box_lq(&samples, pair.q());
            t.push(label, vec![], vec![lam, np, nq, nq / np]);
        }
    }
    let checks = slope_checks(
        cfg,
        &pairs,
        |p| to_f64(predicted_slopes(d, p).knapp),
        0.1,
        "Knapp quotient lambda^{d-1} lambda^{-(d+1)/q} / lambda^{d+1-(d+1)/p}",
    );
    Ok(ExperimentReport::new("knapp", cfg.echo(), t, checks))
}

/// `||E g_lambda||_{L^q(R'_lambda)} / ||g_lambda||_p`.
pub fn glambda(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let form = QuadraticForm::new(cfg.dim, cfg.k)?;
    let d = cfg.dim;
    let pairs = pairs(cfg, ("L1_L4", ExponentPair::from_ints(1, 1, 1, 4)))?;
    let n = cfg.grid.unwrap_or(if d == 3 { 32 } else { 16 });
    let per_axis = if d == 3 { 6 } else { 4 };
    let cub = OscillatoryCubature::default();
    let mut t = Table::new(&[], &["lambda", "norm_p", "norm_q", "ratio"]);
    for lam in lambdas(cfg, 2, 6) {
        let family = GLambda::new(form, lam)?;
        let field = family.field(n)?;
        let samples = sample_box(&family.r_prime(), per_axis, |x| family.extension_at(x, &cub))?;
        for (label, pair) in &pairs {
            let np = physical_lp(&field, pair.p())?;
            let nq = box_lq(&samples, pair.q());
            t.push(label, vec![], vec![lam, np, nq, nq / np]);
        }
    }
    let checks = slope_checks(
        cfg,
        &pairs,
        |p| to_f64(predicted_slopes(d, p).glambda),
        0.1,
        "|E g_lambda| >~ lambda^2 |R_lambda| on R'_lambda",
    );
    Ok(ExperimentReport::new("glambda", cfg.echo(), t, checks))
}

/// Shell masses `int_{T <= x_d <= 2T} |E f|^q` for the stationary bump; growth exponent
/// `d - (d-1) q / 2`.
pub fn stationary(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let form = QuadraticForm::new(cfg.dim, cfg.k)?;
    let d = cfg.dim as f64;
    let mut family = Stationary::new(form);
    family.radius = 0.25;
    let (n, length) = match cfg.profile {
        Profile::Quick => (2048, 2048.0),
        Profile::Full => (4096, 4096.0),
    };
    let count = cfg.profile.sequence_len();
    let shells = geometric(32.0, 32.0 * 2f64.powi(count as i32 - 1), count);
    let (chart, density) = family.chart_density(n, length)?;
    let (_, center) = family.chart()?;
    let qs = [2.5, 4.0];
    let masses = shell_masses(&density, &chart, &center, &shells, &qs, 8)?;
    let mut t = Table::new(&["q"], &["T", "mass"]);
    for (j, &q) in qs.iter().enumerate() {
        for (s, m) in shells.iter().zip(&masses) {
            t.push(&format!("q{q}"), vec![q.to_string()], vec![*s, m[j]]);
        }
    }
    let checks = vec![
        Check::new(
            "growth_q2.5",
            "q2.5",
            Statistic::LogLogSlope { x: "T".into(), y: "mass".into() },
            Comparison::Within { target: d - (d - 1.0) * 1.25, tol: cfg.tol("stationary", 0.15) },
            "|E f| >~ |x_d|^{(1-d)/2} on a cone of normals",
        ),
        Check::new(
            "growth_q4",
            "q4",
            Statistic::LogLogSlope { x: "T".into(), y: "mass".into() },
            Comparison::Below(0.0),
            "partial mass converges for q > 2d/(d-1)",
        ),
    ];
    Ok(ExperimentReport::new("stationary", cfg.echo(), t, checks))
}

/// Shell masses of `|K|^q` over `U_lambda`; growth exponent `d - 1 - q (d-2)/2`.
pub fn cone(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let form = QuadraticForm::new(cfg.dim, cfg.k)?;
    let d = cfg.dim as f64;
    let kernel = ConeKernel::new(form, 8.0)?;
    let count = cfg.profile.sequence_len();
    let start = 2.0 * kernel.u_floor();
    let shells = geometric(start, start * 2f64.powi(count as i32 - 1), count);
    let qs = [4.0, 5.0];
    let nodes = cfg.grid.unwrap_or(256);
    let masses = kernel.shell_masses(&shells, &qs, nodes);
    let mut t = Table::new(&["q"], &["T", "mass"]);
    for (j, &q) in qs.iter().enumerate() {
        for (s, m) in shells.iter().zip(&masses) {
            t.push(&format!("q{q}"), vec![q.to_string()], vec![*s, m[j]]);
        }
    }
    let exponent = |q: f64| d - 1.0 - q * (d - 2.0) / 2.0;
    let checks = vec![
        Check::new(
            "growth_q4",
            "q4",
            Statistic::LogLogSlope { x: "T".into(), y: "mass".into() },
            Comparison::Within { target: exponent(4.0), tol: cfg.tol("cone_endpoint", 0.1) },
            "|K(x)| >~ B |x_d|^{-(d-2)/2} on U_lambda",
        ),
        Check::new(
            "growth_q5",
            "q5",
            Statistic::LogLogSlope { x: "T".into(), y: "mass".into() },
            Comparison::Within { target: exponent(5.0), tol: cfg.tol("cone", 0.15) },
            "|K(x)| >~ B |x_d|^{-(d-2)/2} on U_lambda",
        ),
    ];
    Ok(ExperimentReport::new("cone", cfg.echo(), t, checks))
}
