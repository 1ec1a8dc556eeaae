//! Uniformity of resolvent lower bounds over the spectral parameter.

use super::config::ExperimentConfig;
use super::report::{Check, Comparison, ExperimentReport, Statistic, Table};
use crate::dyadic_decomp::{build_pv_psi, BumpKit};
use crate::error::Result;
use crate::exponent_region::{vertex, Vertex};
use crate::field::{Axis, Grid};
use crate::normest::{circle_points, uniform_sweep, NormProbe, SweepReport};
use crate::quadform::QuadraticForm;

pub const LEBESGUE_THRESHOLD: f64 = 5.0;
pub const LORENTZ_THRESHOLD: f64 = 8.0;

fn push(t: &mut Table, series: &str, report: &SweepReport) {
    for (z, bound) in &report.entries {
        t.push(series, vec![], vec![z.a, z.b, *bound]);
    }
}

/// Lower bounds of `||(Q(D) + z)^{-1}||` at the configured pair (default `F`) and, in
/// restricted weak type, at `B`, over `z` on the unit circle.
pub fn sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let form = QuadraticForm::new(cfg.dim, cfg.k)?;
    let n = cfg.grid.unwrap_or(if cfg.dim == 3 { 32 } else { 16 });
    let length = cfg.box_len.unwrap_or(16.0);
    let grid = Grid::new(vec![Axis::new(n, length); cfg.dim])?;
    let zs = match &cfg.z_sweep {
        Some(s) => s.points(),
        None => circle_points(16),
    };
    let psi = build_pv_psi(BumpKit::shared());
    let pair = cfg.pair_or(Vertex::F)?;
    let lebesgue_threshold = cfg.tol("sweep", LEBESGUE_THRESHOLD);
    let lorentz_threshold = cfg.tol("sweep_lorentz", LORENTZ_THRESHOLD);
    let probe = NormProbe::for_pair(pair).with_seed(cfg.seed);
    let lebesgue = uniform_sweep(&grid, &form, &zs, &probe, &psi, lebesgue_threshold)?;
    let b = vertex(cfg.dim, Vertex::B)?;
    let probe_b = NormProbe::for_pair(b).lorentz().with_seed(cfg.seed);
    let lorentz = uniform_sweep(&grid, &form, &zs, &probe_b, &psi, lorentz_threshold)?;

    let mut t = Table::new(&[], &["re_z", "im_z", "lower_bound"]);
    push(&mut t, "lebesgue", &lebesgue);
    push(&mut t, "lorentz_B", &lorentz);
    let checks = vec![
        Check::new(
            "uniform_lebesgue",
            "lebesgue",
            Statistic::MaxOverMin("lower_bound".into()),
            Comparison::Below(lebesgue_threshold),
            "C independent of z, |z| >= 1 (threshold is an engineering choice)",
        ),
        Check::new(
            "uniform_lorentz",
            "lorentz_B",
            Statistic::MaxOverMin("lower_bound".into()),
            Comparison::Below(lorentz_threshold),
            "restricted weak type at B, C independent of z (threshold is an engineering choice)",
        ),
        Check::new(
            "finite_lorentz",
            "lorentz_B",
            Statistic::NonFinite("lower_bound".into()),
            Comparison::Below(0.5),
            "restricted weak type bound at B is finite",
        ),
    ];
    let mut report = ExperimentReport::new("sweep", cfg.echo(), t, checks);
    report.notes.push(format!("pair {}, {} points on the grid", format_pair(pair), grid.len()));
    Ok(report)
}

fn format_pair(p: crate::exponent_region::ExponentPair) -> String {
    format!("(1/p, 1/q) = ({}, {})", p.ip, p.iq)
}
