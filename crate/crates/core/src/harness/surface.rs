//! Chart against mollified restriction–extension.

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::report::{Check, Comparison, ExperimentReport, Statistic, Table};
use crate::dyadic_decomp::base_bump;
use crate::error::Result;
use crate::quadform::{GraphChart, QuadraticForm};
use crate::quadrature::OscillatoryCubature;
use crate::surface_ops::MollifiedExtension;

const EPSILONS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

/// Sample points in graph coordinates: a tensor grid on `[-2, 2]^d`.
fn sample_points(d: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let total = per_axis.pow(d as u32);
    (0..total)
        .map(|idx| {
            let mut r = idx;
            (0..d)
                .map(|_| {
                    let v = -2.0 + 4.0 * (r % per_axis) as f64 / (per_axis - 1) as f64;
                    r /= per_axis;
                    v
                })
                .collect()
        })
        .collect()
}

/// `F(eta) = chi~(eta~) b(eta_d - 1/2)` extended from `{Q = 1}` by chart quadrature and by
/// the Poisson-mollified delta at shrinking `eps`; relative `L^2` difference over samples.
pub fn restrict_extend(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let form = QuadraticForm::new(cfg.dim, cfg.k)?;
    let d = cfg.dim;
    let chart = GraphChart::new(form, 1.0)?;
    let density = |eta: &[f64]| chart.cutoff_at(&eta[..d - 1]) * base_bump(eta[d - 1] - 0.5);
    let mut support = chart.cutoff.support_box(d - 1);
    support.push((-0.5, 1.5));
    let xs = sample_points(d, if d == 3 { 4 } else { 3 });

    let cub = OscillatoryCubature::default().with_tolerance(1e-10);
    let domain = chart.cutoff.support_box(d - 1);
    let exact: Vec<Complex64> = xs
        .par_iter()
        .map(|x| {
            let xd = x[d - 1];
            let phase = |et: &[f64]| x.iter().zip(et).map(|(a, b)| a * b).sum::<f64>() + xd * chart.height(et);
            let amp = |et: &[f64]| {
                let eta = chart.eta_point(et);
                Complex64::new(density(&eta) * chart.density(et), 0.0)
            };
            Ok(cub.integrate(&domain, phase, amp)?.value)
        })
        .collect::<Result<_>>()?;
    let exact_norm: f64 = exact.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();

    let nodes = if d == 3 { 96 } else { 32 };
    let mut t = Table::new(&[], &["epsilon", "relative_l2"]);
    for eps in EPSILONS {
        let m = MollifiedExtension {
            form,
            rho: 1.0,
            eps,
            density: &density,
            support: support.clone(),
            tangential_nodes: nodes,
        };
        let vals = m.eval_many(&xs);
        let diff: f64 = vals.iter().zip(&exact).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        t.push("mollified", vec![], vec![eps, diff / exact_norm]);
    }
    let checks = vec![
        Check::new(
            "relative_difference",
            "mollified",
            Statistic::Max("relative_l2".into()),
            Comparison::Below(cfg.tol("relative", 0.02)),
            "Poisson mollification of delta(Q - rho) tends to the surface measure",
        ),
        Check::new(
            "halving",
            "mollified",
            Statistic::StepRatios("relative_l2".into()),
            Comparison::Within { target: 2.0, tol: cfg.tol("halving", 0.4) },
            "difference halves with epsilon",
        ),
    ];
    Ok(ExperimentReport::new("restrict-extend", cfg.echo(), t, checks))
}
