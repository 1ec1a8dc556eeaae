//! The localized kernels `K^rho_lambda`, the oscillatory integral `I`, and the
//! `lambda`-scaling of `T^rho_lambda` from `L^2` to `L^{2(d+1)/(d-1)}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::basic::psi_hat_numeric;
use super::config::{ExperimentConfig, Profile};
use super::report::{Check, Comparison, ExperimentReport, Statistic, Table};
use crate::dyadic_decomp::{build_delta_psi, BumpKit};
use crate::error::{Error, Result};
use crate::extremizers::dyadic_lambdas;
use crate::field::{Axis, Grid, SampledField};
use crate::multipliers::{kernel_k, t_rho_lambda_apply, LocalizedMultiplier, MChoice};
use crate::quadform::{GraphChart, QuadraticForm};
use crate::quadrature::{self, OscillatoryCubature};
use crate::regression::geometric;
use crate::surface_ops::{graph_evolution, oscillatory_i, stationary_point};

const ETA0: [f64; 2] = [1.5, 0.0];

fn eta0(dim: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[0] = ETA0[0];
    e
}

fn lambdas(cfg: &ExperimentConfig, lo: i32, hi: i32) -> Vec<f64> {
    match &cfg.lambdas {
        Some(s) => s.values(),
        None => dyadic_lambdas(lo, hi),
    }
}

/// Kernel on the ray `x~ = -x_d grad G(eta0)`, by the separated route
/// `lambda psi_hat(-lambda x_d) I(x)` with `psi_hat` from quadrature of the tabulated `psi`.
pub fn kernel_support(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let form = QuadraticForm::new(cfg.dim, cfg.k)?;
    let psi = build_delta_psi(BumpKit::shared());
    let cub = OscillatoryCubature::default();
    let mut t = Table::new(&["region"], &["lambda", "x_d", "abs_k", "peak", "relative"]);
    let lams = match cfg.profile {
        Profile::Quick => vec![0.125, 0.03125],
        Profile::Full => dyadic_lambdas(3, 7),
    };
    for rho in [1.0, -1.0] {
        let chart = GraphChart::new(form, rho)?;
        let e0 = eta0(chart.dim());
        for &lam in &lams {
            let lm = LocalizedMultiplier::new(lam, MChoice::One, psi.clone(), chart.clone())?;
            let (lo, hi) = lm.support_slab();
            let xds: Vec<f64> = (1..=48).map(|i| 6.0 / lam * i as f64 / 48.0).collect();
            let vals: Vec<(f64, f64, bool)> = xds
                .par_iter()
                .map(|&xd| {
                    let x = stationary_point(&chart, &e0, xd);
                    let inside = xd >= lo && xd <= hi;
                    let v = lam * psi_hat_numeric(&psi, -lam * xd) * oscillatory_i(&x, &chart, &cub)?;
                    Ok((xd, v.norm(), inside))
                })
                .collect::<Result<_>>()?;
            let peak = vals.iter().map(|v| v.1).fold(0.0, f64::max);
            for (xd, v, inside) in vals {
                let series = if inside { "inside" } else { "outside" };
                t.push(series, vec![format!("rho={rho}")], vec![lam, xd, v, peak, v / peak]);
            }
        }
    }
    let checks = vec![
        Check::new(
            "vanishing_outside_slab",
            "outside",
            Statistic::Max("relative".into()),
            Comparison::Below(cfg.tol("support", 1e-12)),
            "K vanishes unless lambda^-1/2 <= |x_d| <= 2 lambda^-1 (m = 1)",
        ),
        Check::new(
            "peak_inside",
            "inside",
            Statistic::Max("relative".into()),
            Comparison::Within { target: 1.0, tol: 0.0 },
            "K vanishes unless lambda^-1/2 <= |x_d| <= 2 lambda^-1 (m = 1)",
        ),
    ];
    Ok(ExperimentReport::new("kernel-support", cfg.echo(), t, checks))
}

/// `sup |K|` over `lambda x_d` in a fixed set on the ray through the stationary point.
pub fn kernel_decay(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let form = QuadraticForm::new(cfg.dim, cfg.k)?;
    let psi = build_delta_psi(BumpKit::shared());
    let cub = OscillatoryCubature::default();
    let lams = lambdas(cfg, 3, 7);
    let d = cfg.dim as f64;
    let mut t = Table::new(&[], &["lambda", "rho", "sup_k"]);
    let cases = [
        ("rho=1", 1.0, (d + 1.0) / 2.0, "|K| <~ lambda^{(d+1)/2} for |rho| ~ 1"),
        ("rho=2^-12", 2f64.powi(-12), d / 2.0, "|K| <~ lambda^{d/2} when |rho| << lambda"),
    ];
    for (series, rho, _, _) in cases {
        let chart = GraphChart::new(form, rho)?;
        let e0 = eta0(chart.dim());
        for &lam in &lams {
            let lm = LocalizedMultiplier::new(lam, MChoice::One, psi.clone(), chart.clone())?;
            let sup = [0.75, 1.0, 1.25, 1.5]
                .par_iter()
                .map(|s| {
                    let x = stationary_point(&chart, &e0, s / lam);
                    Ok(kernel_k(&lm, &x, &cub)?.norm())
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            t.push(series, vec![], vec![lam, rho, sup]);
        }
    }
    let tol = cfg.tol("slope", 0.15);
    let checks = cases
        .iter()
        .map(|(series, _, slope, anchor)| {
            Check::new(
                &format!("slope_{series}"),
                series,
                Statistic::LogLogSlope { x: "lambda".into(), y: "sup_k".into() },
                Comparison::Within { target: *slope, tol },
                anchor,
            )
        })
        .collect();
    Ok(ExperimentReport::new("kernel-decay", cfg.echo(), t, checks))
}

/// `|I(x)|` on the stationary ray over `x_d in [10, 1000]`.
pub fn oscillatory(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let form = QuadraticForm::new(cfg.dim, cfg.k)?;
    let cub = OscillatoryCubature::default();
    let count = cfg.profile.sequence_len();
    let xds = geometric(10.0, 1000.0, count);
    let d = cfg.dim as f64;
    let cases = [
        ("rho=1", 1.0, -(d - 1.0) / 2.0, "|I(x)| <~ |x_d|^{-(d-1)/2} for |rho| ~ 1"),
        ("rho=1e-4", 1e-4, -(d - 2.0) / 2.0, "|I(x)| <~ |x_d|^{-(d-2)/2} while |rho x_d| << 1"),
    ];
    let mut t = Table::new(&[], &["x_d", "rho", "abs_i"]);
    for (series, rho, _, _) in cases {
        let chart = GraphChart::new(form, rho)?;
        let e0 = eta0(chart.dim());
        let vals = xds
            .par_iter()
            .map(|&xd| Ok(oscillatory_i(&stationary_point(&chart, &e0, xd), &chart, &cub)?.norm()))
            .collect::<Result<Vec<f64>>>()?;
        for (xd, v) in xds.iter().zip(vals) {
            t.push(series, vec![], vec![*xd, rho, v]);
        }
    }
    let tol = cfg.tol("slope", 0.1);
    let checks = cases
        .iter()
        .map(|(series, _, slope, anchor)| {
            Check::new(
                &format!("slope_{series}"),
                series,
                Statistic::LogLogSlope { x: "x_d".into(), y: "abs_i".into() },
                Comparison::Within { target: *slope, tol },
                anchor,
            )
        })
        .collect();
    Ok(ExperimentReport::new("oscillatory", cfg.echo(), t, checks))
}

/// `H(tau) = int psi(u) w(u) e^{2 pi i tau u} du` with `w = psi`, so `H = phi * phi` peaks at 0.
fn slab_h(psi: &crate::dyadic_decomp::PsiFunction, tau: f64) -> Complex64 {
    let panels = (16.0 * (1.0 + tau.abs())).ceil() as usize;
    quadrature::integrate_c(-8.0, 8.0, panels, |u| Complex64::cis(2.0 * PI * tau * u) * psi.eval(u).powi(2))
}

/// Nodes on `[0, t_max]`, panels doubling in length from `[0, 1]`.
fn graded_nodes(t_max: f64) -> Vec<(f64, f64)> {
    let mut out = quadrature::composite_nodes(0.0, 1.0, 4, quadrature::PANEL_ORDER);
    let mut a = 1.0;
    while a < t_max {
        let b = (2.0 * a).min(t_max);
        out.extend(quadrature::composite_nodes(a, b, 8, quadrature::PANEL_ORDER));
        a = b;
    }
    out
}

/// Quotients `||T f||_r / ||f||_2`, `r = 2(d+1)/(d-1)`, over the slab family
/// `f_hat = a(eta~) w((eta_d - G)/lambda)`, for which `T f = lambda H(lambda x_d) U(x_d) g`.
pub fn t_scaling(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.dim != 3 {
        return Err(Error::InvalidParameter("t-scaling runs in d = 3".into()));
    }
    let form = QuadraticForm::new(3, cfg.k)?;
    let chart = GraphChart::new(form, 1.0)?;
    let psi = build_delta_psi(BumpKit::shared());
    let r = 6.0;
    let lams = lambdas(cfg, 3, 7);
    // 2-d density a = chi on a chart-coordinate grid, comoving with the wave packet
    let length = 256.0;
    let grid = Grid::new(vec![
        Axis::new(256, length).with_carrier(1.5),
        Axis::new(512, length),
    ])?;
    let a_hat = SampledField::from_frequency(grid.clone(), |et| Complex64::new(chart.cutoff_at(et), 0.0));
    let g_hat = SampledField::from_frequency(grid.clone(), |et| Complex64::new(chart.cutoff_at(et).powi(2), 0.0));
    let freq_cell = 1.0 / (length * length);
    let a_norm = (a_hat.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * freq_cell).sqrt();
    let w_norm = slab_h(&psi, 0.0).re.sqrt();
    let frame = chart.height_gradient(&ETA0);
    let t_nodes = graded_nodes(64.0);
    let n_of_t: Vec<f64> = t_nodes
        .par_iter()
        .map(|&(s, _)| {
            let u = graph_evolution(&g_hat, &chart, s, Some(&frame))?;
            let cell = u.grid().cell_volume();
            Ok(u.values().iter().map(|v| v.norm_sqr().powi(3)).sum::<f64>() * cell)
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&[], &["lambda", "ratio"]);
    let ratio_at = |lam: f64| -> f64 {
        // N is even in t; H is not
        let integral: f64 = t_nodes
            .iter()
            .zip(&n_of_t)
            .map(|(&(s, w), n)| w * n * (slab_h(&psi, lam * s).norm().powf(r) + slab_h(&psi, -lam * s).norm().powf(r)))
            .sum();
        lam.sqrt() * integral.powf(1.0 / r) / (w_norm * a_norm)
    };
    for &lam in &lams {
        t.push("slab", vec![], vec![lam, ratio_at(lam)]);
    }
    // the same quotient on a 3-d grid through the multiplier at lambda = 1/2
    let lam = 0.5;
    let g3 = Grid::new(vec![
        Axis::new(64, 16.0).with_carrier(1.5),
        Axis::new(64, 16.0),
        Axis::new(128, 32.0).with_carrier(0.75),
    ])?;
    let f_hat = SampledField::from_frequency(g3, |eta| {
        let et = &eta[..2];
        let a = chart.cutoff_at(et);
        if a == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(a * psi.eval((eta[2] - chart.height(et)) / lam), 0.0)
    });
    let f = f_hat.inv_fourier()?;
    let lm = LocalizedMultiplier::new(lam, MChoice::One, psi.clone(), chart.clone())?;
    let tf = t_rho_lambda_apply(&f, &lm)?;
    let direct = tf.lp_norm(r)? / f.lp_norm(2.0)?;
    let semi = ratio_at(lam);
    t.push("cross_check", vec![], vec![lam, (direct - semi).abs() / semi]);
    let checks = vec![
        Check::new(
            "slope",
            "slab",
            Statistic::LogLogSlope { x: "lambda".into(), y: "ratio".into() },
            Comparison::Within { target: 0.5, tol: cfg.tol("slope", 0.15) },
            "||T^rho_lambda||_{2 -> 2(d+1)/(d-1)} ~ lambda^{1/2}",
        ),
        Check::new(
            "grid_cross_check",
            "cross_check",
            Statistic::Max("ratio".into()),
            Comparison::Below(cfg.tol("cross_check", 0.05)),
            "T f = lambda H(lambda x_d) U(x_d) g",
        ),
    ];
    Ok(ExperimentReport::new("t-scaling", cfg.echo(), t, checks))
}
