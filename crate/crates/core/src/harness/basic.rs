//! Exact and near-exact identities: the region table, dyadic identities, the ABC split,
//! polar coordinates and the norm estimator on operators with known norms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::report::{Check, Comparison, ExperimentReport, Statistic, Table};
use crate::dyadic_decomp::{build_delta_psi, build_pv_psi, dyadic_sum, BumpKit, PsiFunction, PsiKind};
use crate::error::Result;
use crate::exponent_region::{region_table, Status};
use crate::field::{Grid, SampledField};
use crate::multipliers::{decompose_abc, resolvent_multiplier, LevelWindow, SpectralParameter};
use crate::normest::{opnorm_lower, Identity, NormProbe, RankOne};
use crate::quadform::QuadraticForm;
use crate::quadrature;
use crate::surface_ops::{cartesian_integrate, polar_integrate, PolarNodes, TestFunction};

/// Statuses stated for the named points: `B, B', C, C'` of restricted weak type for the
/// resolvent, `F` strong, the rest failing; `B, B'` and `F` alone on the Sobolev line.
fn expected_status(name: &str) -> (Status, Status) {
    match name {
        "B" | "B'" => (Status::RestrictedWeakType, Status::RestrictedWeakType),
        "C" | "C'" => (Status::RestrictedWeakType, Status::Fails),
        "F" => (Status::StrongType, Status::StrongType),
        _ => (Status::Fails, Status::Fails),
    }
}

pub fn region(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut t = Table::new(
        &["point", "resolvent", "resolvent_expected", "sobolev", "sobolev_expected"],
        &["inv_p", "inv_q"],
    );
    for (name, pair, res, sob) in region_table(cfg.dim)? {
        let (er, es) = expected_status(&name);
        t.push(
            "points",
            vec![
                name,
                res.status.as_str().into(),
                er.as_str().into(),
                sob.status.as_str().into(),
                es.as_str().into(),
            ],
            vec![pair.ip_f64(), pair.iq_f64()],
        );
    }
    let exact = Comparison::Within { target: 0.0, tol: 0.0 };
    let checks = vec![
        Check::new(
            "resolvent_mismatches",
            "points",
            Statistic::TextMismatches("resolvent".into(), "resolvent_expected".into()),
            exact,
            "uniform resolvent bound on the closed trapezoid minus vertices, restricted weak type at the vertices",
        ),
        Check::new(
            "sobolev_mismatches",
            "points",
            Statistic::TextMismatches("sobolev".into(), "sobolev_expected".into()),
            exact,
            "uniform Sobolev bound on the open segment BB', restricted weak type at B and B'",
        ),
    ];
    Ok(ExperimentReport::new("region", cfg.echo(), t, checks))
}

type Scalar = (&'static str, fn(f64) -> f64);

/// Smooth test functions with `g(0) = 1` and `|int g| <= 1`; levels beyond the window
/// contribute about `2^-24 psi(0) int g`.
const DELTA_TESTS: [Scalar; 3] = [
    ("gaussian", |x| (-PI * x * x).exp()),
    ("modulated", |x| (-x * x).exp() * (3.0 * x).cos()),
    ("sech_cos", |x| (2.0 * x).cos() / x.cosh()),
];

/// Test functions whose principal value integrals are computed by symmetric quadrature.
const PV_TESTS: [Scalar; 3] = [
    ("shifted_gaussian", |x| (-(x - 1.0) * (x - 1.0)).exp()),
    ("odd_bump", |x| x * (-x * x / 2.0).exp() + 0.3 * (-x * x).exp()),
    ("skewed", |x| (-(x - 0.4).powi(2) * 3.0).exp() * (1.0 + 0.5 * x)),
];

pub fn dyadic(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let psi = build_delta_psi(BumpKit::shared());
    let mut t = Table::new(&["function"], &["exact", "dyadic_sum", "error"]);
    for (name, g) in DELTA_TESTS {
        let s = dyadic_sum(&psi, g, 60.0, 0.2, (-24, 24));
        let exact = g(0.0);
        t.push("identity", vec![name.into()], vec![exact, s.total, (s.total - exact).abs()]);
    }
    let checks = vec![Check::new(
        "delta_identity",
        "identity",
        Statistic::Max("error".into()),
        Comparison::Below(cfg.tol("identity", 1e-7)),
        "sum_j 2^-j psi(2^-j .) -> delta",
    )];
    Ok(ExperimentReport::new("dyadic", cfg.echo(), t, checks))
}

/// `int psi(x) e^{-2 pi i t x} dx` by quadrature of the tabulated `psi`, independent of
/// the closed form.
pub fn psi_hat_numeric(psi: &PsiFunction, t: f64) -> Complex64 {
    let x_max = psi.extent();
    let panels = (x_max * (4.0 * t.abs()).max(8.0)).ceil() as usize;
    match psi.kind() {
        PsiKind::Pv => {
            let v = quadrature::integrate(0.0, x_max, panels, |x| psi.eval(x) * (2.0 * PI * t * x).sin());
            Complex64::new(0.0, -2.0 * v)
        }
        PsiKind::Delta => {
            let v = quadrature::integrate(0.0, x_max, panels, |x| psi.eval(x) * (2.0 * PI * t * x).cos());
            Complex64::new(2.0 * v, 0.0)
        }
    }
}

pub fn pv(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let kit = BumpKit::shared();
    let psi = build_pv_psi(kit.clone());
    let mut t = Table::new(&["label"], &["x", "reference", "value", "error"]);
    for (name, g) in PV_TESTS {
        // p.v. int g(x)/x dx = int_0^inf (g(x) - g(-x))/x dx
        let exact = quadrature::integrate(0.0, 40.0, 800, |x| (g(x) - g(-x)) / x);
        let s = dyadic_sum(&psi, g, 60.0, 0.2, (-24, 24));
        t.push("identity", vec![name.into()], vec![0.0, exact, s.total, (s.total - exact).abs()]);
    }
    for (series, kind_psi) in [("support_pv", psi.clone()), ("support_delta", build_delta_psi(kit))] {
        let ts = (0..50)
            .map(|i| 0.49 * i as f64 / 49.0)
            .chain((0..100).map(|i| 2.01 + 6.0 * i as f64 / 99.0));
        for s in ts {
            let v = psi_hat_numeric(&kind_psi, s).norm();
            t.push(series, vec!["outside".into()], vec![s, 0.0, v, v]);
        }
    }
    for i in 0..2000 {
        let x = 0.0625 * i as f64 + 0.01 * (i % 7) as f64;
        let defect = (psi.eval(x) + psi.eval(-x)).abs();
        t.push("odd", vec!["pair".into()], vec![x, 0.0, psi.eval(x), defect]);
    }
    let checks = vec![
        Check::new(
            "pv_identity",
            "identity",
            Statistic::Max("error".into()),
            Comparison::Below(cfg.tol("identity", 1e-7)),
            "sum_l 2^-l psi(2^-l .) -> p.v. 1/x",
        ),
        Check::new(
            "pv_support",
            "support_pv",
            Statistic::Max("error".into()),
            Comparison::Below(cfg.tol("support", 1e-10)),
            "psi_hat supported in 1/2 <= |t| <= 2",
        ),
        Check::new(
            "delta_support",
            "support_delta",
            Statistic::Max("error".into()),
            Comparison::Below(cfg.tol("support", 1e-10)),
            "psi_hat supported in 1/2 <= |t| <= 2",
        ),
        Check::new(
            "oddness",
            "odd",
            Statistic::Max("error".into()),
            Comparison::Within { target: 0.0, tol: 0.0 },
            "psi odd",
        ),
    ];
    Ok(ExperimentReport::new("pv", cfg.echo(), t, checks))
}

pub fn abc(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let form = QuadraticForm::new(cfg.dim, cfg.k)?;
    let grid = Grid::cubic(cfg.dim, cfg.grid.unwrap_or(64), cfg.box_len.unwrap_or(8.0))?;
    let kit = BumpKit::shared();
    let psi = build_pv_psi(kit.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xabc);
    let mut t = Table::new(&[], &["re_z", "im_z", "q", "residual"]);
    let mut zs = Vec::new();
    while zs.len() < 5 {
        let theta = rng.random_range(0.0..2.0 * PI);
        let z = SpectralParameter::on_unit_circle(theta);
        if z.b.abs() >= 0.1 {
            zs.push(z);
        }
    }
    for z in zs {
        let window = LevelWindow::for_grid(&kit, &grid, &form, z.a, 1e-12)?;
        let abc = decompose_abc(z, psi.clone(), window)?;
        let zc = z.as_complex();
        for _ in 0..1000 {
            let idx = rng.random_range(0..grid.len());
            let q = form.eval(&grid.frequency(idx));
            let tq = q + z.a;
            let rebuilt = Complex64::new(abc.sum(tq), abc.split.imag(q));
            let exact = 1.0 / (q + zc);
            t.push("residual", vec![], vec![z.a, z.b, q, (rebuilt - exact).norm()]);
        }
    }
    let checks = vec![Check::new(
        "abc_completeness",
        "residual",
        Statistic::Max("residual".into()),
        Comparison::Below(cfg.tol("residual", 1e-9)),
        "1/(Q + z) = sum of A, B, C pieces + i imaginary part",
    )];
    Ok(ExperimentReport::new("abc", cfg.echo(), t, checks))
}

/// `exp(-xi^T A xi) (1 + c . xi)` with `A = R D R^T`; its integral is
/// `pi^{d/2} / sqrt(det D)`.
struct RandomGaussian {
    a: Vec<f64>,
    c: Vec<f64>,
    integral: f64,
}

impl RandomGaussian {
    fn new(d: usize, rng: &mut ChaCha8Rng) -> Self {
        let diag: Vec<f64> = (0..d).map(|_| rng.random_range(0.6..2.0)).collect();
        // R: product of random plane rotations
        let mut r = vec![0.0; d * d];
        for i in 0..d {
            r[i * d + i] = 1.0;
        }
        for i in 0..d {
            for j in i + 1..d {
                let th: f64 = rng.random_range(0.0..2.0 * PI);
                let (s, c) = th.sin_cos();
                for row in 0..d {
                    let (x, y) = (r[row * d + i], r[row * d + j]);
                    r[row * d + i] = c * x - s * y;
                    r[row * d + j] = s * x + c * y;
                }
            }
        }
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                a[i * d + j] = (0..d).map(|m| r[i * d + m] * diag[m] * r[j * d + m]).sum();
            }
        }
        let c = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let integral = PI.powf(d as f64 / 2.0) / diag.iter().product::<f64>().sqrt();
        Self { a, c, integral }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let d = x.len();
        let mut q = 0.0;
        for i in 0..d {
            for j in 0..d {
                q += x[i] * self.a[i * d + j] * x[j];
            }
        }
        (-q).exp() * (1.0 + self.c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
    }
}

pub fn polar(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let form = QuadraticForm::new(cfg.dim, cfg.k)?;
    let d = cfg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9017);
    let randoms = [RandomGaussian::new(d, &mut rng), RandomGaussian::new(d, &mut rng)];
    let gaussian = |x: &[f64]| (-PI * x.iter().map(|v| v * v).sum::<f64>()).exp();
    let r0 = |x: &[f64]| randoms[0].eval(x);
    let r1 = |x: &[f64]| randoms[1].eval(x);
    let cases: [(&str, &(dyn Fn(&[f64]) -> f64 + Sync), f64); 3] = [
        ("gaussian", &gaussian, 1.0),
        ("random_1", &r0, randoms[0].integral),
        ("random_2", &r1, randoms[1].integral),
    ];
    let cart_n = match d {
        3 => 128,
        4 => 48,
        _ => 24,
    };
    let mut t = Table::new(&["function"], &["exact", "polar", "plus", "minus", "cartesian", "rel_error"]);
    for (name, f, exact) in cases {
        let g = TestFunction { f, radius: 8.0 };
        let (total, [plus, minus]) = polar_integrate(&g, &form, PolarNodes::default());
        let cart = cartesian_integrate(&g, d, cart_n);
        t.push(
            "polar",
            vec![name.into()],
            vec![exact, total, plus, minus, cart, ((total - cart) / cart).abs()],
        );
    }
    let checks = vec![Check::new(
        "polar_vs_cartesian",
        "polar",
        Statistic::Max("rel_error".into()),
        Comparison::Below(cfg.tol("polar", 1e-3)),
        "d xi = sum_pm rho^{d-1} d rho d sigma_pm",
    )];
    Ok(ExperimentReport::new("polar", cfg.echo(), t, checks))
}

pub fn normest(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let form = QuadraticForm::new(cfg.dim, cfg.k)?;
    let mut t = Table::new(&["operator"], &["exact", "lower_bound", "error"]);
    let probe = NormProbe::new(2.0, 2.0).with_seed(cfg.seed);

    let grid = Grid::cubic(cfg.dim, 8, 4.0)?;
    let e = opnorm_lower(&Identity(grid), &probe)?;
    t.push("identity", vec!["identity".into()], vec![1.0, e.bound, (e.bound - 1.0).abs()]);

    // one level of |Q + a| is isolated from the rest, so the power iteration converges fast
    let grid = Grid::cubic(cfg.dim, 16, 2.0)?;
    let m = resolvent_multiplier(&grid, &form, SpectralParameter::new(0.25, 0.1))?;
    let e = opnorm_lower(&m, &probe.clone().with_iterations(100))?;
    t.push("diagonal", vec!["resolvent".into()], vec![m.sup(), e.bound, (e.bound - m.sup()).abs()]);

    let grid = Grid::cubic(cfg.dim, 16, 4.0)?;
    let bump = |c: [f64; 3], w: f64| {
        SampledField::from_physical(grid.clone(), move |x| {
            let r2: f64 = x.iter().zip(c.iter().chain(std::iter::repeat(&0.0))).map(|(a, b)| (a - b).powi(2)).sum();
            Complex64::new((-r2 / w).exp(), 0.3 * (-r2 / (2.0 * w)).exp())
        })
    };
    let (u, v) = (bump([0.5, -0.25, 0.0], 0.5), bump([-0.75, 0.0, 0.5], 0.8));
    for (p, q) in [(1.5, 4.0), (1.2, 6.0)] {
        let exact = v.lp_norm(q)? * u.lp_norm(p / (p - 1.0))?;
        let e = opnorm_lower(&RankOne { u: u.clone(), v: v.clone() }, &NormProbe::new(p, q).with_seed(cfg.seed))?;
        t.push("rank_one", vec![format!("p={p},q={q}")], vec![exact, e.bound, (e.bound - exact).abs()]);
    }
    let checks = vec![
        Check::new("identity", "identity", Statistic::Max("error".into()), Comparison::Below(1e-10), "||I|| = 1"),
        Check::new(
            "diagonal",
            "diagonal",
            Statistic::Max("error".into()),
            Comparison::Below(1e-8),
            "||m(D)||_{2->2} = sup |m|",
        ),
        Check::new(
            "rank_one",
            "rank_one",
            Statistic::Max("error".into()),
            Comparison::Below(1e-6),
            "||<., u> v||_{p->q} = ||v||_q ||u||_{p'}",
        ),
    ];
    Ok(ExperimentReport::new("normest", cfg.echo(), t, checks))
}
