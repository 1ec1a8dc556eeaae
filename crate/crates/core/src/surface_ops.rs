//! Restriction–extension on the quadric `{Q = rho}`: graph-chart quadrature, an atlas
//! of moved charts covering the band `1/2 <= |xi| <= 2`, the Poisson mollification of
//! `delta(Q - rho)`, generalized polar coordinates, the evolution operator `U_rho(t)` and
//! the oscillatory integral `I(x)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Grid, SampledField, Space};
use crate::quadform::{GraphChart, Isometry, QuadraticForm};
use crate::quadrature::{self, OscillatoryCubature, PANEL_ORDER};

/// A spectral density `F(xi)` evaluable anywhere.
pub trait SpectralDensity: Sync {
    fn eval(&self, xi: &[f64]) -> Complex64;
}

impl<F: Fn(&[f64]) -> Complex64 + Sync> SpectralDensity for F {
    fn eval(&self, xi: &[f64]) -> Complex64 {
        self(xi)
    }
}

/// Off-grid values of `f_hat` by trigonometric interpolation,
/// `f_hat(xi) = h^d sum_x f(x) e^{-2 pi i x . xi}`; exact for fields built from grid modes.
#[derive(Debug, Clone)]
pub struct BandLimited {
    points: Vec<(Vec<f64>, Complex64)>,
    cell: f64,
}

impl BandLimited {
    pub fn new(f: &SampledField) -> Result<Self> {
        let phys = match f.space() {
            Space::Physical => f.clone(),
            Space::Frequency => f.inv_fourier()?,
        };
        let grid = phys.grid();
        let points = phys
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm_sqr() > 0.0)
            .map(|(i, v)| (grid.position(i), *v))
            .collect();
        Ok(Self {
            points,
            cell: grid.cell_volume(),
        })
    }
}

impl SpectralDensity for BandLimited {
    fn eval(&self, xi: &[f64]) -> Complex64 {
        let s: Complex64 = self
            .points
            .iter()
            .map(|(x, v)| {
                let ph: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
                v * Complex64::cis(-2.0 * PI * ph)
            })
            .sum();
        s * self.cell
    }
}

/// `int e^{2 pi i x . xi(eta~)} F(xi(eta~)) w(eta~) d eta~ / (2 eta_1)` over `domain`.
pub fn chart_integral(
    chart: &GraphChart,
    density: &dyn SpectralDensity,
    weight: &(dyn Fn(&[f64]) -> f64 + Sync),
    domain: &[(f64, f64)],
    x: &[f64],
    cubature: &OscillatoryCubature,
) -> Result<Complex64> {
    let phase = |et: &[f64]| -> f64 {
        let xi = chart.point(et);
        x.iter().zip(&xi).map(|(a, b)| a * b).sum()
    };
    let amp = |et: &[f64]| -> Complex64 {
        let w = weight(et);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        density.eval(&chart.point(et)) * (w * chart.density(et))
    };
    Ok(cubature.integrate(domain, phase, amp)?.value)
}

/// The single-chart extension with the chart cutoff as weight.
pub fn chart_extension(
    chart: &GraphChart,
    density: &dyn SpectralDensity,
    x: &[f64],
    cubature: &OscillatoryCubature,
) -> Result<Complex64> {
    let domain = chart.cutoff.support_box(chart.dim());
    chart_integral(chart, density, &|et| chart.cutoff_at(et), &domain, x, cubature)
}

/// Finite set of moved graph charts whose cutoffs cover the band `1/2 <= |xi| <= 2` of
/// `{Q = rho}`, with the normalized partition of unity `w_c = b_c / sum b`.
#[derive(Debug, Clone)]
pub struct Atlas {
    pub form: QuadraticForm,
    pub rho: f64,
    pub charts: Vec<GraphChart>,
    inverses: Vec<Isometry>,
}

/// Unit directions covering `S^{m-1}` to within about 25 degrees.
fn direction_net(m: usize) -> Result<Vec<Vec<f64>>> {
    match m {
        1 => Ok(vec![vec![1.0], vec![-1.0]]),
        2 => Ok((0..16)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / 16.0;
                vec![a.cos(), a.sin()]
            })
            .collect()),
        3 => {
            let mut out = Vec::new();
            let ticks = [-2.0 / 3.0, 0.0, 2.0 / 3.0];
            for axis in 0..3 {
                for sign in [-1.0, 1.0] {
                    for &a in &ticks {
                        for &b in &ticks {
                            let mut v = [0.0f64; 3];
                            v[axis] = sign;
                            v[(axis + 1) % 3] = a;
                            v[(axis + 2) % 3] = b;
                            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                            out.push(v.iter().map(|c| c / n).collect());
                        }
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::InvalidParameter(format!(
            "band atlas supports blocks of size <= 3, got {m}"
        ))),
    }
}

/// Orthogonal `m x m` matrix (row-major) sending basis vector `e` to unit `n`.
fn rotation_to(m: usize, e: usize, n: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; m * m];
    for i in 0..m {
        r[i * m + i] = 1.0;
    }
    if m == 1 {
        r[0] = n[0].signum();
        return r;
    }
    let c = n[e];
    let mut perp: Vec<f64> = n.to_vec();
    perp[e] = 0.0;
    let s = perp.iter().map(|v| v * v).sum::<f64>().sqrt();
    if s < 1e-14 {
        if c < 0.0 {
            // half turn in the plane of e and a neighbour
            let o = (e + 1) % m;
            r[e * m + e] = -1.0;
            r[o * m + o] = -1.0;
        }
        return r;
    }
    for v in perp.iter_mut() {
        *v /= s;
    }
    // R = I + (c - 1)(e e^T + p p^T) + s (p e^T - e p^T)
    for i in 0..m {
        for j in 0..m {
            let ei = if i == e { 1.0 } else { 0.0 };
            let ej = if j == e { 1.0 } else { 0.0 };
            r[i * m + j] += (c - 1.0) * (ei * ej + perp[i] * perp[j]) + s * (perp[i] * ej - ei * perp[j]);
        }
    }
    r
}

impl Atlas {
    /// Charts moved by block rotations, boosts and reflections; coverage of the band is
    /// verified on random samples.
    pub fn band(form: QuadraticForm, rho: f64) -> Result<Self> {
        let (d, k) = (form.d(), form.k());
        let net_u = direction_net(k)?;
        let net_v = direction_net(d - k)?;
        // eta_1 ranges over [|xi|/sqrt 2, |xi|] on the band; boosts bring it near 3/2.
        let boosts: Vec<f64> = (0..6).map(|j| 1.5 / (0.33 * 1.42f64.powi(j))).collect();
        let mut charts = Vec::new();
        let mut inverses = Vec::new();
        for nu in &net_u {
            let r1 = rotation_to(k, 0, nu);
            for nv in &net_v {
                let r2 = rotation_to(d - k, d - k - 1, nv);
                let rot = Isometry::block(&form, &r1, &r2)?;
                for &a in &boosts {
                    let iso = rot.compose(&Isometry::boost(d, 1.0 / a));
                    inverses.push(iso.inverse(&form));
                    charts.push(GraphChart::new(form, rho)?.with_isometry(iso));
                }
            }
        }
        let atlas = Self {
            form,
            rho,
            charts,
            inverses,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let xi = atlas.random_band_point(&mut rng);
            let cov = atlas.coverage(&xi);
            if !(cov > 1e-6) {
                return Err(Error::AtlasLeakage(1.0));
            }
        }
        Ok(atlas)
    }

    /// A random point of the band on the surface.
    pub fn random_band_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let (d, k) = (self.form.d(), self.form.k());
        loop {
            let mut xi: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            let q = self.form.eval(&xi);
            if q * self.rho <= 0.0 {
                continue;
            }
            let s = (self.rho / q).sqrt();
            for v in xi.iter_mut() {
                *v *= s;
            }
            let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (0.5..=2.0).contains(&r) {
                let _ = k;
                return xi;
            }
        }
    }

    /// Chart coordinates of a surface point in chart `c`.
    fn coords(&self, c: usize, xi: &[f64]) -> Vec<f64> {
        let local = self.inverses[c].apply(xi);
        let eta = self.form.rotate_to_graph(&local).expect("non-elliptic");
        eta[..self.form.d() - 1].to_vec()
    }

    fn bump(&self, c: usize, xi: &[f64]) -> f64 {
        let et = self.coords(c, xi);
        if et[0] <= 0.0 {
            return 0.0;
        }
        self.charts[c].cutoff_at(&et)
    }

    /// `sum_c b_c(xi)`.
    pub fn coverage(&self, xi: &[f64]) -> f64 {
        (0..self.charts.len()).map(|c| self.bump(c, xi)).sum()
    }

    /// Partition weight of chart `c` at a surface point.
    pub fn weight(&self, c: usize, xi: &[f64]) -> f64 {
        let b = self.bump(c, xi);
        if b == 0.0 {
            return 0.0;
        }
        b / self.coverage(xi)
    }

    /// Radial projection of `xi` onto the surface, if `Q(xi)` has the sign of `rho`.
    pub fn project(&self, xi: &[f64]) -> Option<Vec<f64>> {
        let q = self.form.eval(xi);
        if q * self.rho <= 0.0 {
            return None;
        }
        let s = (self.rho / q).sqrt();
        Some(xi.iter().map(|v| v * s).collect())
    }
}

/// Extension through the atlas: `sum_c int e^{2 pi i x . xi} F w_c d eta~ / (2 eta_1)`.
pub fn atlas_extension(atlas: &Atlas, density: &dyn SpectralDensity, x: &[f64], cubature: &OscillatoryCubature) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for (c, chart) in atlas.charts.iter().enumerate() {
        let domain = chart.cutoff.support_box(chart.dim());
        let w = |et: &[f64]| {
            let b = chart.cutoff_at(et);
            if b == 0.0 {
                0.0
            } else {
                b / atlas.coverage(&chart.point(et))
            }
        };
        // skip charts where the density vanishes on a coarse probe
        if !chart_touches(chart, density, &domain) {
            continue;
        }
        total += chart_integral(chart, density, &w, &domain, x, cubature)?;
        let _ = c;
    }
    Ok(total)
}

fn chart_touches(chart: &GraphChart, density: &dyn SpectralDensity, domain: &[(f64, f64)]) -> bool {
    const M: usize = 24;
    let dim = domain.len();
    let mut et = vec![0.0; dim];
    for idx in 0..M.pow(dim as u32) {
        let mut r = idx;
        for a in 0..dim {
            let (lo, hi) = domain[a];
            et[a] = lo + (hi - lo) * ((r % M) as f64 + 0.5) / M as f64;
            r /= M;
        }
        if chart.cutoff_at(&et) > 0.0 && density.eval(&chart.point(&et)).norm() > 0.0 {
            return true;
        }
    }
    false
}

/// Fraction of the `|f_hat|^2` mass within `band` of the surface that the atlas misses.
pub fn atlas_leakage(atlas: &Atlas, f_hat: &SampledField, band: f64) -> Result<f64> {
    if f_hat.space() != Space::Frequency {
        return Err(Error::WrongSpace {
            expected: "frequency",
            found: "physical",
        });
    }
    let grid = f_hat.grid();
    let (mut near, mut missed) = (0.0, 0.0);
    for (i, v) in f_hat.values().iter().enumerate() {
        let m = v.norm_sqr();
        if m == 0.0 {
            continue;
        }
        let xi = grid.frequency(i);
        if (atlas.form.eval(&xi) - atlas.rho).abs() > band {
            continue;
        }
        near += m;
        let covered = atlas.project(&xi).is_some_and(|p| atlas.coverage(&p) > 0.0);
        if !covered {
            missed += m;
        }
    }
    Ok(if near == 0.0 { 0.0 } else { missed / near })
}

/// `F^{-1}(delta(Q - rho) f_hat)` on the grid of `f`, through the band atlas.
///
/// `nodes` fixes the per-axis chart quadrature; the sum over nodes is evaluated at every
/// grid point.
pub fn restrict_extend_chart(f: &SampledField, form: &QuadraticForm, rho: f64, nodes: usize) -> Result<SampledField> {
    let grid = f.grid().clone();
    if grid.dim() != form.d() {
        return Err(Error::DimensionMismatch {
            expected: form.d(),
            got: grid.dim(),
        });
    }
    let atlas = Atlas::band(*form, rho)?;
    let f_hat = match f.space() {
        Space::Physical => f.fourier()?,
        Space::Frequency => f.clone(),
    };
    let spacing = grid.axes().iter().map(|a| 1.0 / a.length).fold(0.0, f64::max);
    let reach = grid.axes().iter().map(|a| a.nyquist()).fold(0.0, f64::max);
    let leak = atlas_leakage(&atlas, &f_hat, 4.0 * spacing * reach)?;
    if leak > 1e-6 {
        return Err(Error::AtlasLeakage(leak));
    }
    let density = BandLimited::new(&f_hat)?;
    // Weighted nodes of every chart, in xi.
    let mut pts: Vec<(Vec<f64>, Complex64)> = Vec::new();
    for chart in &atlas.charts {
        let domain = chart.cutoff.support_box(chart.dim());
        if !chart_touches(chart, &density, &domain) {
            continue;
        }
        let axes: Vec<Vec<(f64, f64)>> = domain
            .iter()
            .map(|&(lo, hi)| quadrature::composite_nodes(lo, hi, nodes.div_ceil(PANEL_ORDER), PANEL_ORDER))
            .collect();
        let total: usize = axes.iter().map(Vec::len).product();
        let mut et = vec![0.0; domain.len()];
        for idx in 0..total {
            let mut r = idx;
            let mut w = 1.0;
            for (a, ax) in axes.iter().enumerate() {
                let (x, wa) = ax[r % ax.len()];
                et[a] = x;
                w *= wa;
                r /= ax.len();
            }
            let b = chart.cutoff_at(&et);
            if b == 0.0 {
                continue;
            }
            let xi = chart.point(&et);
            let v = density.eval(&xi) * (w * chart.density(&et) * b / atlas.coverage(&xi));
            if v.norm_sqr() > 0.0 {
                pts.push((xi, v));
            }
        }
    }
    let values = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.position(i);
            pts.iter()
                .map(|(xi, v)| {
                    let ph: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
                    v * Complex64::cis(2.0 * PI * ph)
                })
                .sum()
        })
        .collect();
    SampledField::new(grid, values, Space::Physical)
}

/// Poisson kernel `(1/pi) eps / (s^2 + eps^2)`.
pub fn poisson(s: f64, eps: f64) -> f64 {
    eps / (PI * (s * s + eps * eps))
}

/// Frequency-side multiplication by the Poisson mollification of `delta(Q - rho)`.
pub fn restrict_extend_mollified(f: &SampledField, form: &QuadraticForm, rho: f64, eps: f64) -> Result<SampledField> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {eps} must be positive")));
    }
    let fh = match f.space() {
        Space::Physical => f.fourier()?,
        Space::Frequency => f.clone(),
    };
    fh.multiply_frequency(|xi| Complex64::new(poisson(form.eval(xi) - rho, eps), 0.0))?
        .inv_fourier()
}

/// Whether `eps` exceeds the spacing of `Q` values near the surface on this grid.
pub fn mollifier_resolved(grid: &Grid, eps: f64) -> bool {
    let reach = grid.axes().iter().map(|a| a.nyquist()).fold(0.0, f64::max);
    let dq = grid.axes().iter().map(|a| 2.0 * reach / a.length).fold(0.0, f64::max);
    eps > dq
}

/// Pointwise value of `int e^{2 pi i x . xi} F(xi) P_eps(Q(xi) - rho) d xi` for `F`
/// supported in the graph-coordinate box `support` (over `eta~` and `eta_d`).
///
/// In graph coordinates `P_eps(Q - rho) = P_{eps'}(eta_d - G) / (2 eta_1)` with
/// `eps' = eps / (2 eta_1)`; the normal integral uses `s = eps' tan(theta)` near the
/// surface and graded panels beyond.
pub struct MollifiedExtension<'a> {
    pub form: QuadraticForm,
    pub rho: f64,
    pub eps: f64,
    /// `F` as a function of graph coordinates `eta`.
    pub density: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    /// Box containing the support of `F` in `eta` (length `d`).
    pub support: Vec<(f64, f64)>,
    pub tangential_nodes: usize,
}

impl MollifiedExtension<'_> {
    /// Values at the points `xs` (given in graph coordinates).
    pub fn eval_many(&self, xs: &[Vec<f64>]) -> Vec<Complex64> {
        let d = self.form.d();
        let chart = GraphChart::with_domain(
            self.form,
            self.rho,
            crate::quadform::ChartDomain {
                eta1: self.support[0],
                r_prime: f64::INFINITY,
                r_second: f64::INFINITY,
            },
        )
        .expect("valid chart");
        let axes: Vec<Vec<(f64, f64)>> = self.support[..d - 1]
            .iter()
            .map(|&(lo, hi)| quadrature::composite_nodes(lo, hi, self.tangential_nodes.div_ceil(PANEL_ORDER), PANEL_ORDER))
            .collect();
        let total: usize = axes.iter().map(Vec::len).product();
        let mut xds: Vec<f64> = xs.iter().map(|x| x[d - 1]).collect();
        xds.sort_by(f64::total_cmp);
        xds.dedup();
        let (ed_lo, ed_hi) = self.support[d - 1];
        // For each tangential node: weight, eta~, G, and the normal integrals per x_d.
        let rows: Vec<(Vec<f64>, f64, Vec<Complex64>)> = (0..total)
            .into_par_iter()
            .filter_map(|idx| {
                let mut r = idx;
                let mut w = 1.0;
                let mut et = vec![0.0; d - 1];
                for (a, ax) in axes.iter().enumerate() {
                    let (x, wa) = ax[r % ax.len()];
                    et[a] = x;
                    w *= wa;
                    r /= ax.len();
                }
                let g = chart.height(&et);
                let e1 = et[0];
                let ep = self.eps / (2.0 * e1);
                let nodes = normal_nodes(ed_lo - g, ed_hi - g, ep);
                let mut eta = et.clone();
                eta.push(0.0);
                let samples: Vec<(f64, f64)> = nodes
                    .iter()
                    .filter_map(|&(s, ws)| {
                        eta[d - 1] = g + s;
                        let f = (self.density)(&eta);
                        (f != 0.0).then_some((s, ws * f))
                    })
                    .collect();
                if samples.is_empty() {
                    return None;
                }
                let per_xd = xds
                    .iter()
                    .map(|&xd| {
                        samples
                            .iter()
                            .map(|&(s, ws)| Complex64::cis(2.0 * PI * xd * (g + s)) * ws)
                            .sum::<Complex64>()
                    })
                    .collect();
                Some((et, w / (2.0 * e1), per_xd))
            })
            .collect();
        xs.par_iter()
            .map(|x| {
                let j = xds.partition_point(|&v| v < x[d - 1]);
                rows.iter()
                    .map(|(et, w, per)| {
                        let ph: f64 = et.iter().zip(x).map(|(a, b)| a * b).sum();
                        per[j] * Complex64::cis(2.0 * PI * ph) * *w
                    })
                    .sum()
            })
            .collect()
    }
}

/// Nodes for `int_lo^hi P_ep(s) h(s) ds`, weights including the kernel.
fn normal_nodes(lo: f64, hi: f64, ep: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let delta = (50.0 * ep).min(0.5 * hi.abs().min(lo.abs()).max(ep));
    let (a, b) = (lo.max(-delta), hi.min(delta));
    if a < b {
        // s = ep tan(theta): P ds = d theta / pi
        let (ta, tb) = ((a / ep).atan(), (b / ep).atan());
        for (t, w) in quadrature::composite_nodes(ta, tb, 8, PANEL_ORDER) {
            out.push((ep * t.tan(), w / PI));
        }
    }
    // graded panels outward from delta
    for (start, end, dir) in [(delta, hi, 1.0), (delta, -lo, -1.0)] {
        if end <= start {
            continue;
        }
        let mut s0 = start;
        while s0 < end {
            let s1 = (2.0 * s0).min(end);
            for (s, w) in quadrature::composite_nodes(s0, s1, 2, PANEL_ORDER) {
                out.push((dir * s, w * poisson(s, ep)));
            }
            s0 = s1;
        }
    }
    out
}

/// A smooth test function for the polar identity with a radius beyond which it is
/// negligible.
pub struct TestFunction<'a> {
    pub f: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    pub radius: f64,
}

/// Node counts for [`polar_integrate`].
#[derive(Debug, Clone, Copy)]
pub struct PolarNodes {
    pub radial: usize,
    /// Hyperbolic angle nodes and truncation.
    pub hyperbolic: usize,
    pub s_max: f64,
    /// Nodes per circle or polar angle.
    pub angular: usize,
}

impl Default for PolarNodes {
    fn default() -> Self {
        Self {
            radial: 64,
            hyperbolic: 96,
            s_max: 8.0,
            angular: 48,
        }
    }
}

/// Quadrature on `S^{m-1}`, weights summing to the sphere area.
pub fn sphere_rule(m: usize, n: usize) -> Vec<(Vec<f64>, f64)> {
    match m {
        0 => vec![(vec![], 1.0)],
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => (0..n)
            .map(|j| {
                let a = 2.0 * PI * (j as f64 + 0.5) / n as f64;
                (vec![a.cos(), a.sin()], 2.0 * PI / n as f64)
            })
            .collect(),
        _ => {
            let inner = sphere_rule(m - 1, n);
            let mut out = Vec::new();
            for (t, w) in quadrature::composite_nodes(0.0, PI, n.div_ceil(PANEL_ORDER), PANEL_ORDER) {
                let (c, s) = (t.cos(), t.sin());
                for (om, wi) in &inner {
                    let mut v = vec![c];
                    v.extend(om.iter().map(|o| s * o));
                    out.push((v, w * wi * s.powi(m as i32 - 2)));
                }
            }
            out
        }
    }
}

/// `sum_pm int_0^inf int g(r theta) r^{d-1} d sigma_pm(theta) dr` in hyperbolic
/// coordinates on `{Q = +-1}`: `u = sinh(s) w_u, v = cosh(s) w_v` with
/// `d sigma_+ = sinh^{k-1} s cosh^{d-k-1} s ds dw_u dw_v`, and symmetrically for `-`.
///
/// Returns `(total, [plus, minus])`.
pub fn polar_integrate(g: &TestFunction, form: &QuadraticForm, nodes: PolarNodes) -> (f64, [f64; 2]) {
    let (d, k) = (form.d(), form.k());
    let su = sphere_rule(k, nodes.angular);
    let sv = sphere_rule(d - k, nodes.angular);
    let s_nodes = quadrature::composite_nodes(0.0, nodes.s_max, nodes.hyperbolic.div_ceil(PANEL_ORDER), PANEL_ORDER);
    let r_rule = quadrature::gl_rule(PANEL_ORDER);
    let branch = |plus: bool| -> f64 {
        s_nodes
            .par_iter()
            .map(|&(s, ws)| {
                let (sh, ch) = (s.sinh(), s.cosh());
                let (a_u, a_v) = if plus { (sh, ch) } else { (ch, sh) };
                let jac = a_u.powi(k as i32 - 1) * a_v.powi((d - k) as i32 - 1);
                let norm = (a_u * a_u + a_v * a_v).sqrt();
                let r_max = g.radius / norm;
                let panels = nodes.radial.div_ceil(PANEL_ORDER);
                let mut acc = 0.0;
                let mut theta = vec![0.0; d];
                for (wu, wgu) in &su {
                    for (wv, wgv) in &sv {
                        for (i, c) in wu.iter().enumerate() {
                            theta[i] = a_u * c;
                        }
                        for (i, c) in wv.iter().enumerate() {
                            theta[k + i] = a_v * c;
                        }
                        let mut radial = 0.0;
                        let h = r_max / panels as f64;
                        let mut pt = vec![0.0; d];
                        for p in 0..panels {
                            let mid = (p as f64 + 0.5) * h;
                            for &(x, w) in r_rule.iter() {
                                let r = mid + 0.5 * h * x;
                                for (o, t) in pt.iter_mut().zip(&theta) {
                                    *o = r * t;
                                }
                                radial += 0.5 * h * w * r.powi(d as i32 - 1) * (g.f)(&pt);
                            }
                        }
                        acc += wgu * wgv * radial;
                    }
                }
                ws * jac * acc
            })
            .collect::<Vec<f64>>()
            .into_iter()
            .sum()
    };
    let plus = branch(true);
    let minus = branch(false);
    (plus + minus, [plus, minus])
}

/// Riemann sum of `g` over `[-R, R]^d` with `n` points per axis.
pub fn cartesian_integrate(g: &TestFunction, d: usize, n: usize) -> f64 {
    let h = 2.0 * g.radius / n as f64;
    let total = n.pow(d as u32);
    let partial: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|first| {
            let inner = total / n;
            let mut x = vec![0.0; d];
            x[0] = -g.radius + (first as f64 + 0.5) * h;
            let mut acc = 0.0;
            for idx in 0..inner {
                let mut r = idx;
                for xa in x.iter_mut().skip(1) {
                    *xa = -g.radius + ((r % n) as f64 + 0.5) * h;
                    r /= n;
                }
                acc += (g.f)(&x);
            }
            acc
        })
        .collect();
    partial.into_iter().sum::<f64>() * h.powi(d as i32)
}

/// `U_rho(t) g = F^{-1}(chi e^{2 pi i t G_rho} g_hat)` on a `(d-1)`-dimensional grid whose
/// frequencies are chart coordinates. `frame` subtracts a linear phase `t frame . eta~`,
/// which translates the output without changing its norms.
pub fn evolution_u(g: &SampledField, chart: &GraphChart, t: f64, frame: Option<&[f64]>) -> Result<SampledField> {
    evolution_with_sign(g, chart, t, frame, 1.0)
}

/// The adjoint of [`evolution_u`].
pub fn evolution_u_adjoint(g: &SampledField, chart: &GraphChart, t: f64, frame: Option<&[f64]>) -> Result<SampledField> {
    evolution_with_sign(g, chart, t, frame, -1.0)
}

fn evolution_with_sign(g: &SampledField, chart: &GraphChart, t: f64, frame: Option<&[f64]>, sign: f64) -> Result<SampledField> {
    let dim = chart.dim();
    if g.grid().dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: g.grid().dim(),
        });
    }
    check_window(g.grid(), &chart.cutoff.support_box(dim))?;
    let gh = match g.space() {
        Space::Physical => g.fourier()?,
        Space::Frequency => g.clone(),
    };
    gh.multiply_frequency(|et| {
        let c = chart.cutoff_at(et);
        if c == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let lin = frame.map_or(0.0, |f| f.iter().zip(et).map(|(a, b)| a * b).sum());
        Complex64::cis(sign * 2.0 * PI * t * (chart.height(et) - lin)) * c
    })?
    .inv_fourier()
}

/// `x~ -> int e^{2 pi i (x~ . eta~ + t (G(eta~) - frame . eta~))} F(eta~) d eta~` for a
/// density `F` sampled on a grid of chart coordinates (frequency space, no cutoff applied).
pub fn graph_evolution(density: &SampledField, chart: &GraphChart, t: f64, frame: Option<&[f64]>) -> Result<SampledField> {
    if density.space() != Space::Frequency {
        return Err(Error::WrongSpace {
            expected: "frequency",
            found: "physical",
        });
    }
    if density.grid().dim() != chart.dim() {
        return Err(Error::DimensionMismatch {
            expected: chart.dim(),
            got: density.grid().dim(),
        });
    }
    let grid = density.grid().clone();
    let mut out = density.clone();
    let mut et = vec![0.0; grid.dim()];
    for (i, v) in out.values_mut().iter_mut().enumerate() {
        if v.norm_sqr() == 0.0 {
            continue;
        }
        grid.frequency_into(i, &mut et);
        let lin = frame.map_or(0.0, |f| f.iter().zip(&et).map(|(a, b)| a * b).sum());
        *v *= Complex64::cis(2.0 * PI * t * (chart.height(&et) - lin));
    }
    out.inv_fourier()
}

/// Errors unless the grid's frequency window contains `support`.
pub fn check_window(grid: &Grid, support: &[(f64, f64)]) -> Result<()> {
    for (a, &(lo, hi)) in grid.axes().iter().zip(support) {
        let w_lo = a.frequency(0);
        let w_hi = a.frequency(a.n - 1);
        if lo < w_lo || hi > w_hi {
            return Err(Error::InvalidParameter(format!(
                "frequency window [{w_lo}, {w_hi}] does not contain [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

/// `U_rho(t) g` at one point by quadrature, for `g_hat` given as a function of `eta~`.
pub fn evolution_u_at(
    g_hat: &(dyn Fn(&[f64]) -> Complex64 + Sync),
    chart: &GraphChart,
    t: f64,
    x: &[f64],
    cubature: &OscillatoryCubature,
) -> Result<Complex64> {
    let domain = chart.cutoff.support_box(chart.dim());
    let phase = |et: &[f64]| x.iter().zip(et).map(|(a, b)| a * b).sum::<f64>() + t * chart.height(et);
    let amp = |et: &[f64]| {
        let c = chart.cutoff_at(et);
        if c == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            g_hat(et) * c
        }
    };
    Ok(cubature.integrate(&domain, phase, amp)?.value)
}

/// `I(x) = int e^{2 pi i (x~ . eta~ + x_d G_rho)} chi d eta~`.
pub fn oscillatory_i(x: &[f64], chart: &GraphChart, cubature: &OscillatoryCubature) -> Result<Complex64> {
    let d = chart.form.d();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    evolution_u_at(&|_| Complex64::new(1.0, 0.0), chart, x[d - 1], &x[..d - 1], cubature)
}

/// The point `x~ = -x_d grad G(eta0)` where the phase of `I` is stationary at `eta0`.
pub fn stationary_point(chart: &GraphChart, eta0: &[f64], xd: f64) -> Vec<f64> {
    let mut x: Vec<f64> = chart.height_gradient(eta0).iter().map(|g| -xd * g).collect();
    x.push(xd);
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form() -> QuadraticForm {
        QuadraticForm::new(3, 1).unwrap()
    }

    #[test]
    fn sphere_rules_have_the_right_area() {
        let area = |m: usize| sphere_rule(m, 32).iter().map(|p| p.1).sum::<f64>();
        assert!((area(1) - 2.0).abs() < 1e-14);
        assert!((area(2) - 2.0 * PI).abs() < 1e-12);
        assert!((area(3) - 4.0 * PI).abs() < 1e-12);
        assert!((area(4) - 2.0 * PI * PI).abs() < 1e-11);
    }

    #[test]
    fn rotation_to_hits_target() {
        for n in [vec![0.6, 0.8], vec![-1.0, 0.0], vec![0.0, -1.0]] {
            let r = rotation_to(2, 1, &n);
            let img = [r[1], r[3]];
            assert!((img[0] - n[0]).abs() < 1e-14 && (img[1] - n[1]).abs() < 1e-14);
        }
        let n = [0.36, 0.48, 0.8];
        let r = rotation_to(3, 2, &n);
        for i in 0..3 {
            assert!((r[i * 3 + 2] - n[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn atlas_partition_sums_to_one() {
        for rho in [1.0, -1.0] {
            let atlas = Atlas::band(form(), rho).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..300 {
                let xi = atlas.random_band_point(&mut rng);
                let s: f64 = (0..atlas.charts.len()).map(|c| atlas.weight(c, &xi)).sum();
                assert!((s - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mollified_single_modes() {
        let g = Grid::cubic(3, 16, 8.0).unwrap();
        let f = form();
        // Q(0, 0, 3/4) = 9/16 on the shell; Q(1/4, 0, 1/2) = 3/16
        for (target, gap) in [([0.0, 0.0, 0.75], 0.0), ([0.25, 0.0, 0.5], -0.375)] {
            let u = SampledField::from_physical(g.clone(), |x| {
                Complex64::cis(2.0 * PI * x.iter().zip(&target).map(|(a, b)| a * b).sum::<f64>())
            });
            let eps = 0.01;
            let out = restrict_extend_mollified(&u, &f, 0.5625, eps).unwrap();
            let factor = poisson(gap, eps);
            for (a, b) in out.values().iter().zip(u.values()) {
                assert!((a - b * factor).norm() < 1e-10 * factor.max(1.0));
            }
        }
        assert!((poisson(0.0, 0.01) - 1.0 / (PI * 0.01)).abs() < 1e-9);
    }

    #[test]
    fn oscillatory_integral_at_origin_is_cutoff_mass() {
        let chart = GraphChart::new(form(), 1.0).unwrap();
        let c = OscillatoryCubature::default();
        let v = oscillatory_i(&[0.0, 0.0, 0.0], &chart, &c).unwrap();
        let mass = quadrature::integrate(1.0, 2.0, 64, |a| {
            quadrature::integrate(-1.0, 1.0, 64, |b| chart.cutoff_at(&[a, b]))
        });
        assert!((v.re - mass).abs() < 1e-10 && v.im.abs() < 1e-12 && v.re > 0.0);
    }
}
