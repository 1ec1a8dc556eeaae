//! Explicit counterexample families: the scaled slab `g_lambda`, the Knapp cap, the
//! stationary-phase bump and the cone kernel `K`, each with its geometry and an evaluator
//! for the extension operator.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dyadic_decomp::{base_bump, cosine_transform, ChebTable};
use crate::error::{Error, Result};
use crate::field::{Axis, Grid, SampledField, Space};
use crate::quadform::{ChartDomain, GraphChart, QuadraticForm};
use crate::quadrature::{self, OscillatoryCubature, PANEL_ORDER};
use crate::regression::{fit_loglog, LinearFit};
use crate::surface_ops;

/// Default cap on grid points per field.
pub const MEMORY_BUDGET: usize = 1 << 24;

/// The profile `phi` supported in `[-1/4, 1/4]`.
#[inline]
pub fn profile(t: f64) -> f64 {
    base_bump(4.0 * t)
}

/// Box `prod [lo_i, hi_i]`.
pub type BoxSet = Vec<(f64, f64)>;

pub fn box_volume(b: &[(f64, f64)]) -> f64 {
    b.iter().map(|(lo, hi)| hi - lo).product()
}

/// Gauss-Legendre tensor nodes on a box, `per_axis` nodes each.
pub fn box_nodes(b: &[(f64, f64)], per_axis: usize) -> Vec<(Vec<f64>, f64)> {
    let rule = quadrature::gl_rule(per_axis);
    let total = per_axis.pow(b.len() as u32);
    (0..total)
        .map(|idx| {
            let mut r = idx;
            let mut w = 1.0;
            let x = b
                .iter()
                .map(|&(lo, hi)| {
                    let (t, wt) = rule[r % per_axis];
                    r /= per_axis;
                    w *= 0.5 * (hi - lo) * wt;
                    0.5 * (lo + hi) + 0.5 * (hi - lo) * t
                })
                .collect();
            (x, w)
        })
        .collect()
}

fn check_budget(axes: &[Axis]) -> Result<()> {
    let points: usize = axes.iter().map(|a| a.n).product();
    if points > MEMORY_BUDGET {
        return Err(Error::MemoryBudget {
            points,
            budget: MEMORY_BUDGET,
        });
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must lie in (0, 1)")));
    }
    Ok(())
}

/// `g_lambda` with `g_hat(eta) = phi(lambda^2 (eta_1 - lambda^{-2})) phi(eta_d)
/// prod phi(lambda eta_j)` in graph coordinates, extended through `{Q = rho}`.
#[derive(Debug, Clone)]
pub struct GLambda {
    pub form: QuadraticForm,
    pub lambda: f64,
    pub rho: f64,
}

impl GLambda {
    pub fn new(form: QuadraticForm, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self { form, lambda, rho: 1.0 })
    }

    /// `g_hat` at a graph-coordinate frequency.
    pub fn spectrum(&self, eta: &[f64]) -> f64 {
        let d = eta.len();
        let l = self.lambda;
        let mut v = profile(l * l * (eta[0] - 1.0 / (l * l))) * profile(eta[d - 1]);
        for e in &eta[1..d - 1] {
            if v == 0.0 {
                break;
            }
            v *= profile(l * e);
        }
        v
    }

    /// `R_lambda`.
    pub fn r_box(&self) -> BoxSet {
        let (d, l) = (self.form.d(), self.lambda);
        let mut b = vec![(1.0 / (l * l) - 0.25 / (l * l), 1.0 / (l * l) + 0.25 / (l * l))];
        b.extend(std::iter::repeat_n((-0.25 / l, 0.25 / l), d - 2));
        b.push((-0.25, 0.25));
        b
    }

    /// `R'_lambda`, where `|E g_lambda| >~ lambda^2 |R_lambda|`.
    pub fn r_prime(&self) -> BoxSet {
        let (d, l) = (self.form.d(), self.lambda);
        let df = d as f64;
        let mut b = vec![(-l * l / (125.0 * df), l * l / (125.0 * df))];
        b.extend(std::iter::repeat_n((-l / (25.0 * df), l / (25.0 * df)), d - 2));
        b.push((-1.0 / (20.0 * df), 1.0 / (20.0 * df)));
        b
    }

    /// Per-axis grid whose frequency window is twice `R_lambda`.
    pub fn grid(&self, n: usize) -> Result<Grid> {
        let axes: Vec<Axis> = self
            .r_box()
            .iter()
            .map(|&(lo, hi)| Axis::new(n, n as f64 / (2.0 * (hi - lo))).with_carrier(0.5 * (lo + hi)))
            .collect();
        check_budget(&axes)?;
        Grid::new(axes)
    }

    /// The field in frequency space.
    pub fn field(&self, n: usize) -> Result<SampledField> {
        Ok(SampledField::from_frequency(self.grid(n)?, |eta| Complex64::new(self.spectrum(eta), 0.0)))
    }

    fn chart(&self) -> Result<GraphChart> {
        let b = self.r_box();
        GraphChart::with_domain(
            self.form,
            self.rho,
            ChartDomain {
                eta1: b[0],
                r_prime: f64::INFINITY,
                r_second: f64::INFINITY,
            },
        )
    }

    /// `int e^{2 pi i (x~ . eta~ + x_d G)} g_hat(eta~, G(eta~)) d eta~ / (2 eta_1)`.
    pub fn extension_at(&self, x: &[f64], cubature: &OscillatoryCubature) -> Result<Complex64> {
        let chart = self.chart()?;
        let d = self.form.d();
        let domain = &self.r_box()[..d - 1];
        let xd = x[d - 1];
        let phase = |et: &[f64]| x.iter().zip(et).map(|(a, b)| a * b).sum::<f64>() + xd * chart.height(et);
        let amp = |et: &[f64]| Complex64::new(self.spectrum(&chart.eta_point(et)) * chart.density(et), 0.0);
        Ok(cubature.integrate(domain, phase, amp)?.value)
    }
}

/// The Knapp cap `f_hat(xi) = phi(lambda^{-2}(xi_d - 1)) prod phi(lambda^{-1} xi_j)`
/// near `(0, ..., 0, 1)` on `{Q = 1}`.
#[derive(Debug, Clone)]
pub struct Knapp {
    pub form: QuadraticForm,
    pub lambda: f64,
    /// Size of the dual box in units of `lambda^{-1}`, `lambda^{-2}`.
    pub c: f64,
}

impl Knapp {
    pub fn new(form: QuadraticForm, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self { form, lambda, c: 0.01 })
    }

    pub fn spectrum(&self, xi: &[f64]) -> f64 {
        let d = xi.len();
        let l = self.lambda;
        let mut v = profile((xi[d - 1] - 1.0) / (l * l));
        for x in &xi[..d - 1] {
            if v == 0.0 {
                break;
            }
            v *= profile(x / l);
        }
        v
    }

    /// Frequency support box in `xi`.
    pub fn support(&self) -> BoxSet {
        let (d, l) = (self.form.d(), self.lambda);
        let mut b = vec![(-0.25 * l, 0.25 * l); d - 1];
        b.push((1.0 - 0.25 * l * l, 1.0 + 0.25 * l * l));
        b
    }

    /// `{|x_j| <= c / lambda, |x_d| <= c / lambda^2}`.
    pub fn dual_box(&self) -> BoxSet {
        let (d, l, c) = (self.form.d(), self.lambda, self.c);
        let mut b = vec![(-c / l, c / l); d - 1];
        b.push((-c / (l * l), c / (l * l)));
        b
    }

    pub fn grid(&self, n: usize) -> Result<Grid> {
        let axes: Vec<Axis> = self
            .support()
            .iter()
            .map(|&(lo, hi)| Axis::new(n, n as f64 / (2.0 * (hi - lo))).with_carrier(0.5 * (lo + hi)))
            .collect();
        check_budget(&axes)?;
        Grid::new(axes)
    }

    pub fn field(&self, n: usize) -> Result<SampledField> {
        Ok(SampledField::from_frequency(self.grid(n)?, |xi| Complex64::new(self.spectrum(xi), 0.0)))
    }

    /// `int delta(Q - 1) e^{2 pi i x . xi} f_hat(xi) d xi` through a chart fitted to the cap.
    pub fn extension_at(&self, x: &[f64], cubature: &OscillatoryCubature) -> Result<Complex64> {
        cap_extension(&self.form, &self.support(), &|xi| self.spectrum(xi), x, cubature)
    }
}

/// Graph-coordinate box over which a cap with the given `xi` support box lives on `{Q = 1}`.
fn cap_domain(form: &QuadraticForm, support: &[(f64, f64)]) -> BoxSet {
    let d = form.d();
    let (x1, xd) = (support[0], support[d - 1]);
    let mut b = vec![((x1.0 + xd.0) * FRAC_1_SQRT_2, (x1.1 + xd.1) * FRAC_1_SQRT_2)];
    b.extend(support[1..d - 1].iter().copied());
    b
}

fn cap_extension(
    form: &QuadraticForm,
    support: &[(f64, f64)],
    spectrum: &(dyn Fn(&[f64]) -> f64 + Sync),
    x: &[f64],
    cubature: &OscillatoryCubature,
) -> Result<Complex64> {
    let domain = cap_domain(form, support);
    let chart = GraphChart::with_domain(
        *form,
        1.0,
        ChartDomain {
            eta1: domain[0],
            r_prime: f64::INFINITY,
            r_second: f64::INFINITY,
        },
    )?;
    let phase = |et: &[f64]| {
        let xi = chart.point(et);
        x.iter().zip(&xi).map(|(a, b)| a * b).sum::<f64>()
    };
    let amp = |et: &[f64]| Complex64::new(spectrum(&chart.point(et)) * chart.density(et), 0.0);
    Ok(cubature.integrate(&domain, phase, amp)?.value)
}

/// A fixed bump near `(0, ..., 0, 1)`; its extension decays like `|x_d|^{-(d-1)/2}` in the
/// cone of normals.
#[derive(Debug, Clone)]
pub struct Stationary {
    pub form: QuadraticForm,
    /// Half-width of the cap in each coordinate.
    pub radius: f64,
}

impl Stationary {
    pub fn new(form: QuadraticForm) -> Self {
        Self { form, radius: 0.125 }
    }

    pub fn spectrum(&self, xi: &[f64]) -> f64 {
        let d = xi.len();
        let s = 0.25 / self.radius;
        let mut v = profile(s * (xi[d - 1] - 1.0));
        for x in &xi[..d - 1] {
            v *= profile(s * x);
        }
        v
    }

    pub fn support(&self) -> BoxSet {
        let r = self.radius;
        let mut b = vec![(-r, r); self.form.d() - 1];
        b.push((1.0 - r, 1.0 + r));
        b
    }

    pub fn grid(&self, n: usize, length: f64) -> Result<Grid> {
        let axes: Vec<Axis> = self
            .support()
            .iter()
            .map(|&(lo, hi)| Axis::new(n, length).with_carrier(0.5 * (lo + hi)))
            .collect();
        check_budget(&axes)?;
        Grid::new(axes)
    }

    pub fn field(&self, n: usize, length: f64) -> Result<SampledField> {
        Ok(SampledField::from_frequency(self.grid(n, length)?, |xi| Complex64::new(self.spectrum(xi), 0.0)))
    }

    /// `E f(x)` with `x` in `xi`-dual coordinates.
    pub fn extension_at(&self, x: &[f64], cubature: &OscillatoryCubature) -> Result<Complex64> {
        // the surface over the cap stays within ~radius^2 of xi_d = 1
        let mut support = self.support();
        let d = self.form.d();
        support[d - 1] = (1.0 - self.radius * self.radius, 1.0 + self.radius * self.radius);
        cap_extension(&self.form, &support, &|xi| self.spectrum(xi), x, cubature)
    }

    /// Chart over the cap and the center of the cap in chart coordinates.
    pub fn chart(&self) -> Result<(GraphChart, Vec<f64>)> {
        let mut support = self.support();
        let d = self.form.d();
        support[d - 1] = (1.0 - self.radius * self.radius, 1.0 + self.radius * self.radius);
        let domain = cap_domain(&self.form, &support);
        let chart = GraphChart::with_domain(
            self.form,
            1.0,
            ChartDomain {
                eta1: domain[0],
                r_prime: f64::INFINITY,
                r_second: f64::INFINITY,
            },
        )?;
        let mut center = vec![0.0; d - 1];
        center[0] = FRAC_1_SQRT_2;
        Ok((chart, center))
    }

    /// Chart density `f_hat(xi(eta~)) / (2 eta_1)` on a `(d-1)`-dimensional grid of chart
    /// coordinates centered on the cap.
    pub fn chart_density(&self, n: usize, length: f64) -> Result<(GraphChart, SampledField)> {
        let (chart, center) = self.chart()?;
        let axes: Vec<Axis> = center.iter().map(|&c| Axis::new(n, length).with_carrier(c)).collect();
        check_budget(&axes)?;
        let grid = Grid::new(axes)?;
        let width = n as f64 / length;
        if width < 4.0 * self.radius {
            return Err(Error::InvalidParameter(format!(
                "frequency window {width} does not contain the cap"
            )));
        }
        let field = SampledField::from_frequency(grid, |et| {
            if et[0] <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(self.spectrum(&chart.point(et)) * chart.density(et), 0.0)
        });
        Ok((chart, field))
    }
}

/// Masses `int_{T_j <= x_d <= 2 T_j} int |E f|^q dx~ dx_d` over dyadic shells, from FFT
/// slices at Gauss-Legendre nodes in `x_d` (chart coordinates, comoving frame).
pub fn shell_masses(
    density: &SampledField,
    chart: &GraphChart,
    center: &[f64],
    shells: &[f64],
    qs: &[f64],
    nodes_per_shell: usize,
) -> Result<Vec<Vec<f64>>> {
    let frame = chart.height_gradient(center);
    let cell_x = density.grid().cell_volume();
    let rule = quadrature::gl_rule(nodes_per_shell);
    shells
        .par_iter()
        .map(|&t0| {
            let mut masses = vec![0.0; qs.len()];
            for &(s, w) in rule.iter() {
                let t = t0 * (1.5 + 0.5 * s);
                let slice = surface_ops::graph_evolution(density, chart, t, Some(&frame))?;
                for (m, &q) in masses.iter_mut().zip(qs) {
                    let sum: f64 = slice.values().iter().map(|v| v.norm().powf(q)).sum();
                    *m += 0.5 * t0 * w * sum * cell_x;
                }
            }
            Ok(masses)
        })
        .collect()
}

/// Fitted growth exponent of shell masses.
pub fn shell_exponent(shells: &[f64], masses: &[f64]) -> LinearFit {
    fit_loglog(shells, masses)
}

/// Fourier transform of the base bump, `B_hat(s) = int b(t) e^{-2 pi i s t} dt`.
pub fn bump_fourier(s: f64) -> f64 {
    static TABLE: OnceLock<ChebTable> = OnceLock::new();
    const END: f64 = 96.0;
    let s = s.abs();
    if s >= END {
        return 0.0;
    }
    TABLE
        .get_or_init(|| ChebTable::build(END, 0.5, |s| 2.0 * cosine_transform(0.0, 1.0, s, base_bump)))
        .eval(s)
}

/// Autocorrelation `(b_w * b_w)(t)` of `b_w(t) = b(t / w)`, supported in `[-2w, 2w]`.
#[derive(Debug, Clone)]
pub struct Autocorrelation {
    pub w: f64,
    pub scale: f64,
    table: Arc<ChebTable>,
}

impl Autocorrelation {
    pub fn new(w: f64, scale: f64) -> Self {
        // (b*b)(t) = w int b(s) b(s - t / w) ds
        let table = ChebTable::build(2.0, 1.0 / 32.0, |u| {
            let lo = (u - 1.0).max(-1.0);
            if lo >= 1.0 {
                return 0.0;
            }
            let split = 0.5 * (lo + 1.0);
            quadrature::integrate(lo, split, 8, |s| base_bump(s) * base_bump(s - u))
                + quadrature::integrate(split, 1.0, 8, |s| base_bump(s) * base_bump(s - u))
        });
        Self {
            w,
            scale,
            table: Arc::new(table),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = (t / self.w).abs();
        if u >= 2.0 {
            return 0.0;
        }
        self.scale * self.w * self.table.eval(u)
    }

    /// Fourier transform `scale (w B_hat(w s))^2`, nonnegative.
    pub fn fourier(&self, s: f64) -> f64 {
        let b = self.w * bump_fourier(self.w * s);
        self.scale * b * b
    }
}

/// The cone kernel
/// `K(x) = int e^{2 pi i (x~ . eta~ + x_d (|eta'|^2 - |eta''|^2) / (2 eta_1))}
/// phi_1(eta_1) phi_2(eta') phi_3(eta'') d eta~`
/// with `phi_1(t) = t^{-(d-2)/2} phi(t - 1)` and tensor autocorrelations for `phi_2, phi_3`.
#[derive(Debug, Clone)]
pub struct ConeKernel {
    pub form: QuadraticForm,
    /// Aperture: `phi_2, phi_3` are supported in balls of radius `M / 2`.
    pub aperture: f64,
    pub phi: Autocorrelation,
    pub phi_transverse: Autocorrelation,
    /// Radius beyond which `phi_hat_2 phi_hat_3` carries at most 1% of its mass.
    pub lambda: f64,
    /// `B = int phi_hat_2 phi_hat_3`.
    pub mass: f64,
}

impl ConeKernel {
    pub fn new(form: QuadraticForm, aperture: f64) -> Result<Self> {
        if !(aperture > 0.0) {
            return Err(Error::InvalidParameter(format!("aperture {aperture} must be positive")));
        }
        let w = 0.004;
        let probe = Autocorrelation::new(w, 1.0);
        let phi = Autocorrelation::new(w, 1.5 / probe.fourier(0.0));
        let phi_transverse = Autocorrelation::new(aperture / 4.0, 1.0);
        let mut kernel = Self {
            form,
            aperture,
            phi,
            phi_transverse,
            lambda: 0.0,
            mass: 0.0,
        };
        let m = kernel.transverse_dim();
        let reach = kernel.transverse_reach();
        let radial = |r_max: f64| -> f64 {
            // mass of the tensor density inside the ball of radius r_max
            let b = vec![(-reach, reach); m];
            box_nodes(&b, 48)
                .iter()
                .filter(|(y, _)| y.iter().map(|v| v * v).sum::<f64>() <= r_max * r_max)
                .map(|(y, w)| w * kernel.transverse_fourier(y))
                .sum()
        };
        let total = radial(f64::INFINITY);
        let (mut lo, mut hi) = (0.0, reach * (m as f64).sqrt());
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if total - radial(mid) <= 1e-2 * total {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        kernel.lambda = hi;
        kernel.mass = total;
        Ok(kernel)
    }

    /// `d - 2`, the number of transverse coordinates `(eta', eta'')`.
    pub fn transverse_dim(&self) -> usize {
        self.form.d() - 2
    }

    /// Half-width of the box carrying the transverse Fourier density.
    pub fn transverse_reach(&self) -> f64 {
        20.0 / self.phi_transverse.w
    }

    /// `phi_hat_2(y) phi_hat_3(z)` at the concatenated point.
    pub fn transverse_fourier(&self, y: &[f64]) -> f64 {
        y.iter().map(|v| self.phi_transverse.fourier(*v)).product()
    }

    fn transverse(&self, eta: &[f64]) -> f64 {
        eta.iter().map(|v| self.phi_transverse.eval(*v)).product()
    }

    /// `phi_1(eta_1)`.
    pub fn phi1(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        t.powf(-0.5 * self.transverse_dim() as f64) * self.phi.eval(t - 1.0)
    }

    /// `(|eta'|^2 - |eta''|^2)` for transverse coordinates.
    fn split_square(&self, v: &[f64]) -> f64 {
        let k = self.form.k();
        let a: f64 = v[..k - 1].iter().map(|t| t * t).sum();
        let b: f64 = v[k - 1..].iter().map(|t| t * t).sum();
        a - b
    }

    /// Direct quadrature of the defining integral.
    pub fn direct(&self, x: &[f64], cubature: &OscillatoryCubature) -> Result<Complex64> {
        let d = self.form.d();
        let half = 2.0 * self.phi_transverse.w;
        let mut domain = vec![(1.0 - 2.0 * self.phi.w, 1.0 + 2.0 * self.phi.w)];
        domain.extend(std::iter::repeat_n((-half, half), d - 2));
        let xd = x[d - 1];
        let phase = |et: &[f64]| {
            x.iter().zip(et).map(|(a, b)| a * b).sum::<f64>() + xd * self.split_square(&et[1..]) / (2.0 * et[0])
        };
        let amp = |et: &[f64]| Complex64::new(self.phi1(et[0]) * self.transverse(&et[1..]), 0.0);
        Ok(cubature.integrate(&domain, phase, amp)?.value)
    }

    /// `|K(x)| = |x_d|^{-(d-2)/2} |I(x)|` with
    /// `I(x) = int phi_hat_2(y) phi_hat_3(z) phi_hat(-x_1 + (|y + x'|^2 - |z + x''|^2)/(2 x_d))
    /// e^{-2 pi i (2 x' . y - 2 x'' . z + |y|^2 - |z|^2) / (2 x_d)} dy dz`.
    pub fn reduced_modulus(&self, x: &[f64], nodes: usize) -> f64 {
        let d = self.form.d();
        let m = self.transverse_dim();
        let xd = x[d - 1];
        let xt = &x[1..d - 1];
        let reach = self.transverse_reach();
        let k = self.form.k();
        let axis = quadrature::composite_nodes(-reach, reach, nodes.div_ceil(PANEL_ORDER), PANEL_ORDER);
        let total = axis.len().pow(m as u32);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut y = vec![0.0; m];
        for idx in 0..total {
            let mut r = idx;
            let mut w = 1.0;
            for v in y.iter_mut() {
                let (t, wt) = axis[r % axis.len()];
                *v = t;
                w *= wt;
                r /= axis.len();
            }
            let dens = self.transverse_fourier(&y);
            if dens == 0.0 {
                continue;
            }
            let shifted: Vec<f64> = y.iter().zip(xt).map(|(a, b)| a + b).collect();
            let arg = -x[0] + self.split_square(&shifted) / (2.0 * xd);
            let lin: f64 = (0..m)
                .map(|i| if i < k - 1 { 2.0 * xt[i] * y[i] } else { -2.0 * xt[i] * y[i] })
                .sum();
            let ph = -(lin + self.split_square(&y)) / (2.0 * xd);
            acc += Complex64::cis(2.0 * PI * ph) * (w * dens * self.phi.fourier(arg));
        }
        xd.abs().powf(-0.5 * m as f64) * acc.norm()
    }

    /// Center of `U_lambda` in `x_1` at transverse position `xt`.
    pub fn u_center(&self, xt: &[f64], xd: f64) -> f64 {
        self.split_square(xt) / (2.0 * xd)
    }

    /// Transverse half-width of `U_lambda` at height `x_d`.
    pub fn u_halfwidth(&self, xd: f64) -> f64 {
        1e-3 * xd / (self.lambda * self.lambda)
    }

    /// Smallest `x_d` in `U_lambda`.
    pub fn u_floor(&self) -> f64 {
        1e3 * self.lambda * self.lambda
    }

    /// Whether `x` lies in `U_lambda`.
    pub fn in_u(&self, x: &[f64]) -> bool {
        let d = self.form.d();
        let xd = x[d - 1];
        if xd < self.u_floor() {
            return false;
        }
        let xt = &x[1..d - 1];
        let k = self.form.k();
        let a: f64 = xt[..k - 1].iter().map(|t| t * t).sum::<f64>().sqrt();
        let b: f64 = xt[k - 1..].iter().map(|t| t * t).sum::<f64>().sqrt();
        let hw = self.u_halfwidth(xd);
        (x[0] - self.u_center(xt, xd)).abs() <= 0.5 && a <= hw && b <= hw
    }

    /// `int_{U_lambda, T <= x_d <= 2T} |K|^q` for each `T` and `q`, with `x_1` measured from
    /// the center of `U_lambda` and the transverse box `[-w, w]^{d-2}` (the ball condition
    /// on each block is enforced by the integrand).
    pub fn shell_masses(&self, shells: &[f64], qs: &[f64], nodes: usize) -> Vec<Vec<f64>> {
        let d = self.form.d();
        let m = self.transverse_dim();
        let rule_u = quadrature::gl_rule(8);
        let rule_t = quadrature::gl_rule(12);
        shells
            .par_iter()
            .map(|&t0| {
                let mut masses = vec![0.0; qs.len()];
                for &(s, ws) in rule_t.iter() {
                    let xd = t0 * (1.5 + 0.5 * s);
                    let hw = self.u_halfwidth(xd);
                    let b = vec![(-hw, hw); m];
                    for (xt, wt) in box_nodes(&b, 12) {
                        for &(u, wu) in rule_u.iter() {
                            let mut x = vec![0.0; d];
                            x[1..d - 1].copy_from_slice(&xt);
                            x[d - 1] = xd;
                            x[0] = self.u_center(&xt, xd) + 0.5 * u;
                            if !self.in_u(&x) {
                                continue;
                            }
                            let k = self.reduced_modulus(&x, nodes);
                            for (mass, &q) in masses.iter_mut().zip(qs) {
                                *mass += 0.5 * t0 * ws * wt * 0.5 * wu * k.powf(q);
                            }
                        }
                    }
                }
                masses
            })
            .collect()
    }
}

/// `lambda` sequence `2^{-a}, ..., 2^{-b}`.
pub fn dyadic_lambdas(a: i32, b: i32) -> Vec<f64> {
    (a..=b).map(|j| 2f64.powi(-j)).collect()
}

/// `|E| <= ...` samples over a box: values at tensor Gauss nodes.
pub fn sample_box<F>(b: &[(f64, f64)], per_axis: usize, f: F) -> Result<Vec<(Vec<f64>, f64, Complex64)>>
where
    F: Fn(&[f64]) -> Result<Complex64> + Sync,
{
    box_nodes(b, per_axis)
        .into_par_iter()
        .map(|(x, w)| {
            let v = f(&x)?;
            Ok((x, w, v))
        })
        .collect()
}

/// `(int_box |v|^q)^{1/q}` from [`sample_box`] output.
pub fn box_lq(samples: &[(Vec<f64>, f64, Complex64)], q: f64) -> f64 {
    samples.iter().map(|(_, w, v)| w * v.norm().powf(q)).sum::<f64>().powf(1.0 / q)
}

/// Physical-space `L^p` norm of a frequency-space field.
pub fn physical_lp(field: &SampledField, p: f64) -> Result<f64> {
    match field.space() {
        Space::Physical => field.lp_norm(p),
        Space::Frequency => field.inv_fourier()?.lp_norm(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form() -> QuadraticForm {
        QuadraticForm::new(3, 1).unwrap()
    }

    #[test]
    fn glambda_support_and_boxes() {
        let g = GLambda::new(form(), 0.25).unwrap();
        let r = g.r_box();
        assert_eq!(r[0], (12.0, 20.0));
        assert_eq!(r[1], (-1.0, 1.0));
        assert!(g.spectrum(&[16.0, 0.0, 0.0]) > 0.0);
        assert_eq!(g.spectrum(&[20.5, 0.0, 0.0]), 0.0);
        assert_eq!(g.spectrum(&[16.0, 1.01, 0.0]), 0.0);
        assert!(GLambda::new(form(), 1.5).is_err());
    }

    #[test]
    fn glambda_norm_scaling_is_exact() {
        // the grid is rescaled with lambda, so the p-norm scales as lambda^{-d + d/p}
        let p = 1.5;
        let ls = [0.25, 0.125, 0.0625];
        let norms: Vec<f64> = ls
            .iter()
            .map(|&l| physical_lp(&GLambda::new(form(), l).unwrap().field(32).unwrap(), p).unwrap())
            .collect();
        let fit = fit_loglog(&ls, &norms);
        assert!((fit.slope - (-3.0 + 3.0 / p)).abs() < 1e-6, "{}", fit.slope);
    }

    #[test]
    fn bump_fourier_matches_quadrature() {
        for s in [0.0, 0.3, 2.0, 7.5] {
            let direct = quadrature::integrate(-1.0, 1.0, 64, |t| base_bump(t) * (2.0 * PI * s * t).cos());
            assert!((bump_fourier(s) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn autocorrelation_transform_pair() {
        let a = Autocorrelation::new(0.5, 2.0);
        for s in [0.0, 0.4, 1.3] {
            let direct = quadrature::integrate(-1.0, 1.0, 64, |t| a.eval(t) * (2.0 * PI * s * t).cos());
            assert!((a.fourier(s) - direct).abs() < 1e-10, "{s}");
            assert!(a.fourier(s) >= 0.0);
        }
        assert_eq!(a.eval(1.0), 0.0);
    }

    #[test]
    fn cone_profile_conditions() {
        let k = ConeKernel::new(form(), 8.0).unwrap();
        for i in 0..=100 {
            let t = -1.0 + 0.02 * i as f64;
            let v = k.phi.fourier(t);
            assert!((1.0..=2.0).contains(&v));
        }
        for i in 0..200 {
            let t = 0.5 * i as f64;
            assert!((0.0..=2.0).contains(&k.phi.fourier(t)));
            assert!(k.phi_transverse.fourier(t) >= 0.0);
        }
        assert_eq!(k.phi_transverse.eval(4.0), 0.0);
        assert!(k.lambda > 0.0 && k.mass > 0.0);
    }

    #[test]
    fn cone_reduced_formula_matches_direct() {
        let k = ConeKernel::new(form(), 8.0).unwrap();
        let c = OscillatoryCubature::default().with_tolerance(1e-8);
        for x in [[0.3, 0.5, 20.0], [-0.2, 1.5, 40.0], [0.0, 0.0, 30.0]] {
            let direct = k.direct(&x, &c).unwrap().norm();
            let reduced = k.reduced_modulus(&x, 256);
            assert!((direct - reduced).abs() < 1e-6 * direct.max(1e-3), "{x:?}: {direct} vs {reduced}");
        }
    }

    #[test]
    fn knapp_extension_is_flat_near_origin() {
        let f = Knapp::new(form(), 0.25).unwrap();
        let c = OscillatoryCubature::default();
        let e0 = f.extension_at(&[0.0, 0.0, 0.0], &c).unwrap();
        // at x = 0 the extension is the surface mass of f_hat
        assert!(e0.im.abs() < 1e-12 && e0.re > 0.0);
        let corner: Vec<f64> = f.dual_box().iter().map(|b| b.1).collect();
        let e1 = f.extension_at(&corner, &c).unwrap();
        assert!((e1.norm() / e0.norm() - 1.0).abs() < 0.05);
    }
}
