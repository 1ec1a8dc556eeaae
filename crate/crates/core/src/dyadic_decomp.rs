//! Bump functions and the dyadic decompositions of the delta distribution and of
//! the principal value of `1/x`.
//!
//! `psi_delta` is the Fourier transform of a dyadic partition `phi`, and `psi_pv`
//! is `varphi(x)/x` with `varphi(x) = phi_pv(x/2) - phi_pv(x)`. Both are tabulated
//! once by piecewise Chebyshev interpolation on `[0, X_MAX]` and vanish beyond it.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::quadrature;

/// Physical-space extent of the interpolation tables for `phi_pv` and `psi_pv`.
pub const X_MAX: f64 = 128.0;
/// Extent for `psi_delta`, whose transform `phi` has steeper transitions.
pub const X_MAX_DELTA: f64 = 256.0;
const PANEL_WIDTH: f64 = 0.5;
const CHEB_DEGREE: usize = 24;

/// `exp(-1/(1-t^2))` on `(-1, 1)`, zero elsewhere.
pub fn base_bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`, with `H(1-t) = 1 - H(t)`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Bump on `[-1, 1]` with `sum_j S(t - j) = 1`.
pub fn partition_bump(t: f64) -> f64 {
    smooth_step(t + 1.0) - smooth_step(t)
}

/// Cutoff on the chart domain: a product of a bump in `eta_1` centred at 3/2 and
/// radial bumps in the `eta'` and `eta''` blocks, all scaled to `scale` of the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartCutoff {
    pub scale: f64,
}

impl Default for ChartCutoff {
    fn default() -> Self {
        Self { scale: 0.9 }
    }
}

impl ChartCutoff {
    /// Evaluates at `eta_tilde = (eta_1, eta', eta'')` where `eta'` has `k - 1` entries.
    pub fn eval(&self, eta_tilde: &[f64], k: usize) -> f64 {
        let s = self.scale;
        let e1 = base_bump((eta_tilde[0] - 1.5) / (0.5 * s));
        if e1 == 0.0 {
            return 0.0;
        }
        let split = k.min(eta_tilde.len());
        let r1: f64 = eta_tilde[1..split].iter().map(|v| v * v).sum::<f64>().sqrt();
        let r2: f64 = eta_tilde[split..].iter().map(|v| v * v).sum::<f64>().sqrt();
        e1 * base_bump(r1 / s) * base_bump(r2 / s)
    }

    /// Bounding box of the support in `d - 1` coordinates.
    pub fn support_box(&self, dim: usize) -> Vec<(f64, f64)> {
        let s = self.scale;
        let mut b = vec![(1.5 - 0.5 * s, 1.5 + 0.5 * s)];
        b.extend(std::iter::repeat_n((-s, s), dim.saturating_sub(1)));
        b
    }
}

/// Piecewise Chebyshev interpolant on `[0, b]`.
#[derive(Debug, Clone)]
pub struct ChebTable {
    width: f64,
    coeffs: Vec<[f64; CHEB_DEGREE]>,
    end: f64,
}

impl ChebTable {
    pub fn build(end: f64, width: f64, f: impl Fn(f64) -> f64) -> Self {
        let panels = (end / width).ceil() as usize;
        let n = CHEB_DEGREE;
        let nodes: Vec<f64> = (0..n).map(|k| (PI * (k as f64 + 0.5) / n as f64).cos()).collect();
        let coeffs = (0..panels)
            .map(|p| {
                let lo = p as f64 * width;
                let vals: Vec<f64> = nodes.iter().map(|&t| f(lo + 0.5 * width * (t + 1.0))).collect();
                let mut c = [0.0; CHEB_DEGREE];
                for (j, cj) in c.iter_mut().enumerate() {
                    let s: f64 = vals
                        .iter()
                        .enumerate()
                        .map(|(k, v)| v * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos())
                        .sum();
                    *cj = 2.0 * s / n as f64;
                }
                c[0] *= 0.5;
                c
            })
            .collect();
        Self {
            width,
            coeffs,
            end: panels as f64 * width,
        }
    }

    /// Value at `x >= 0`; zero beyond the table.
    pub fn eval(&self, x: f64) -> f64 {
        if !(x < self.end) {
            return 0.0;
        }
        let p = ((x / self.width) as usize).min(self.coeffs.len() - 1);
        let t = 2.0 * (x - p as f64 * self.width) / self.width - 1.0;
        let c = &self.coeffs[p];
        let (mut b1, mut b2) = (0.0, 0.0);
        for &cj in c.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + cj;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + c[0]
    }

    /// Largest coefficient magnitude on the last `panels` panels, a bound for the truncated tail.
    pub fn tail_level(&self, panels: usize) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .take(panels)
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// `int_lo^hi g(s) cos(2 pi x s) ds` with about one oscillation per panel.
pub(crate) fn cosine_transform(lo: f64, hi: f64, x: f64, g: impl Fn(f64) -> f64) -> f64 {
    let panels = 16 + (x.abs() * (hi - lo)).ceil() as usize;
    quadrature::integrate(lo, hi, panels, |s| g(s) * (2.0 * std::f64::consts::PI * x * s).cos())
}

/// The fixed bump functions of the construction.
#[derive(Debug)]
pub struct BumpKit {
    chi_norm: f64,
    /// `X(t) = int_{-inf}^t chi` on `[1, 2]`.
    chi_cumulative: ChebTable,
    phi_pv: ChebTable,
    pub cutoff: ChartCutoff,
}

impl BumpKit {
    pub fn new() -> Self {
        let raw = |s: f64| {
            if s <= 1.0 || s >= 2.0 {
                0.0
            } else {
                (-1.0 / ((s - 1.0) * (2.0 - s))).exp()
            }
        };
        let mass = quadrature::integrate(1.0, 2.0, 128, raw);
        let chi_norm = 0.5 / mass;
        let chi_cumulative = ChebTable::build(1.0, 1.0 / 64.0, |u| {
            chi_norm * quadrature::integrate(1.0, 1.0 + u, 8, raw)
        });
        let phi_pv = ChebTable::build(X_MAX, PANEL_WIDTH, |x| {
            2.0 * cosine_transform(1.0, 2.0, x, |s| chi_norm * raw(s))
        });
        Self {
            chi_norm,
            chi_cumulative,
            phi_pv,
            cutoff: ChartCutoff::default(),
        }
    }

    /// Shared instance; construction tabulates several oscillatory integrals.
    pub fn shared() -> Arc<BumpKit> {
        static KIT: OnceLock<Arc<BumpKit>> = OnceLock::new();
        KIT.get_or_init(|| Arc::new(BumpKit::new())).clone()
    }

    /// Dyadic partition: even, supported in `1/2 <= |x| <= 2`, `sum_j phi(2^j x) = 1` for `x != 0`.
    pub fn phi(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        partition_bump(x.abs().log2())
    }

    /// Bump on `[1, 2]` with unit-half mass.
    pub fn chi(&self, s: f64) -> f64 {
        if s <= 1.0 || s >= 2.0 {
            0.0
        } else {
            self.chi_norm * (-1.0 / ((s - 1.0) * (2.0 - s))).exp()
        }
    }

    /// `int_{-inf}^t chi`.
    pub fn chi_cumulative(&self, t: f64) -> f64 {
        if t <= 1.0 {
            0.0
        } else if t >= 2.0 {
            0.5
        } else {
            self.chi_cumulative.eval(t - 1.0)
        }
    }

    /// Littlewood–Paley annulus bump; the same partition function as `phi`.
    pub fn beta(&self, t: f64) -> f64 {
        self.phi(t)
    }

    /// Low-frequency part: `beta0(t) + sum_{j>=1} beta(2^-j t) = 1`, supported in `|t| <= 2`.
    pub fn beta0(&self, t: f64) -> f64 {
        if t == 0.0 {
            1.0
        } else {
            1.0 - smooth_step(t.abs().log2())
        }
    }

    /// `phi_pv`, whose Fourier transform is `chi(xi) + chi(-xi)`.
    pub fn phi_pv(&self, x: f64) -> f64 {
        self.phi_pv.eval(x.abs())
    }

    /// `varphi(x) = phi_pv(x/2) - phi_pv(x)`, so that `sum_l varphi(2^-l x) = 1` for `x != 0`.
    pub fn varphi(&self, x: f64) -> f64 {
        self.phi_pv(0.5 * x) - self.phi_pv(x)
    }

    /// Largest `|phi_pv(s)|` for `s >= s0`, sampled on the table.
    pub fn phi_pv_envelope(&self, s0: f64) -> f64 {
        let mut m = 0.0f64;
        let mut s = s0.abs();
        while s < X_MAX {
            m = m.max(self.phi_pv(s).abs());
            s += 0.02;
        }
        m
    }

    /// Truncation level of the tabulated `phi_pv`.
    pub fn phi_pv_tail(&self) -> f64 {
        self.phi_pv.tail_level(4)
    }
}

impl Default for BumpKit {
    fn default() -> Self {
        Self::new()
    }
}

/// Which distribution a [`PsiFunction`] decomposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiKind {
    Delta,
    Pv,
}

/// The function `psi` of a dyadic decomposition, evaluable in both spaces.
#[derive(Debug, Clone)]
pub struct PsiFunction {
    kind: PsiKind,
    kit: Arc<BumpKit>,
    table: Arc<ChebTable>,
}

/// `psi` for the delta distribution: the Fourier transform of `phi`.
pub fn build_delta_psi(kit: Arc<BumpKit>) -> PsiFunction {
    static TABLE: OnceLock<Arc<ChebTable>> = OnceLock::new();
    let table = TABLE
        .get_or_init(|| {
            Arc::new(ChebTable::build(X_MAX_DELTA, PANEL_WIDTH, |x| {
                // split where phi is flat to all orders
                2.0 * (cosine_transform(0.5, 1.0, x, |s| kit.phi(s)) + cosine_transform(1.0, 2.0, x, |s| kit.phi(s)))
            }))
        })
        .clone();
    PsiFunction {
        kind: PsiKind::Delta,
        kit,
        table,
    }
}

/// `psi` for the principal value: `varphi(x)/x`, odd.
pub fn build_pv_psi(kit: Arc<BumpKit>) -> PsiFunction {
    static TABLE: OnceLock<Arc<ChebTable>> = OnceLock::new();
    let table = TABLE
        .get_or_init(|| {
            // varphi(x)/x = (4/x) int chi(s) sin(3 pi x s / 2) sin(pi x s / 2) ds
            Arc::new(ChebTable::build(X_MAX, PANEL_WIDTH, |x| {
                let panels = 16 + x.ceil() as usize;
                4.0 * quadrature::integrate(1.0, 2.0, panels, |s| {
                    let half = 0.5 * PI * s;
                    let sinc = if x == 0.0 { half } else { (half * x).sin() / x };
                    kit.chi(s) * (3.0 * half * x).sin() * sinc
                })
            }))
        })
        .clone();
    PsiFunction {
        kind: PsiKind::Pv,
        kit,
        table,
    }
}

impl PsiFunction {
    pub fn kind(&self) -> PsiKind {
        self.kind
    }

    pub fn kit(&self) -> &Arc<BumpKit> {
        &self.kit
    }

    /// `psi(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let v = self.table.eval(x.abs());
        match self.kind {
            PsiKind::Delta => v,
            PsiKind::Pv if x < 0.0 => -v,
            PsiKind::Pv if x == 0.0 => 0.0,
            PsiKind::Pv => v,
        }
    }

    /// `psi_hat(t) = int psi(x) e^{-2 pi i t x} dx`, in closed form.
    ///
    /// Exactly zero outside `1/2 <= |t| <= 2`.
    pub fn fourier(&self, t: f64) -> Complex64 {
        match self.kind {
            PsiKind::Delta => Complex64::new(self.kit.phi(t), 0.0),
            PsiKind::Pv => {
                let x = |s: f64| self.kit.chi_cumulative(s);
                let v = x(2.0 * t) - x(t) - x(-2.0 * t) + x(-t);
                Complex64::new(0.0, -2.0 * PI * v)
            }
        }
    }

    /// Extent of the table; `psi` is taken as zero beyond it.
    pub fn extent(&self) -> f64 {
        self.table.end
    }

    /// Table truncation level, a bound on `|psi|` near `X_MAX`.
    pub fn tail_bound(&self) -> f64 {
        self.table.tail_level(4)
    }

    /// Largest `|psi|`, sampled.
    pub fn sup(&self) -> f64 {
        (0..4000).map(|i| self.eval(i as f64 * 0.005).abs()).fold(0.0, f64::max)
    }
}

/// Partial sums of `sum_j 2^-j int psi(2^-j x) g(x) dx`.
#[derive(Debug, Clone)]
pub struct DyadicSum {
    pub total: f64,
    pub terms: Vec<(i32, f64)>,
    /// Bound on the part of each term lost by truncating `psi` at `X_MAX`.
    pub truncation: f64,
}

/// Evaluates the dyadic sum for `g` over levels `j in window`.
///
/// `radius` bounds the region where `g` is non-negligible and `scale` its smallest
/// feature size; both size the quadrature.
pub fn dyadic_sum(
    psi: &PsiFunction,
    g: impl Fn(f64) -> f64,
    radius: f64,
    scale: f64,
    window: (i32, i32),
) -> DyadicSum {
    let mut terms = Vec::new();
    for j in window.0..=window.1 {
        let s = 2f64.powi(j);
        // x = s u: term = int psi(u) g(s u) du over |u| <= min(X_MAX, radius / s)
        let r = psi.extent().min(radius / s);
        let feature = PANEL_WIDTH.min(scale / s);
        let panels = ((2.0 * r / feature).ceil() as usize).clamp(8, 1 << 16);
        let v = quadrature::integrate(-r, r, panels, |u| psi.eval(u) * g(s * u));
        terms.push((j, v));
    }
    let total = terms.iter().map(|t| t.1).sum();
    DyadicSum {
        total,
        terms,
        truncation: psi.tail_bound(),
    }
}

/// Sums levels outward from `j = 0` until a term falls below `1e-12` of the running
/// total on three consecutive levels in each direction.
pub fn dyadic_sum_adaptive(psi: &PsiFunction, g: impl Fn(f64) -> f64, radius: f64, scale: f64) -> DyadicSum {
    let term = |j: i32| dyadic_sum(psi, &g, radius, scale, (j, j)).total;
    let mut terms = vec![(0, term(0))];
    for dir in [1i32, -1] {
        let mut small = 0;
        let mut j = dir;
        while small < 3 && j.abs() <= 200 {
            let v = term(j);
            let running: f64 = terms.iter().map(|t| t.1).sum::<f64>();
            if v.abs() < 1e-12 * running.abs().max(1e-300) {
                small += 1;
            } else {
                small = 0;
            }
            terms.push((j, v));
            j += dir;
        }
    }
    terms.sort_by_key(|t| t.0);
    let total = terms.iter().map(|t| t.1).sum();
    DyadicSum {
        total,
        terms,
        truncation: psi.tail_bound(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kit() -> Arc<BumpKit> {
        BumpKit::shared()
    }

    #[test]
    fn phi_partition_and_support() {
        let k = kit();
        for i in 0..200 {
            let x = 10f64.powf(-3.0 + 6.0 * i as f64 / 199.0);
            let s: f64 = (-40..=40).map(|j| k.phi(2f64.powi(j) * x)).sum();
            assert!((s - 1.0).abs() < 1e-10, "x = {x}: {s}");
            assert_eq!(k.phi(x), k.phi(-x));
        }
        for x in [0.0, 0.1, 0.4999, 2.0001, 3.0, 100.0] {
            assert!(k.phi(x).abs() < 1e-300);
        }
    }

    #[test]
    fn chi_mass_and_support() {
        let k = kit();
        let m = quadrature::integrate(0.5, 2.5, 256, |s| k.chi(s));
        assert!((m - 0.5).abs() < 1e-13);
        assert_eq!(k.chi(1.0), 0.0);
        assert_eq!(k.chi(2.0), 0.0);
        assert!((k.chi_cumulative(1.5) - 0.25).abs() < 1e-13);
    }

    #[test]
    fn littlewood_paley_pair() {
        let k = kit();
        for i in 0..200 {
            let t = 10f64.powf(-3.0 + 7.0 * i as f64 / 199.0);
            let s: f64 = k.beta0(t) + (1..=60).map(|j| k.beta(2f64.powi(-j) * t)).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-10);
        }
        assert_eq!(k.beta0(2.0), 0.0);
        assert_eq!(k.beta0(1.0), 1.0);
    }

    #[test]
    fn varphi_telescopes() {
        let k = kit();
        for i in 0..100 {
            let x = 10f64.powf(-4.0 + 8.0 * i as f64 / 99.0);
            let s: f64 = (-30..=60).map(|l| k.varphi(2f64.powi(-l) * x)).sum();
            assert!((s - 1.0).abs() < 1e-10, "x = {x}: {s}");
        }
    }

    #[test]
    fn pv_psi_matches_varphi_over_x() {
        let k = kit();
        let psi = build_pv_psi(k.clone());
        for i in 1..400 {
            let x = i as f64 * 0.173;
            assert!((psi.eval(x) - k.varphi(x) / x).abs() < 1e-12);
            assert_eq!(psi.eval(-x), -psi.eval(x));
        }
        assert_eq!(psi.eval(0.0), 0.0);
    }

    #[test]
    fn tables_decay_to_roundoff() {
        let k = kit();
        // quadrature roundoff sets the floor
        assert!(k.phi_pv_tail() < 1e-14);
        assert!(build_delta_psi(k.clone()).tail_bound() < 1e-14);
        assert!(build_pv_psi(k).tail_bound() < 1e-14);
    }

    #[test]
    fn delta_psi_is_fourier_transform_of_phi() {
        let k = kit();
        let psi = build_delta_psi(k.clone());
        // psi(0) = int phi
        let m = quadrature::integrate(-2.0, 2.0, 256, |x| k.phi(x));
        assert!((psi.eval(0.0) - m).abs() < 1e-13, "{} vs {m}", psi.eval(0.0));
        // numerical transform of psi recovers phi
        for t in [0.3, 0.75, 1.0, 1.6, 2.5] {
            let v = quadrature::integrate(-X_MAX_DELTA, X_MAX_DELTA, 4096, |x| psi.eval(x) * (2.0 * PI * t * x).cos());
            assert!((v - k.phi(t)).abs() < 1e-9, "t = {t}: {v} vs {}", k.phi(t));
        }
    }
}
