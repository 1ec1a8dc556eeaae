//! Fourier multipliers: the resolvent `(Q(xi) + z)^{-1}`, its real/imaginary split, the
//! dyadic pieces of the real part, the principal value `p.v. 1/(Q + a)`, and the
//! localized operators `T^rho_lambda` with their kernels.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dyadic_decomp::{BumpKit, PsiFunction, PsiKind};
use crate::error::{Error, Result};
use crate::field::{Grid, SampledField, Space};
use crate::quadform::{GraphChart, QuadraticForm};
use crate::quadrature::OscillatoryCubature;

/// `z = a + ib`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    pub a: f64,
    pub b: f64,
}

impl SpectralParameter {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// `e^{i theta}`.
    pub fn on_unit_circle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn modulus(&self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }

    /// The integer with `2^{l0 - 1} < |b| <= 2^{l0}`; `None` when `b = 0`.
    pub fn l0(&self) -> Option<i32> {
        let b = self.b.abs();
        if b == 0.0 || !b.is_finite() {
            return None;
        }
        let mut l = b.log2().ceil() as i32;
        while 2f64.powi(l) < b {
            l += 1;
        }
        while 2f64.powi(l - 1) >= b {
            l -= 1;
        }
        Some(l)
    }

    /// `z` scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s)
    }
}

/// A multiplier sampled at the frequencies of a grid.
#[derive(Debug, Clone)]
pub struct FourierMultiplier {
    grid: Grid,
    symbol: Vec<Complex64>,
}

impl FourierMultiplier {
    pub fn from_fn(grid: &Grid, m: impl Fn(&[f64]) -> Complex64 + Sync) -> Self {
        let symbol = (0..grid.len())
            .into_par_iter()
            .map_init(|| vec![0.0; grid.dim()], |x, i| {
                grid.frequency_into(i, x);
                m(x)
            })
            .collect();
        Self {
            grid: grid.clone(),
            symbol,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    /// `sup |m|` over the grid.
    pub fn sup(&self) -> f64 {
        self.symbol.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn check(&self, f: &SampledField) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::InvalidParameter("field grid differs from multiplier grid".into()));
        }
        if f.space() != Space::Physical {
            return Err(Error::WrongSpace {
                expected: "physical",
                found: "frequency",
            });
        }
        Ok(())
    }

    fn run(&self, f: &SampledField, conj: bool) -> Result<SampledField> {
        self.check(f)?;
        let mut fh = f.fourier()?;
        fh.values_mut().par_iter_mut().zip(&self.symbol).for_each(|(v, m)| {
            *v *= if conj { m.conj() } else { *m };
        });
        fh.inv_fourier()
    }

    pub fn apply(&self, f: &SampledField) -> Result<SampledField> {
        self.run(f, false)
    }

    /// The adjoint: multiplication by the conjugate symbol.
    pub fn adjoint(&self, f: &SampledField) -> Result<SampledField> {
        self.run(f, true)
    }
}

/// Resolvent symbol `(Q(xi) + z)^{-1}` on a grid; requires `b != 0`.
pub fn resolvent_multiplier(grid: &Grid, form: &QuadraticForm, z: SpectralParameter) -> Result<FourierMultiplier> {
    if grid.dim() != form.d() {
        return Err(Error::DimensionMismatch {
            expected: form.d(),
            got: grid.dim(),
        });
    }
    if z.b == 0.0 {
        let hits = (0..grid.len()).any(|i| form.eval(&grid.frequency(i)) + z.a == 0.0);
        let detail = if hits {
            format!("Q(xi) = {} at a grid frequency", -z.a)
        } else {
            "b = 0".to_string()
        };
        return Err(Error::GridSingularity(detail));
    }
    let zc = z.as_complex();
    Ok(FourierMultiplier::from_fn(grid, |xi| 1.0 / (form.eval(xi) + zc)))
}

/// `F^{-1}((Q + z)^{-1} f_hat)`.
pub fn resolvent_apply(f: &SampledField, form: &QuadraticForm, z: SpectralParameter) -> Result<SampledField> {
    resolvent_multiplier(f.grid(), form, z)?.apply(f)
}

/// `F^{-1}((Q + z) f_hat)`, the forward operator.
pub fn operator_apply(u: &SampledField, form: &QuadraticForm, z: SpectralParameter) -> Result<SampledField> {
    let zc = z.as_complex();
    FourierMultiplier::from_fn(u.grid(), |xi| form.eval(xi) + zc).apply(u)
}

/// `1/(t + a + ib) = real(t) + i imag(t)` with `t = Q(xi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventSplit {
    pub a: f64,
    pub b: f64,
}

pub fn split_real_imag(z: SpectralParameter) -> Result<ResolventSplit> {
    if z.b == 0.0 {
        return Err(Error::InvalidParameter("the split needs b != 0".into()));
    }
    Ok(ResolventSplit { a: z.a, b: z.b })
}

impl ResolventSplit {
    /// `(t + a) / ((t + a)^2 + b^2)`.
    pub fn real(&self, q: f64) -> f64 {
        let u = q + self.a;
        u / (u * u + self.b * self.b)
    }

    /// `-b / ((t + a)^2 + b^2)`.
    pub fn imag(&self, q: f64) -> f64 {
        let u = q + self.a;
        -self.b / (u * u + self.b * self.b)
    }

    pub fn recombine(&self, q: f64) -> Complex64 {
        Complex64::new(self.real(q), self.imag(q))
    }
}

/// Levels `lmin..=lmax` of a dyadic decomposition in `t = Q + a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelWindow {
    pub lmin: i32,
    pub lmax: i32,
}

impl LevelWindow {
    pub fn new(lmin: i32, lmax: i32) -> Result<Self> {
        if lmin > lmax {
            return Err(Error::InvalidParameter(format!("empty level window [{lmin}, {lmax}]")));
        }
        Ok(Self { lmin, lmax })
    }

    /// Smallest window whose partition residual is below `tol` for `t_min <= |t| <= t_max`.
    ///
    /// `varphi` is not compactly supported, so the window extends beyond the levels
    /// where `|t| ~ 2^l` until the telescoped tails `1 - phi_pv(2^{-lmax-1} t)` and
    /// `phi_pv(2^{-lmin} t)` fall below `tol`.
    pub fn covering(kit: &BumpKit, t_min: f64, t_max: f64, tol: f64) -> Result<Self> {
        if !(t_min > 0.0 && t_max >= t_min) {
            return Err(Error::InvalidParameter(format!("invalid scale range [{t_min}, {t_max}]")));
        }
        let mut lmax = t_max.log2().ceil() as i32;
        while 1.0 - kit.phi_pv(2f64.powi(-lmax - 1) * t_max) > tol {
            lmax += 1;
            if lmax > 1100 {
                return Err(Error::WindowTooSmall { residual: tol, tolerance: tol });
            }
        }
        let mut lmin = t_min.log2().floor() as i32;
        while kit.phi_pv_envelope(2f64.powi(-lmin) * t_min) > tol {
            lmin -= 1;
        }
        Ok(Self { lmin, lmax })
    }

    /// Window for the nonzero values of `|Q + a|` on a grid.
    pub fn for_grid(kit: &BumpKit, grid: &Grid, form: &QuadraticForm, a: f64, tol: f64) -> Result<Self> {
        let (lo, hi) = t_range(grid, form, a);
        if hi == 0.0 {
            return Err(Error::InvalidParameter("Q + a vanishes on the whole grid".into()));
        }
        Self::covering(kit, lo, hi, tol)
    }

    /// `1 - sum_l varphi(2^-l t)` in closed form.
    pub fn residual(&self, kit: &BumpKit, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        1.0 - kit.phi_pv(2f64.powi(-self.lmax - 1) * t) + kit.phi_pv(2f64.powi(-self.lmin) * t)
    }

    pub fn levels(&self) -> impl Iterator<Item = i32> {
        self.lmin..=self.lmax
    }
}

/// Smallest nonzero and largest `|Q(xi) + a|` over the grid frequencies.
pub fn t_range(grid: &Grid, form: &QuadraticForm, a: f64) -> (f64, f64) {
    (0..grid.len())
        .into_par_iter()
        .map_init(|| vec![0.0; grid.dim()], |x, i| {
            grid.frequency_into(i, x);
            (form.eval(x) + a).abs()
        })
        .fold(
            || (f64::INFINITY, 0.0f64),
            |(lo, hi), t| (if t > 0.0 { lo.min(t) } else { lo }, hi.max(t)),
        )
        .reduce(|| (f64::INFINITY, 0.0), |x, y| (x.0.min(y.0), x.1.max(y.1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbcPiece {
    pub kind: PieceKind,
    pub l: i32,
}

/// The pieces `A_l (l < l0)`, `B_l`, `C_l (l >= l0)` of the real part of the resolvent.
#[derive(Debug, Clone)]
pub struct AbcDecomposition {
    pub split: ResolventSplit,
    pub l0: i32,
    pub window: LevelWindow,
    psi: PsiFunction,
}

pub fn decompose_abc(z: SpectralParameter, psi_pv: PsiFunction, window: LevelWindow) -> Result<AbcDecomposition> {
    let split = split_real_imag(z)?;
    if psi_pv.kind() != PsiKind::Pv {
        return Err(Error::InvalidParameter("the decomposition needs the principal value psi".into()));
    }
    let l0 = z.l0().expect("b != 0");
    Ok(AbcDecomposition {
        split,
        l0,
        window,
        psi: psi_pv,
    })
}

impl AbcDecomposition {
    pub fn pieces(&self) -> Vec<AbcPiece> {
        let mut out = Vec::new();
        for l in self.window.levels() {
            if l < self.l0 {
                out.push(AbcPiece { kind: PieceKind::A, l });
            } else {
                out.push(AbcPiece { kind: PieceKind::B, l });
                out.push(AbcPiece { kind: PieceKind::C, l });
            }
        }
        out
    }

    /// Value of a piece at `t = Q + a`.
    pub fn eval(&self, piece: AbcPiece, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let s = 2f64.powi(-piece.l);
        let kit = self.psi.kit();
        let b2 = self.split.b * self.split.b;
        match piece.kind {
            PieceKind::A => t / (t * t + b2) * kit.varphi(s * t),
            // (t/(t^2+b^2) - 1/t) = -b^2 / (t (t^2 + b^2))
            PieceKind::B => -b2 / (t * (t * t + b2)) * kit.varphi(s * t),
            PieceKind::C => s * self.psi.eval(s * t),
        }
    }

    /// `C_l` as `varphi(2^-l t) / t`, the second evaluation route.
    pub fn c_direct(&self, l: i32, t: f64) -> f64 {
        self.psi.kit().varphi(2f64.powi(-l) * t) / t
    }

    /// Sum of all pieces at `t = Q + a`.
    pub fn sum(&self, t: f64) -> f64 {
        self.pieces().into_iter().map(|p| self.eval(p, t)).sum()
    }

    /// Real part of the resolvent symbol at `t = Q + a`.
    pub fn real_part(&self, t: f64) -> f64 {
        self.split.real(t - self.split.a)
    }
}

/// Symbol of `p.v. 1/t` realized as `sum_l 2^-l psi(2^-l t)`.
pub fn pv_symbol(psi_pv: &PsiFunction, window: LevelWindow, t: f64) -> f64 {
    window.levels().map(|l| {
        let s = 2f64.powi(-l);
        s * psi_pv.eval(s * t)
    }).sum()
}

/// Principal value multiplier on a grid, with the window residual over the grid.
pub fn pv_multiplier(
    grid: &Grid,
    form: &QuadraticForm,
    a: f64,
    psi_pv: &PsiFunction,
    window: LevelWindow,
    tol: f64,
) -> Result<FourierMultiplier> {
    if psi_pv.kind() != PsiKind::Pv {
        return Err(Error::InvalidParameter("pv_apply needs the principal value psi".into()));
    }
    let kit = psi_pv.kit();
    let residual = (0..grid.len())
        .into_par_iter()
        .map_init(|| vec![0.0; grid.dim()], |x, i| {
            grid.frequency_into(i, x);
            window.residual(kit, form.eval(x) + a).abs()
        })
        .reduce(|| 0.0, f64::max);
    if residual > tol {
        return Err(Error::WindowTooSmall { residual, tolerance: tol });
    }
    Ok(FourierMultiplier::from_fn(grid, |xi| {
        Complex64::new(pv_symbol(psi_pv, window, form.eval(xi) + a), 0.0)
    }))
}

/// `F^{-1}(p.v. (Q + a)^{-1} f_hat)`; the window defaults to one covering the grid.
pub fn pv_apply(
    f: &SampledField,
    form: &QuadraticForm,
    a: f64,
    psi_pv: &PsiFunction,
    window: Option<LevelWindow>,
) -> Result<SampledField> {
    const TOL: f64 = 1e-10;
    let window = match window {
        Some(w) => w,
        None => LevelWindow::for_grid(psi_pv.kit(), f.grid(), form, a, TOL)?,
    };
    pv_multiplier(f.grid(), form, a, psi_pv, window, TOL)?.apply(f)
}

/// Choice of the function `m` in the localized multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MChoice {
    /// `m = 1`.
    One,
    /// `m = 2 eta_1`, realized as `m = eta_1` with `lambda` halved.
    TwoEta1,
}

/// `chi(eta_tilde) psi(lambda^{-1} m(eta_tilde) (eta_d - G_rho(eta_tilde)))`, acting in
/// graph coordinates.
#[derive(Debug, Clone)]
pub struct LocalizedMultiplier {
    pub lambda: f64,
    pub m_choice: MChoice,
    pub psi: PsiFunction,
    pub chart: GraphChart,
}

impl LocalizedMultiplier {
    pub fn new(lambda: f64, m_choice: MChoice, psi: PsiFunction, chart: GraphChart) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
        }
        Ok(Self {
            lambda,
            m_choice,
            psi,
            chart,
        })
    }

    pub fn rho(&self) -> f64 {
        self.chart.rho
    }

    /// The `lambda` paired with [`m`](Self::m).
    pub fn effective_lambda(&self) -> f64 {
        match self.m_choice {
            MChoice::One => self.lambda,
            MChoice::TwoEta1 => 0.5 * self.lambda,
        }
    }

    /// `m(eta_tilde)`, within `[1/2, 2]` on the chart domain.
    pub fn m(&self, eta_tilde: &[f64]) -> f64 {
        match self.m_choice {
            MChoice::One => 1.0,
            MChoice::TwoEta1 => eta_tilde[0],
        }
    }

    /// Symbol at a graph-coordinate frequency `eta`.
    pub fn symbol(&self, eta: &[f64]) -> f64 {
        let d = eta.len();
        let et = &eta[..d - 1];
        let c = self.chart.cutoff_at(et);
        if c == 0.0 {
            return 0.0;
        }
        let u = self.m(et) * (eta[d - 1] - self.chart.height(et)) / self.effective_lambda();
        c * self.psi.eval(u)
    }

    /// Range of `|x_d|` outside which the kernel vanishes identically.
    pub fn support_slab(&self) -> (f64, f64) {
        let lam = self.effective_lambda();
        let (m_lo, m_hi) = match self.m_choice {
            MChoice::One => (1.0, 1.0),
            MChoice::TwoEta1 => {
                let b = self.chart.cutoff.support_box(self.chart.dim());
                b[0]
            }
        };
        (0.5 * m_lo / lam, 2.0 * m_hi / lam)
    }

    pub fn as_multiplier(&self, grid: &Grid) -> FourierMultiplier {
        FourierMultiplier::from_fn(grid, |eta| Complex64::new(self.symbol(eta), 0.0))
    }
}

/// Applies `T^rho_lambda`; the grid frequencies are read as graph coordinates `eta`.
pub fn t_rho_lambda_apply(f: &SampledField, lm: &LocalizedMultiplier) -> Result<SampledField> {
    if f.grid().dim() != lm.chart.form.d() {
        return Err(Error::DimensionMismatch {
            expected: lm.chart.form.d(),
            got: f.grid().dim(),
        });
    }
    lm.as_multiplier(f.grid()).apply(f)
}

/// Kernel of `T^rho_lambda` at `x`, from the reduced form
/// `lambda int m^{-1} psi_hat(-lambda x_d / m) e^{2 pi i (x~ . eta~ + x_d G)} chi d eta~`.
pub fn kernel_k(lm: &LocalizedMultiplier, x: &[f64], cubature: &OscillatoryCubature) -> Result<Complex64> {
    let d = lm.chart.form.d();
    if x.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.len() });
    }
    let lam = lm.effective_lambda();
    let xd = x[d - 1];
    let (lo, hi) = lm.support_slab();
    if xd.abs() < lo || xd.abs() > hi {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let chart = &lm.chart;
    let xt = &x[..d - 1];
    let domain = chart.cutoff.support_box(d - 1);
    let phase = |et: &[f64]| xt.iter().zip(et).map(|(a, b)| a * b).sum::<f64>() + xd * chart.height(et);
    let amp = |et: &[f64]| {
        let c = chart.cutoff_at(et);
        if c == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let m = lm.m(et);
        lm.psi.fourier(-lam * xd / m) * (c * lam / m)
    };
    Ok(cubature.integrate(&domain, phase, amp)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic_decomp::build_pv_psi;

    #[test]
    fn l0_examples() {
        assert_eq!(SpectralParameter::new(0.0, 0.3).l0(), Some(-1));
        assert_eq!(SpectralParameter::new(0.0, 0.5).l0(), Some(-1));
        assert_eq!(SpectralParameter::new(0.0, -1.0).l0(), Some(0));
        assert_eq!(SpectralParameter::new(0.0, 0.26).l0(), Some(-1));
        assert_eq!(SpectralParameter::new(1.0, 0.0).l0(), None);
    }

    #[test]
    fn split_examples() {
        let s = split_real_imag(SpectralParameter::new(0.0, 1.0)).unwrap();
        assert_eq!((s.real(0.0), s.imag(0.0)), (0.0, -1.0));
        let s = split_real_imag(SpectralParameter::new(1.0, 1.0)).unwrap();
        assert_eq!((s.real(-1.0), s.imag(-1.0)), (0.0, -1.0));
        assert!(split_real_imag(SpectralParameter::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn window_residual_below_tolerance() {
        let kit = BumpKit::shared();
        let w = LevelWindow::covering(&kit, 1e-3, 50.0, 1e-11).unwrap();
        for i in 0..200 {
            let t = 1e-3 * (5e4f64).powf(i as f64 / 199.0);
            assert!(w.residual(&kit, t).abs() < 1.1e-11);
            let direct: f64 = w.levels().map(|l| kit.varphi(2f64.powi(-l) * t)).sum();
            assert!((1.0 - direct - w.residual(&kit, t)).abs() < 1e-13);
        }
    }

    #[test]
    fn abc_pieces_two_ways() {
        let kit = BumpKit::shared();
        let psi = build_pv_psi(kit.clone());
        let w = LevelWindow::covering(&kit, 1e-2, 10.0, 1e-11).unwrap();
        let abc = decompose_abc(SpectralParameter::new(0.6, 0.8), psi, w).unwrap();
        for &t in &[-3.1, -0.02, 0.013, 0.7, 5.5] {
            for l in w.levels() {
                let a = abc.eval(AbcPiece { kind: PieceKind::C, l }, t);
                assert!((a - abc.c_direct(l, t)).abs() < 1e-10 * (1.0 + a.abs()), "t={t} l={l} {a} {}", abc.c_direct(l, t));
            }
            assert!((abc.sum(t) - abc.real_part(t)).abs() < 1e-9);
        }
    }
}
