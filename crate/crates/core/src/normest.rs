//! Lower bounds for `L^p -> L^q` and `L^{p,1} -> L^{q,inf}` operator norms by the
//! duality-map power iteration, simple-function ascent, and sweeps over `z`.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dyadic_decomp::PsiFunction;
use crate::error::{Error, Result};
use crate::exponent_region::ExponentPair;
use crate::field::{Grid, SampledField, Space};
use crate::multipliers::{pv_multiplier, resolvent_multiplier, FourierMultiplier, LevelWindow, SpectralParameter};
use crate::quadform::QuadraticForm;

/// Magnitudes below this are treated as zero in the duality maps.
const CLIP: f64 = 1e-300;

/// A bounded linear operator on fields over one grid, with its adjoint.
pub trait LinearOperator: Sync {
    fn grid(&self) -> &Grid;
    fn apply(&self, f: &SampledField) -> Result<SampledField>;
    fn adjoint(&self, g: &SampledField) -> Result<SampledField>;
}

impl LinearOperator for FourierMultiplier {
    fn grid(&self) -> &Grid {
        FourierMultiplier::grid(self)
    }
    fn apply(&self, f: &SampledField) -> Result<SampledField> {
        FourierMultiplier::apply(self, f)
    }
    fn adjoint(&self, g: &SampledField) -> Result<SampledField> {
        FourierMultiplier::adjoint(self, g)
    }
}

/// The identity on a grid.
#[derive(Debug, Clone)]
pub struct Identity(pub Grid);

impl LinearOperator for Identity {
    fn grid(&self) -> &Grid {
        &self.0
    }
    fn apply(&self, f: &SampledField) -> Result<SampledField> {
        Ok(f.clone())
    }
    fn adjoint(&self, g: &SampledField) -> Result<SampledField> {
        Ok(g.clone())
    }
}

/// `f -> <f, u> v` with `<f, u> = int f conj(u)`.
#[derive(Debug, Clone)]
pub struct RankOne {
    pub u: SampledField,
    pub v: SampledField,
}

fn inner(a: &SampledField, b: &SampledField) -> Complex64 {
    let s: Complex64 = a.values().iter().zip(b.values()).map(|(x, y)| x * y.conj()).sum();
    s * a.grid().cell_volume()
}

impl LinearOperator for RankOne {
    fn grid(&self) -> &Grid {
        self.u.grid()
    }
    fn apply(&self, f: &SampledField) -> Result<SampledField> {
        Ok(self.v.scale(inner(f, &self.u)))
    }
    fn adjoint(&self, g: &SampledField) -> Result<SampledField> {
        Ok(self.u.scale(inner(g, &self.v)))
    }
}

/// Which norms the quotient uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    Lebesgue,
    /// `||T f||_{q,inf} / ||f||_{p,1}`.
    Lorentz,
}

#[derive(Debug, Clone)]
pub struct NormProbe {
    pub p: f64,
    pub q: f64,
    pub mode: NormMode,
    pub iterations: usize,
    pub seed: u64,
    pub warm_start: Option<SampledField>,
}

impl NormProbe {
    pub fn new(p: f64, q: f64) -> Self {
        Self {
            p,
            q,
            mode: NormMode::Lebesgue,
            iterations: 40,
            seed: 0,
            warm_start: None,
        }
    }

    pub fn for_pair(pair: ExponentPair) -> Self {
        Self::new(pair.p(), pair.q())
    }

    pub fn lorentz(mut self) -> Self {
        self.mode = NormMode::Lorentz;
        self
    }

    pub fn with_iterations(mut self, n: usize) -> Self {
        self.iterations = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_warm_start(mut self, f: SampledField) -> Self {
        self.warm_start = Some(f);
        self
    }
}

/// Best quotient found and the quotient after every step.
#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub bound: f64,
    pub trace: Vec<f64>,
    /// Whether the quotients never dropped by more than `1e-9` relative.
    pub monotone: bool,
    pub best: SampledField,
}

/// A seeded random complex field in physical space.
pub fn random_field(grid: &Grid, seed: u64) -> SampledField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    SampledField::new(grid.clone(), values, Space::Physical).expect("sizes agree")
}

/// `|h|^{r-1} h / |h|`, the duality map of `L^r` up to normalization.
fn duality_map(h: &SampledField, r: f64) -> SampledField {
    let mut out = h.clone();
    for v in out.values_mut() {
        let m = v.norm();
        *v = if m < CLIP { Complex64::new(0.0, 0.0) } else { *v * m.powf(r - 2.0) };
    }
    out
}

fn to_physical(f: SampledField) -> Result<SampledField> {
    match f.space() {
        Space::Physical => Ok(f),
        Space::Frequency => f.inv_fourier(),
    }
}

/// Superposition test `T(a f + g) = a T f + T g` on random fields.
pub fn check_linear(op: &dyn LinearOperator, seed: u64) -> Result<()> {
    let f = random_field(op.grid(), seed ^ 0x5eed);
    let g = random_field(op.grid(), seed ^ 0xbeef);
    let a = Complex64::new(0.7, -1.3);
    let lhs = op.apply(&g.axpy(a, &f)?)?;
    let rhs = op.apply(&g)?.axpy(a, &op.apply(&f)?)?;
    let diff = lhs.axpy(Complex64::new(-1.0, 0.0), &rhs)?.l2_norm_sq().sqrt();
    let scale = rhs.l2_norm_sq().sqrt().max(f64::MIN_POSITIVE);
    if diff > 1e-9 * scale {
        return Err(Error::NonLinear(diff / scale));
    }
    Ok(())
}

fn quotient(op: &dyn LinearOperator, f: &SampledField, probe: &NormProbe) -> Result<f64> {
    let h = op.apply(f)?;
    let (num, den) = match probe.mode {
        NormMode::Lebesgue => (h.lp_norm(probe.q)?, f.lp_norm(probe.p)?),
        NormMode::Lorentz => (h.lorentz_qinf(probe.q)?, f.lorentz_p1(probe.p)?),
    };
    if den == 0.0 {
        return Err(Error::ZeroIterate);
    }
    Ok(num / den)
}

/// Lower bound on the operator norm. Every reported quotient belongs to a concrete input,
/// so the result is a lower bound whether or not the iteration converged.
pub fn opnorm_lower(op: &dyn LinearOperator, probe: &NormProbe) -> Result<NormEstimate> {
    let (p, q) = (probe.p, probe.q);
    if !(p >= 1.0 && p <= 2.0 && q >= 2.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 1 <= p <= 2 <= q < inf, got p = {p}, q = {q}")));
    }
    check_linear(op, probe.seed)?;
    let mut f = match &probe.warm_start {
        Some(w) => to_physical(w.clone())?,
        None => random_field(op.grid(), probe.seed),
    };
    let lebesgue = NormProbe {
        mode: NormMode::Lebesgue,
        warm_start: None,
        ..probe.clone()
    };
    let p_dual = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
    let mut trace = Vec::with_capacity(probe.iterations);
    let mut monotone = true;
    let mut best = f.clone();
    let mut best_q = f64::NEG_INFINITY;
    for _ in 0..probe.iterations.max(1) {
        let norm = f.lp_norm(p)?;
        if norm == 0.0 {
            return Err(Error::ZeroIterate);
        }
        f = f.scale(Complex64::new(1.0 / norm, 0.0));
        let h = op.apply(&f)?;
        let value = h.lp_norm(q)?;
        if let Some(&last) = trace.last() {
            if value < last * (1.0 - 1e-9) {
                monotone = false;
            }
        }
        trace.push(value);
        if value > best_q {
            best_q = value;
            best = f.clone();
        }
        if value == 0.0 {
            return Err(Error::ZeroIterate);
        }
        let g = duality_map(&h, q);
        let back = op.adjoint(&g)?;
        f = if p_dual.is_infinite() {
            // p = 1: concentrate on the largest entry
            let (i, _) = back
                .values()
                .iter()
                .enumerate()
                .fold((0, 0.0), |acc, (i, v)| if v.norm() > acc.1 { (i, v.norm()) } else { acc });
            let mut e = SampledField::zeros(back.grid().clone(), Space::Physical);
            e.values_mut()[i] = back.values()[i] / back.values()[i].norm();
            e
        } else {
            duality_map(&back, p_dual)
        };
        if trace.len() >= 3 {
            let n = trace.len();
            if (trace[n - 1] - trace[n - 2]).abs() <= 1e-15 * trace[n - 1] {
                break;
            }
        }
    }
    let mut bound = quotient(op, &best, &lebesgue)?;
    if probe.mode == NormMode::Lorentz {
        let (f_best, value) = lorentz_ascent(op, &best, probe)?;
        best = f_best;
        bound = value;
    }
    Ok(NormEstimate {
        bound,
        trace,
        monotone,
        best,
    })
}

/// Maximizes `||T f||_{q,inf} / ||f||_{p,1}` over simple functions with at most eight levels
/// built from the level sets of `seed_field`, by coordinate ascent on the level heights.
fn lorentz_ascent(op: &dyn LinearOperator, seed_field: &SampledField, probe: &NormProbe) -> Result<(SampledField, f64)> {
    const LEVELS: usize = 8;
    let probe_l = NormProbe {
        mode: NormMode::Lorentz,
        warm_start: None,
        ..probe.clone()
    };
    let mags: Vec<f64> = seed_field.values().iter().map(|v| v.norm()).collect();
    let top = mags.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::ZeroIterate);
    }
    let phase: Vec<Complex64> = seed_field
        .values()
        .iter()
        .map(|v| if v.norm() < CLIP { Complex64::new(0.0, 0.0) } else { v / v.norm() })
        .collect();
    // level i holds 2^{-i-1} < |h| / top <= 2^{-i}
    let level: Vec<Option<usize>> = mags
        .iter()
        .map(|m| {
            let r = m / top;
            if r <= 0.0 {
                return None;
            }
            let i = (-r.log2()).floor().max(0.0) as usize;
            (i < LEVELS).then_some(i)
        })
        .collect();
    let build = |heights: &[f64]| -> SampledField {
        let values = level
            .iter()
            .zip(&phase)
            .map(|(l, ph)| l.map_or(Complex64::new(0.0, 0.0), |i| ph * heights[i]))
            .collect();
        SampledField::new(seed_field.grid().clone(), values, Space::Physical).expect("sizes agree")
    };
    let eval = |heights: &[f64]| -> Result<f64> {
        if heights.iter().all(|&h| h == 0.0) {
            return Ok(0.0);
        }
        quotient(op, &build(heights), &probe_l)
    };
    // start from the best single indicator {|h| > 2^{-j} top}
    let mut heights = vec![0.0; LEVELS];
    let mut best = f64::NEG_INFINITY;
    for j in 0..LEVELS {
        let cand: Vec<f64> = (0..LEVELS).map(|i| if i <= j { 1.0 } else { 0.0 }).collect();
        let v = eval(&cand)?;
        if v > best {
            best = v;
            heights = cand;
        }
    }
    for _ in 0..4 {
        let mut improved = false;
        for i in 0..LEVELS {
            let keep = heights[i];
            let mut best_h = keep;
            for factor in [0.0, 0.25, 0.5, 2.0, 4.0] {
                heights[i] = if keep == 0.0 { factor * 0.5 } else { keep * factor };
                let v = eval(&heights)?;
                if v > best * (1.0 + 1e-12) {
                    best = v;
                    best_h = heights[i];
                    improved = true;
                }
            }
            heights[i] = best_h;
        }
        if !improved {
            break;
        }
    }
    Ok((build(&heights), best))
}

/// Lower bounds across a list of spectral parameters.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub entries: Vec<(SpectralParameter, f64)>,
    pub max: f64,
    pub min: f64,
    pub ratio: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// `e^{i pi (2k + 1) / n}`, `k = 0..n`: the unit circle avoiding `z = +-1`.
pub fn circle_points(n: usize) -> Vec<SpectralParameter> {
    (0..n)
        .map(|k| SpectralParameter::on_unit_circle(std::f64::consts::PI * (2 * k + 1) as f64 / n as f64))
        .collect()
}

/// Multiplier of `(Q(D) + z)^{-1}`, or of `p.v. (Q + a)^{-1}` when `b = 0`.
pub fn sweep_operator(grid: &Grid, form: &QuadraticForm, z: SpectralParameter, psi_pv: &PsiFunction) -> Result<FourierMultiplier> {
    if z.b == 0.0 {
        const TOL: f64 = 1e-10;
        let window = LevelWindow::for_grid(psi_pv.kit(), grid, form, z.a, TOL)?;
        pv_multiplier(grid, form, z.a, psi_pv, window, TOL)
    } else {
        resolvent_multiplier(grid, form, z)
    }
}

/// Lower bounds of the resolvent norm at every `z`, with `ratio = max / min` checked against
/// `threshold`. Every `z` must satisfy `|z| >= 1`.
pub fn uniform_sweep(
    grid: &Grid,
    form: &QuadraticForm,
    zs: &[SpectralParameter],
    probe: &NormProbe,
    psi_pv: &PsiFunction,
    threshold: f64,
) -> Result<SweepReport> {
    if zs.is_empty() {
        return Err(Error::InvalidParameter("empty sweep".into()));
    }
    if let Some(z) = zs.iter().find(|z| z.modulus() < 1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!("|z| = {} < 1", z.modulus())));
    }
    let bounds: Vec<f64> = zs
        .par_iter()
        .map(|&z| {
            let op = sweep_operator(grid, form, z, psi_pv)?;
            Ok(opnorm_lower(&op, probe)?.bound)
        })
        .collect::<Result<_>>()?;
    let max = bounds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = bounds.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = max / min;
    Ok(SweepReport {
        entries: zs.iter().copied().zip(bounds).collect(),
        max,
        min,
        ratio,
        threshold,
        pass: ratio.is_finite() && ratio < threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::QuadraticForm;

    #[test]
    fn identity_has_norm_one() {
        let grid = Grid::cubic(3, 8, 4.0).unwrap();
        let e = opnorm_lower(&Identity(grid), &NormProbe::new(2.0, 2.0)).unwrap();
        assert!((e.bound - 1.0).abs() < 1e-10);
    }

    #[test]
    fn diagonal_multiplier_reaches_sup() {
        let grid = Grid::cubic(3, 16, 2.0).unwrap();
        let form = QuadraticForm::new(3, 1).unwrap();
        let m = resolvent_multiplier(&grid, &form, SpectralParameter::new(0.3, 1.0)).unwrap();
        let e = opnorm_lower(&m, &NormProbe::new(2.0, 2.0).with_iterations(200)).unwrap();
        assert!(e.bound <= m.sup() * (1.0 + 1e-12));
        assert!(e.bound >= m.sup() * (1.0 - 1e-7), "{} vs {}", e.bound, m.sup());
        assert!(e.monotone);
    }

    #[test]
    fn rank_one_closed_form() {
        let grid = Grid::cubic(2, 16, 4.0).unwrap();
        let ind = |lo: f64, hi: f64| {
            SampledField::from_physical(grid.clone(), move |x| {
                Complex64::new(if x.iter().all(|v| (lo..hi).contains(v)) { 1.0 } else { 0.0 }, 0.0)
            })
        };
        let (u, v) = (ind(-1.0, 0.5), ind(0.0, 1.5));
        let (p, q) = (1.5, 4.0);
        let exact = v.lp_norm(q).unwrap() * u.lp_norm(p / (p - 1.0)).unwrap();
        let e = opnorm_lower(&RankOne { u, v }, &NormProbe::new(p, q)).unwrap();
        assert!((e.bound - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn lorentz_mode_is_finite() {
        let grid = Grid::cubic(3, 8, 8.0).unwrap();
        let form = QuadraticForm::new(3, 1).unwrap();
        let m = resolvent_multiplier(&grid, &form, SpectralParameter::new(0.0, 1.0)).unwrap();
        let e = opnorm_lower(&m, &NormProbe::new(4.0 / 3.0, 12.0).lorentz().with_iterations(10)).unwrap();
        assert!(e.bound.is_finite() && e.bound > 0.0);
    }

    #[test]
    fn circle_avoids_real_axis() {
        let zs = circle_points(16);
        assert!(zs.iter().all(|z| z.b.abs() >= (std::f64::consts::PI / 16.0).sin() - 1e-15));
        assert!(zs.iter().all(|z| (z.modulus() - 1.0).abs() < 1e-15));
    }
}
