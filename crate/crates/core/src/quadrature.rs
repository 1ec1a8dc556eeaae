//! Gauss–Legendre rules, composite panels and a tensor-product cubature for
//! oscillatory integrands with node doubling.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Nodes per composite panel.
pub const PANEL_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on [-1, 1], cached by order.
pub fn gl_rule(order: usize) -> Arc<[(f64, f64)]> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<[(f64, f64)]>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(order)
        .or_insert_with(|| {
            let n = NonZeroUsize::new(order).expect("quadrature order must be positive");
            let rule = GaussLegendre::new(n);
            let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            pairs.into()
        })
        .clone()
}

/// Composite Gauss–Legendre nodes on `[a, b]` with `panels` equal panels.
pub fn composite_nodes(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let rule = gl_rule(order);
    let panels = panels.max(1);
    let w = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + w * p as f64;
        let mid = lo + 0.5 * w;
        for &(x, wt) in rule.iter() {
            out.push((mid + 0.5 * w * x, 0.5 * w * wt));
        }
    }
    out
}

/// Composite Gauss–Legendre integral of a real function.
pub fn integrate(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    composite_nodes(a, b, panels, PANEL_ORDER)
        .iter()
        .map(|&(x, w)| w * f(x))
        .sum()
}

/// Composite Gauss–Legendre integral of a complex function.
pub fn integrate_c(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> Complex64) -> Complex64 {
    composite_nodes(a, b, panels, PANEL_ORDER)
        .iter()
        .map(|&(x, w)| f(x) * w)
        .sum()
}

/// Result of a converged cubature.
#[derive(Debug, Clone, Copy)]
pub struct Cubature {
    pub value: Complex64,
    /// Integral of the modulus of the integrand at the final resolution.
    pub l1: f64,
    /// Largest per-axis node count used.
    pub nodes: usize,
    /// Change between the last two refinements.
    pub change: f64,
}

/// Tensor-product Gauss–Legendre cubature of `amp(x) * exp(2 pi i phase(x))` over a box.
///
/// Per-axis node counts start from the phase gradient (in cycles per unit) measured on a
/// coarse lattice and double until successive values agree.
#[derive(Debug, Clone)]
pub struct OscillatoryCubature {
    pub min_nodes: usize,
    pub nodes_per_cycle: f64,
    pub rel_tol: f64,
    /// Absolute floor relative to the integral of the modulus, for integrals that cancel.
    pub l1_floor: f64,
    pub max_nodes: usize,
}

impl Default for OscillatoryCubature {
    fn default() -> Self {
        Self {
            min_nodes: 64,
            nodes_per_cycle: 4.0,
            rel_tol: 1e-6,
            l1_floor: 1e-11,
            max_nodes: 1 << 16,
        }
    }
}

impl OscillatoryCubature {
    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Per-axis node counts resolving the phase, rounded up to whole panels.
    pub fn initial_nodes<P>(&self, domain: &[(f64, f64)], phase: &P, extra_cycles: &[f64]) -> Vec<usize>
    where
        P: Fn(&[f64]) -> f64 + Sync,
    {
        let grad = phase_gradient_bound(domain, phase);
        domain
            .iter()
            .enumerate()
            .map(|(a, &(lo, hi))| {
                let cycles = grad[a] * (hi - lo) + extra_cycles.get(a).copied().unwrap_or(0.0);
                let n = (self.nodes_per_cycle * cycles).ceil() as usize;
                round_to_panels(n.max(self.min_nodes))
            })
            .collect()
    }

    pub fn integrate<P, A>(&self, domain: &[(f64, f64)], phase: P, amp: A) -> Result<Cubature>
    where
        P: Fn(&[f64]) -> f64 + Sync,
        A: Fn(&[f64]) -> Complex64 + Sync,
    {
        self.integrate_hinted(domain, phase, amp, &[])
    }

    /// As [`integrate`](Self::integrate) with extra cycles per axis for amplitudes that oscillate.
    pub fn integrate_hinted<P, A>(
        &self,
        domain: &[(f64, f64)],
        phase: P,
        amp: A,
        extra_cycles: &[f64],
    ) -> Result<Cubature>
    where
        P: Fn(&[f64]) -> f64 + Sync,
        A: Fn(&[f64]) -> Complex64 + Sync,
    {
        let mut nodes = self.initial_nodes(domain, &phase, extra_cycles);
        let (mut prev, _) = tensor_sum(domain, &nodes, &phase, &amp);
        loop {
            for n in nodes.iter_mut() {
                *n *= 2;
            }
            let top = *nodes.iter().max().unwrap_or(&0);
            let (cur, l1) = tensor_sum(domain, &nodes, &phase, &amp);
            let change = (cur - prev).norm();
            if change <= self.rel_tol * cur.norm() + self.l1_floor * l1 {
                return Ok(Cubature {
                    value: cur,
                    l1,
                    nodes: top,
                    change,
                });
            }
            if top * 2 > self.max_nodes {
                return Err(Error::NonConvergence { change, nodes: top });
            }
            prev = cur;
        }
    }
}

fn round_to_panels(n: usize) -> usize {
    n.div_ceil(PANEL_ORDER) * PANEL_ORDER
}

/// Largest |d phase / dx_a| over a 17-point-per-axis lattice, padded by 25%.
pub fn phase_gradient_bound<P>(domain: &[(f64, f64)], phase: &P) -> Vec<f64>
where
    P: Fn(&[f64]) -> f64 + Sync,
{
    const M: usize = 17;
    let dim = domain.len();
    let total = M.pow(dim as u32);
    let mut grad = vec![0.0f64; dim];
    let mut x = vec![0.0; dim];
    for idx in 0..total {
        let mut r = idx;
        for a in 0..dim {
            let (lo, hi) = domain[a];
            x[a] = lo + (hi - lo) * (r % M) as f64 / (M - 1) as f64;
            r /= M;
        }
        for a in 0..dim {
            let (lo, hi) = domain[a];
            let h = 1e-6 * (hi - lo).max(1e-12);
            let keep = x[a];
            x[a] = keep + h;
            let fp = phase(&x);
            x[a] = keep - h;
            let fm = phase(&x);
            x[a] = keep;
            grad[a] = grad[a].max(((fp - fm) / (2.0 * h)).abs());
        }
    }
    grad.iter().map(|g| 1.25 * g).collect()
}

/// Tensor-product sum at the given per-axis node counts; returns the integral and the
/// integral of the modulus. Parallel over the first axis with an ordered reduction.
pub fn tensor_sum<P, A>(domain: &[(f64, f64)], nodes: &[usize], phase: &P, amp: &A) -> (Complex64, f64)
where
    P: Fn(&[f64]) -> f64 + Sync,
    A: Fn(&[f64]) -> Complex64 + Sync,
{
    let dim = domain.len();
    let axes: Vec<Vec<(f64, f64)>> = domain
        .iter()
        .zip(nodes)
        .map(|(&(lo, hi), &n)| composite_nodes(lo, hi, n / PANEL_ORDER, PANEL_ORDER))
        .collect();
    if dim == 0 {
        let a = amp(&[]);
        return (a * Complex64::cis(2.0 * std::f64::consts::PI * phase(&[])), a.norm());
    }
    let inner: usize = axes[1..].iter().map(Vec::len).product();
    let partial: Vec<(Complex64, f64)> = axes[0]
        .par_iter()
        .map(|&(x0, w0)| {
            let mut x = vec![0.0; dim];
            x[0] = x0;
            let mut acc = Complex64::new(0.0, 0.0);
            let mut l1 = 0.0;
            for idx in 0..inner {
                let mut r = idx;
                let mut w = w0;
                for a in 1..dim {
                    let n = axes[a].len();
                    let (xa, wa) = axes[a][r % n];
                    x[a] = xa;
                    w *= wa;
                    r /= n;
                }
                let v = amp(&x);
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                let e = Complex64::cis(2.0 * std::f64::consts::PI * phase(&x));
                acc += v * e * w;
                l1 += v.norm() * w;
            }
            (acc, l1)
        })
        .collect();
    partial
        .into_iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(s, l), (a, b)| (s + a, l + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        let v = integrate(-1.0, 2.0, 3, |x| x.powi(7) - 3.0 * x * x);
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn cubature_of_plane_wave() {
        // int_{[0,1]^2} e^{2 pi i (30 x + 7 y)} = 0 (whole periods)
        let c = OscillatoryCubature::default();
        let r = c
            .integrate(&[(0.0, 1.0), (0.0, 1.0)], |x| 30.0 * x[0] + 7.0 * x[1], |_| Complex64::new(1.0, 0.0))
            .unwrap();
        assert!(r.value.norm() < 1e-10);
        // int_0^1 e^{2 pi i 10.25 x} dx
        let k = 10.25;
        let r = c.integrate(&[(0.0, 1.0)], |x| k * x[0], |_| Complex64::new(1.0, 0.0)).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let exact = (Complex64::cis(two_pi * k) - 1.0) / Complex64::new(0.0, two_pi * k);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn cubature_reports_nonconvergence() {
        let c = OscillatoryCubature {
            max_nodes: 128,
            ..Default::default()
        };
        // A hidden amplitude oscillation defeats the phase-based node estimate.
        let r = c.integrate(&[(0.0, 1.0)], |_| 0.0, |x| Complex64::new((5000.0 * x[0]).sin() + 1.0, 0.0));
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
