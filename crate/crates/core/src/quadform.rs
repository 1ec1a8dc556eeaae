//! Diagonal quadratic forms of signature `(k, d - k)`, their linear isometries, and
//! the graph charts of the level sets `{Q = rho}`.
//!
//! Coordinates are split as `xi = (xi_1, xi', xi'', xi_d)` with `xi'` of length `k - 1`
//! and `xi''` of length `d - k - 1`. After the rotation
//! `eta_1 = (xi_d + xi_1)/sqrt 2`, `eta_d = (xi_d - xi_1)/sqrt 2` the form reads
//! `2 eta_1 eta_d - |eta'|^2 + |eta''|^2`, and `{Q = rho}` is locally the graph
//! `eta_d = G_rho(eta_tilde) = (|eta'|^2 - |eta''|^2 + rho) / (2 eta_1)`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::dyadic_decomp::ChartCutoff;
use crate::error::{Error, Result};

/// `Q(xi) = -xi_1^2 - ... - xi_k^2 + xi_{k+1}^2 + ... + xi_d^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticForm {
    d: usize,
    k: usize,
}

impl QuadraticForm {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidParameter(format!("dimension {d} < 3")));
        }
        if k < 1 || k > d {
            return Err(Error::InvalidParameter(format!("signature index {k} outside [1, {d}]")));
        }
        Ok(Self { d, k })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_non_elliptic(&self) -> bool {
        self.k < self.d
    }

    /// Sign of the `i`-th square.
    pub fn sign(&self, i: usize) -> f64 {
        if i < self.k {
            -1.0
        } else {
            1.0
        }
    }

    /// Checked evaluation.
    pub fn eval_q(&self, xi: &[f64]) -> Result<f64> {
        if xi.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: xi.len(),
            });
        }
        Ok(self.eval(xi))
    }

    /// Unchecked evaluation for inner loops.
    #[inline]
    pub fn eval(&self, xi: &[f64]) -> f64 {
        let neg: f64 = xi[..self.k].iter().map(|v| v * v).sum();
        let pos: f64 = xi[self.k..].iter().map(|v| v * v).sum();
        pos - neg
    }

    /// The form in graph coordinates, `2 eta_1 eta_d - |eta'|^2 + |eta''|^2`.
    #[inline]
    pub fn eval_eta(&self, eta: &[f64]) -> f64 {
        let d = self.d;
        let p: f64 = eta[1..self.k].iter().map(|v| v * v).sum();
        let pp: f64 = eta[self.k..d - 1].iter().map(|v| v * v).sum();
        2.0 * eta[0] * eta[d - 1] - p + pp
    }

    /// `xi -> eta`.
    pub fn rotate_to_graph(&self, xi: &[f64]) -> Result<Vec<f64>> {
        if !self.is_non_elliptic() {
            return Err(Error::EllipticForm { d: self.d, k: self.k });
        }
        if xi.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: xi.len(),
            });
        }
        let d = self.d;
        let mut eta = xi.to_vec();
        eta[0] = (xi[d - 1] + xi[0]) * FRAC_1_SQRT_2;
        eta[d - 1] = (xi[d - 1] - xi[0]) * FRAC_1_SQRT_2;
        debug_assert!(
            (self.eval_eta(&eta) - self.eval(xi)).abs() <= 1e-12 * (1.0 + xi.iter().map(|v| v * v).sum::<f64>())
        );
        Ok(eta)
    }

    /// `eta -> xi`, the inverse rotation.
    pub fn graph_to_xi(&self, eta: &[f64]) -> Vec<f64> {
        let d = self.d;
        let mut xi = eta.to_vec();
        xi[0] = (eta[0] - eta[d - 1]) * FRAC_1_SQRT_2;
        xi[d - 1] = (eta[0] + eta[d - 1]) * FRAC_1_SQRT_2;
        xi
    }
}

/// A linear map `M` with `Q(M xi) = Q(xi)` and `|det M| = 1`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    d: usize,
    m: Vec<f64>,
}

impl Isometry {
    pub fn identity(d: usize) -> Self {
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            m[i * d + i] = 1.0;
        }
        Self { d, m }
    }

    /// Block rotation `R1 (+) R2` with `R1` acting on the first `k` coordinates.
    /// Both blocks must be orthogonal; `r1` is `k x k` and `r2` is `(d-k) x (d-k)`, row-major.
    pub fn block(form: &QuadraticForm, r1: &[f64], r2: &[f64]) -> Result<Self> {
        let (d, k) = (form.d(), form.k());
        if r1.len() != k * k || r2.len() != (d - k) * (d - k) {
            return Err(Error::DimensionMismatch {
                expected: k * k + (d - k) * (d - k),
                got: r1.len() + r2.len(),
            });
        }
        let mut m = vec![0.0; d * d];
        for i in 0..k {
            for j in 0..k {
                m[i * d + j] = r1[i * k + j];
            }
        }
        let n = d - k;
        for i in 0..n {
            for j in 0..n {
                m[(k + i) * d + k + j] = r2[i * n + j];
            }
        }
        Ok(Self { d, m })
    }

    /// Rotation by `theta` in the coordinate plane `(i, j)`; both indices in the same block.
    pub fn plane_rotation(d: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut r = Self::identity(d);
        let (c, s) = (theta.cos(), theta.sin());
        r.m[i * d + i] = c;
        r.m[i * d + j] = -s;
        r.m[j * d + i] = s;
        r.m[j * d + j] = c;
        r
    }

    /// Boost `eta_1 -> a eta_1`, `eta_d -> eta_d / a` in graph coordinates, written in `xi`.
    pub fn boost(d: usize, a: f64) -> Self {
        let (c, s) = (0.5 * (a + 1.0 / a), 0.5 * (a - 1.0 / a));
        let mut r = Self::identity(d);
        r.m[0] = c;
        r.m[d - 1] = s;
        r.m[(d - 1) * d] = s;
        r.m[(d - 1) * d + d - 1] = c;
        r
    }

    /// Reflection of coordinate `i`.
    pub fn reflection(d: usize, i: usize) -> Self {
        let mut r = Self::identity(d);
        r.m[i * d + i] = -1.0;
        r
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.d;
        (0..d).map(|i| (0..d).map(|j| self.m[i * d + j] * x[j]).sum()).collect()
    }

    /// `self * other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let d = self.d;
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = (0..d).map(|l| self.m[i * d + l] * other.m[l * d + j]).sum();
            }
        }
        Isometry { d, m }
    }

    /// `M^{-1} = J M^T J` with `J` the signature matrix.
    pub fn inverse(&self, form: &QuadraticForm) -> Isometry {
        let d = self.d;
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = form.sign(i) * self.m[j * d + i] * form.sign(j);
            }
        }
        Isometry { d, m }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.d)
    }
}

/// Parameter box of a graph chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartDomain {
    pub eta1: (f64, f64),
    /// Bound on `|eta'|`.
    pub r_prime: f64,
    /// Bound on `|eta''|`.
    pub r_second: f64,
}

impl ChartDomain {
    /// `D = {eta_1 in [1, 2], |eta'| <= 1, |eta''| <= 1}`.
    pub fn standard() -> Self {
        Self {
            eta1: (1.0, 2.0),
            r_prime: 1.0,
            r_second: 1.0,
        }
    }

    /// Bounding box in the `d - 1` chart coordinates.
    pub fn bounding_box(&self, form: &QuadraticForm) -> Vec<(f64, f64)> {
        let mut b = vec![self.eta1];
        b.extend(std::iter::repeat_n((-self.r_prime, self.r_prime), form.k() - 1));
        b.extend(std::iter::repeat_n((-self.r_second, self.r_second), form.d() - form.k() - 1));
        b
    }
}

/// Tolerance on `eta_1` for chart membership.
pub const CHART_TOL: f64 = 1e-9;

/// The surface `{Q = rho}` written as `eta_d = G_rho(eta_tilde)` over a domain, then
/// moved by an isometry.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphChart {
    pub form: QuadraticForm,
    pub rho: f64,
    pub domain: ChartDomain,
    pub cutoff: ChartCutoff,
    pub iso: Isometry,
}

impl GraphChart {
    /// Chart over the standard domain `D`.
    pub fn new(form: QuadraticForm, rho: f64) -> Result<Self> {
        Self::with_domain(form, rho, ChartDomain::standard())
    }

    pub fn with_domain(form: QuadraticForm, rho: f64, domain: ChartDomain) -> Result<Self> {
        if !form.is_non_elliptic() {
            return Err(Error::EllipticForm {
                d: form.d(),
                k: form.k(),
            });
        }
        if rho == 0.0 || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("level rho = {rho} must be finite and nonzero")));
        }
        if domain.eta1.0 <= 0.0 {
            return Err(Error::InvalidParameter("chart domain must have eta_1 > 0".into()));
        }
        Ok(Self {
            form,
            rho,
            domain,
            cutoff: ChartCutoff::default(),
            iso: Isometry::identity(form.d()),
        })
    }

    pub fn with_isometry(mut self, iso: Isometry) -> Self {
        self.iso = iso;
        self
    }

    /// Number of chart coordinates, `d - 1`.
    pub fn dim(&self) -> usize {
        self.form.d() - 1
    }

    /// `G_rho(eta_tilde)`, checking the domain.
    pub fn graph_height(&self, eta_tilde: &[f64]) -> Result<f64> {
        if eta_tilde.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: eta_tilde.len(),
            });
        }
        let (lo, hi) = self.domain.eta1;
        let e1 = eta_tilde[0];
        if !(e1 >= lo - CHART_TOL && e1 <= hi + CHART_TOL) {
            return Err(Error::OutsideChart { eta1: e1, lo, hi });
        }
        Ok(self.height(eta_tilde))
    }

    /// `G_rho(eta_tilde)` without checks.
    #[inline]
    pub fn height(&self, eta_tilde: &[f64]) -> f64 {
        let k = self.form.k();
        let p: f64 = eta_tilde[1..k].iter().map(|v| v * v).sum();
        let pp: f64 = eta_tilde[k..].iter().map(|v| v * v).sum();
        (p - pp + self.rho) / (2.0 * eta_tilde[0])
    }

    /// Gradient of `G_rho`.
    pub fn height_gradient(&self, eta_tilde: &[f64]) -> Vec<f64> {
        let k = self.form.k();
        let e1 = eta_tilde[0];
        let mut g = Vec::with_capacity(eta_tilde.len());
        g.push(-self.height(eta_tilde) / e1);
        for (i, v) in eta_tilde.iter().enumerate().skip(1) {
            g.push(if i < k { v / e1 } else { -v / e1 });
        }
        g
    }

    /// Full graph-coordinate point `(eta_tilde, G(eta_tilde))`.
    pub fn eta_point(&self, eta_tilde: &[f64]) -> Vec<f64> {
        let mut eta = eta_tilde.to_vec();
        eta.push(self.height(eta_tilde));
        eta
    }

    /// Surface point in `xi` coordinates.
    pub fn point(&self, eta_tilde: &[f64]) -> Vec<f64> {
        let xi = self.form.graph_to_xi(&self.eta_point(eta_tilde));
        if self.iso.is_identity() {
            xi
        } else {
            self.iso.apply(&xi)
        }
    }

    /// Density of `delta(Q - rho)` in chart coordinates, `1 / (2 eta_1)`.
    #[inline]
    pub fn density(&self, eta_tilde: &[f64]) -> f64 {
        0.5 / eta_tilde[0]
    }

    /// `tilde chi(eta_tilde)`.
    #[inline]
    pub fn cutoff_at(&self, eta_tilde: &[f64]) -> f64 {
        self.cutoff.eval(eta_tilde, self.form.k())
    }

    /// Chart coordinates of a surface point given in `xi`, if it lies over the domain.
    pub fn chart_coords(&self, xi: &[f64]) -> Option<Vec<f64>> {
        let local = if self.iso.is_identity() {
            xi.to_vec()
        } else {
            self.iso.inverse(&self.form).apply(xi)
        };
        let eta = self.form.rotate_to_graph(&local).ok()?;
        let et = eta[..self.dim()].to_vec();
        if et[0] <= 0.0 {
            return None;
        }
        Some(et)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(d: usize, k: usize) -> QuadraticForm {
        QuadraticForm::new(d, k).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(q(3, 1).eval_q(&[1.0, 2.0, 2.0]).unwrap(), 7.0);
        assert_eq!(q(3, 1).eval_q(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(q(4, 2).eval_q(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(q(3, 1).eval_q(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rotation_examples() {
        let f = q(3, 1);
        let e = f.rotate_to_graph(&[1.0, 0.0, 1.0]).unwrap();
        assert!((e[0] - 2f64.sqrt()).abs() < 1e-15 && e[1] == 0.0 && e[2].abs() < 1e-15);
        let e = f.rotate_to_graph(&[0.0, 0.0, 1.0]).unwrap();
        assert!((e[0] - FRAC_1_SQRT_2).abs() < 1e-15 && (e[2] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((f.eval_eta(&e) - 1.0).abs() < 1e-15);
        assert!(matches!(q(3, 3).rotate_to_graph(&[0.0; 3]), Err(Error::EllipticForm { .. })));
    }

    #[test]
    fn height_examples() {
        let c = GraphChart::new(q(3, 1), 1.0).unwrap();
        assert_eq!(c.graph_height(&[1.0, 0.0]).unwrap(), 0.5);
        let c = GraphChart::new(q(3, 1), -1.0).unwrap();
        assert_eq!(c.graph_height(&[2.0, 1.0]).unwrap(), -0.5);
        let c = GraphChart::new(q(4, 2), 1.0).unwrap();
        assert_eq!(c.graph_height(&[1.0, 1.0, 1.0]).unwrap(), 0.5);
        assert!(c.graph_height(&[2.0 + 1e-10, 0.0, 0.0]).is_ok());
        assert!(matches!(c.graph_height(&[0.5, 0.0, 0.0]), Err(Error::OutsideChart { .. })));
    }

    #[test]
    fn boost_and_inverse_are_isometries() {
        let f = q(4, 2);
        let m = Isometry::boost(4, 1.7)
            .compose(&Isometry::plane_rotation(4, 0, 1, 0.3))
            .compose(&Isometry::reflection(4, 2));
        let x = [0.3, -1.2, 0.7, 2.1];
        assert!((f.eval(&m.apply(&x)) - f.eval(&x)).abs() < 1e-12);
        let back = m.inverse(&f).apply(&m.apply(&x));
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
        // boost scales the graph coordinates
        let eta = f.rotate_to_graph(&Isometry::boost(4, 2.0).apply(&f.graph_to_xi(&[1.0, 0.0, 0.0, 0.5]))).unwrap();
        assert!((eta[0] - 2.0).abs() < 1e-12 && (eta[3] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn chart_coordinates_round_trip() {
        let c = GraphChart::new(q(3, 1), 1.0).unwrap().with_isometry(Isometry::boost(3, 0.8));
        let et = [1.3, 0.4];
        let xi = c.point(&et);
        assert!((c.form.eval(&xi) - 1.0).abs() < 1e-12);
        let back = c.chart_coords(&xi).unwrap();
        assert!((back[0] - 1.3).abs() < 1e-12 && (back[1] - 0.4).abs() < 1e-12);
    }
}
