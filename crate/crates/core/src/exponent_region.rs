//! Exponent geometry: the trapezoid with vertices `B, B', C', C`, the duality map
//! `(x, y) -> (1 - y, 1 - x)`, and the scaling exponents predicted by the
//! counterexample families. Arithmetic is exact over the rationals.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Q64 = Ratio<i64>;

fn r(n: i64, d: i64) -> Q64 {
    Q64::new(n, d)
}

/// A point `(1/p, 1/q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExponentPair {
    pub ip: Q64,
    pub iq: Q64,
}

impl ExponentPair {
    pub fn new(ip: Q64, iq: Q64) -> Self {
        Self { ip, iq }
    }

    pub fn from_ints(ipn: i64, ipd: i64, iqn: i64, iqd: i64) -> Self {
        Self::new(r(ipn, ipd), r(iqn, iqd))
    }

    /// Rational approximation of a floating pair with denominators up to `10^6`.
    pub fn approx(ip: f64, iq: f64) -> Result<Self> {
        let conv = |v: f64| {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("exponent {v} outside [0, 1]")));
            }
            Q64::approximate_float(v)
                .map(|q| if *q.denom() > 1_000_000 { Q64::new((v * 1e6).round() as i64, 1_000_000) } else { q })
                .ok_or_else(|| Error::InvalidParameter(format!("exponent {v} not representable")))
        };
        Ok(Self::new(conv(ip)?, conv(iq)?))
    }

    /// `p` as a float (`inf` when `1/p = 0`).
    pub fn p(&self) -> f64 {
        1.0 / to_f64(self.ip)
    }

    pub fn q(&self) -> f64 {
        1.0 / to_f64(self.iq)
    }

    pub fn ip_f64(&self) -> f64 {
        to_f64(self.ip)
    }

    pub fn iq_f64(&self) -> f64 {
        to_f64(self.iq)
    }

    /// `1/p - 1/q`.
    pub fn gap(&self) -> Q64 {
        self.ip - self.iq
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.ip, self.iq)
    }
}

pub fn to_f64(q: Q64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Named points of the exponent diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    O,
}

impl Vertex {
    pub const ALL: [Vertex; 8] = [
        Vertex::A,
        Vertex::B,
        Vertex::C,
        Vertex::D,
        Vertex::E,
        Vertex::F,
        Vertex::G,
        Vertex::O,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Vertex::A => "A",
            Vertex::B => "B",
            Vertex::C => "C",
            Vertex::D => "D",
            Vertex::E => "E",
            Vertex::F => "F",
            Vertex::G => "G",
            Vertex::O => "O",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown vertex {s}")))
    }
}

/// Coordinates of a named point.
pub fn vertex(d: usize, name: Vertex) -> Result<ExponentPair> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!("dimension {d} < 3")));
    }
    let d = d as i64;
    let p = match name {
        Vertex::A => (r(d + 1, 2 * d), r(d - 3, 2 * d)),
        Vertex::B => (r(d, 2 * (d - 1)), r((d - 2) * (d - 2), 2 * d * (d - 1))),
        Vertex::C => (r(d + 1, 2 * d), r((d - 1) * (d - 1), 2 * d * (d + 1))),
        Vertex::D => (r(d + 1, 2 * d), Q64::zero()),
        Vertex::E => (Q64::one(), Q64::zero()),
        Vertex::F => (r(d + 2, 2 * d), r(d - 2, 2 * d)),
        Vertex::G => (Q64::zero(), Q64::one()),
        Vertex::O => (Q64::zero(), Q64::zero()),
    };
    Ok(ExponentPair::new(p.0, p.1))
}

/// `(x, y) -> (1 - y, 1 - x)`.
pub fn dual(pair: ExponentPair) -> ExponentPair {
    ExponentPair::new(Q64::one() - pair.iq, Q64::one() - pair.ip)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    StrongType,
    RestrictedWeakType,
    Fails,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::StrongType => "strong",
            Status::RestrictedWeakType => "restricted-weak",
            Status::Fails => "fails",
        }
    }
}

/// Named constraints of the trapezoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constraint {
    /// `2/(d+1) <= 1/p - 1/q <= 2/d`.
    ScalingGap,
    /// The edge `B'C'`.
    QLower,
    /// The edge `BC`.
    PUpper,
    /// `1/q <= 1/p`.
    PQOrder,
}

impl Constraint {
    pub fn as_str(&self) -> &'static str {
        match self {
            Constraint::ScalingGap => "scaling-gap",
            Constraint::QLower => "q-lower",
            Constraint::PUpper => "p-upper",
            Constraint::PQOrder => "p-q-order",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionVerdict {
    pub status: Status,
    pub violated: Vec<Constraint>,
}

/// Signed side of `p` relative to the line through `a` and `b`.
fn side(a: ExponentPair, b: ExponentPair, p: ExponentPair) -> Q64 {
    (b.ip - a.ip) * (p.iq - a.iq) - (b.iq - a.iq) * (p.ip - a.ip)
}

/// Membership in the trapezoid with all four closed edges included and the vertices removed.
pub fn classify(d: usize, pair: ExponentPair) -> Result<RegionVerdict> {
    let b = vertex(d, Vertex::B)?;
    let c = vertex(d, Vertex::C)?;
    let (b2, c2) = (dual(b), dual(c));
    if [b, c, b2, c2].contains(&pair) {
        return Ok(RegionVerdict {
            status: Status::RestrictedWeakType,
            violated: vec![],
        });
    }
    let dd = d as i64;
    let mut violated = Vec::new();
    let gap = pair.gap();
    if gap < r(2, dd + 1) || gap > r(2, dd) {
        violated.push(Constraint::ScalingGap);
    }
    // Interior lies on the same side of BC as the centroid; likewise for B'C'.
    let centroid = ExponentPair::new(
        (b.ip + c.ip + b2.ip + c2.ip) / Q64::from(4),
        (b.iq + c.iq + b2.iq + c2.iq) / Q64::from(4),
    );
    let inside = |a: ExponentPair, e: ExponentPair| {
        let s = side(a, e, pair);
        s.is_zero() || (s > Q64::zero()) == (side(a, e, centroid) > Q64::zero())
    };
    if !inside(b, c) {
        violated.push(Constraint::PUpper);
    }
    if !inside(b2, c2) {
        violated.push(Constraint::QLower);
    }
    if pair.iq > pair.ip {
        violated.push(Constraint::PQOrder);
    }
    let status = if violated.is_empty() { Status::StrongType } else { Status::Fails };
    Ok(RegionVerdict { status, violated })
}

/// The Sobolev range: the open segment of `1/p - 1/q = 2/d` between `B` and `B'`, with
/// the endpoints of restricted weak type.
pub fn sobolev_admissible(d: usize, pair: ExponentPair) -> Result<RegionVerdict> {
    let b = vertex(d, Vertex::B)?;
    let b2 = dual(b);
    if pair == b || pair == b2 {
        return Ok(RegionVerdict {
            status: Status::RestrictedWeakType,
            violated: vec![],
        });
    }
    let mut violated = Vec::new();
    if pair.gap() != r(2, d as i64) {
        violated.push(Constraint::ScalingGap);
    }
    if pair.ip <= b.ip {
        violated.push(Constraint::PUpper);
    }
    if pair.ip >= b2.ip {
        violated.push(Constraint::QLower);
    }
    let status = if violated.is_empty() { Status::StrongType } else { Status::Fails };
    Ok(RegionVerdict { status, violated })
}

/// Predicted log-log slopes of the extremizer quotients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedSlopes {
    /// `2 - d/p + d/q`.
    pub glambda: Q64,
    /// `(d+1)(1/p - 1/q) - 2`.
    pub knapp: Q64,
    /// `(d-1)/2`.
    pub stationary: Q64,
    /// `(d-2)/2`.
    pub cone: Q64,
}

pub fn predicted_slopes(d: usize, pair: ExponentPair) -> PredictedSlopes {
    let dq = Q64::from(d as i64);
    PredictedSlopes {
        glambda: Q64::from(2) - dq * pair.ip + dq * pair.iq,
        knapp: (dq + Q64::one()) * pair.gap() - Q64::from(2),
        stationary: (dq - Q64::one()) / Q64::from(2),
        cone: (dq - Q64::from(2)) / Q64::from(2),
    }
}

/// The twelve rows of the region table: the named points and the duals of `A, B, C, D`.
pub fn region_table(d: usize) -> Result<Vec<(String, ExponentPair, RegionVerdict, RegionVerdict)>> {
    let mut rows = Vec::new();
    for v in Vertex::ALL {
        let p = vertex(d, v)?;
        rows.push((v.name().to_string(), p, classify(d, p)?, sobolev_admissible(d, p)?));
    }
    for v in [Vertex::A, Vertex::B, Vertex::C, Vertex::D] {
        let p = dual(vertex(d, v)?);
        rows.push((format!("{}'", v.name()), p, classify(d, p)?, sobolev_admissible(d, p)?));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: i64, b: i64, c: i64, e: i64) -> ExponentPair {
        ExponentPair::from_ints(a, b, c, e)
    }

    #[test]
    fn vertex_values() {
        assert_eq!(vertex(3, Vertex::B).unwrap(), pair(3, 4, 1, 12));
        assert_eq!(vertex(3, Vertex::F).unwrap(), pair(5, 6, 1, 6));
        assert_eq!(vertex(4, Vertex::C).unwrap(), pair(5, 8, 9, 40));
        assert!(vertex(2, Vertex::A).is_err());
    }

    #[test]
    fn duality() {
        assert_eq!(dual(pair(3, 4, 1, 12)), pair(11, 12, 1, 4));
        assert_eq!(dual(pair(5, 6, 1, 6)), pair(5, 6, 1, 6));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(3, pair(5, 6, 1, 6)).unwrap().status, Status::StrongType);
        assert_eq!(classify(3, pair(3, 4, 1, 12)).unwrap().status, Status::RestrictedWeakType);
        let v = classify(3, pair(1, 2, 1, 2)).unwrap();
        assert_eq!(v.status, Status::Fails);
        assert_eq!(v.violated, vec![Constraint::ScalingGap]);
    }

    #[test]
    fn edges_are_included() {
        for d in 3..8 {
            let b = vertex(d, Vertex::B).unwrap();
            let c = vertex(d, Vertex::C).unwrap();
            let half = Q64::new(1, 2);
            for (a, e) in [(b, c), (dual(b), dual(c)), (b, dual(b)), (c, dual(c))] {
                let mid = ExponentPair::new((a.ip + e.ip) * half, (a.iq + e.iq) * half);
                assert_eq!(classify(d, mid).unwrap().status, Status::StrongType, "d = {d}, {mid}");
            }
        }
    }

    #[test]
    fn sobolev_examples() {
        assert_eq!(sobolev_admissible(3, pair(5, 6, 1, 6)).unwrap().status, Status::StrongType);
        assert_eq!(sobolev_admissible(3, pair(3, 4, 1, 12)).unwrap().status, Status::RestrictedWeakType);
        assert_eq!(sobolev_admissible(3, pair(11, 12, 1, 4)).unwrap().status, Status::RestrictedWeakType);
        assert_eq!(sobolev_admissible(3, pair(1, 1, 1, 4)).unwrap().status, Status::Fails);
    }

    #[test]
    fn slopes() {
        let s = predicted_slopes(3, pair(5, 6, 1, 6));
        assert_eq!(s.glambda, Q64::zero());
        assert_eq!(s.knapp, Q64::new(2, 3));
        assert_eq!(predicted_slopes(3, pair(1, 2, 1, 2)).knapp, Q64::from(-2));
        assert_eq!(predicted_slopes(3, pair(1, 1, 1, 4)).glambda, Q64::new(-1, 4));
        assert_eq!(s.stationary, Q64::one());
        assert_eq!(s.cone, Q64::new(1, 2));
    }

    #[test]
    fn region_table_has_twelve_rows() {
        assert_eq!(region_table(3).unwrap().len(), 12);
    }
}
