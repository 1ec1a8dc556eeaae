//! Experiment configuration: `key = value` files with `#` comments, overridden by flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exponent_region::{vertex, ExponentPair, Vertex};
use crate::multipliers::SpectralParameter;
use crate::normest::circle_points;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `d = 3`, `n <= 64`, five-point sequences.
    Quick,
    /// `d = 3` and `d = 4`, `n <= 256`, seven-point sequences.
    Full,
}

impl Profile {
    pub fn as_str(&self) -> &'static str {
        match self {
            Profile::Quick => "quick",
            Profile::Full => "full",
        }
    }

    pub fn sequence_len(&self) -> usize {
        match self {
            Profile::Quick => 5,
            Profile::Full => 7,
        }
    }

    pub fn max_grid(&self) -> usize {
        match self {
            Profile::Quick => 64,
            Profile::Full => 256,
        }
    }
}

impl FromStr for Profile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            _ => Err(Error::InvalidParameter(format!("unknown profile {s}"))),
        }
    }
}

/// Geometric sequence `a, ..., b` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSeq {
    pub a: f64,
    pub b: f64,
    pub count: usize,
}

impl LambdaSeq {
    pub fn values(&self) -> Vec<f64> {
        crate::regression::geometric(self.a, self.b, self.count)
    }
}

impl FromStr for LambdaSeq {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("lambda sequence `{s}` is not a:b:count"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let a: f64 = parts[0].parse().map_err(|_| bad())?;
        let b: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        Ok(Self { a, b, count })
    }
}

impl fmt::Display for LambdaSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.a, self.b, self.count)
    }
}

/// Spectral parameters of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum ZSweep {
    /// `e^{i pi (2k+1)/N}`, `k = 0..N`.
    Circle(usize),
    /// `count` points from `z0` to `z1` on a segment.
    Line { z0: (f64, f64), z1: (f64, f64), count: usize },
}

impl ZSweep {
    pub fn points(&self) -> Vec<SpectralParameter> {
        match *self {
            ZSweep::Circle(n) => circle_points(n),
            ZSweep::Line { z0, z1, count } => (0..count)
                .map(|i| {
                    let t = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
                    SpectralParameter::new(z0.0 + t * (z1.0 - z0.0), z0.1 + t * (z1.1 - z0.1))
                })
                .collect(),
        }
    }
}

impl FromStr for ZSweep {
    type Err = Error;
    /// `circle:N` or `line:a0,b0:a1,b1:count`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("z sweep `{s}` is not circle:N or line:a0,b0:a1,b1:count"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let complex = |t: &str| -> Result<(f64, f64)> {
            let (a, b) = t.split_once(',').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        };
        match parts.as_slice() {
            ["circle", n] => Ok(ZSweep::Circle(n.parse().map_err(|_| bad())?)),
            ["line", a, b, n] => Ok(ZSweep::Line {
                z0: complex(a)?,
                z1: complex(b)?,
                count: n.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ZSweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZSweep::Circle(n) => write!(f, "circle:{n}"),
            ZSweep::Line { z0, z1, count } => write!(f, "line:{},{}:{},{}:{}", z0.0, z0.1, z1.0, z1.1, count),
        }
    }
}

/// Parses `ip,iq` where each entry is a rational `a/b`, a decimal, or a vertex name
/// (`F` alone names both coordinates).
pub fn parse_pair(s: &str, d: usize) -> Result<ExponentPair> {
    let s = s.trim();
    if let Ok(v) = Vertex::parse(s) {
        return vertex(d, v);
    }
    let bad = || Error::InvalidParameter(format!("exponent pair `{s}` is not ip,iq"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let rational = |t: &str| -> Result<f64> {
        let t = t.trim();
        match t.split_once('/') {
            Some((n, m)) => {
                let n: f64 = n.trim().parse().map_err(|_| bad())?;
                let m: f64 = m.trim().parse().map_err(|_| bad())?;
                Ok(n / m)
            }
            None => t.parse().map_err(|_| bad()),
        }
    };
    ExponentPair::approx(rational(a)?, rational(b)?)
}

/// Every knob of an experiment run. Unset optional fields fall back to the
/// experiment's profile defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub k: usize,
    pub grid: Option<usize>,
    pub box_len: Option<f64>,
    pub lambdas: Option<LambdaSeq>,
    pub z_sweep: Option<ZSweep>,
    pub pair: Option<String>,
    pub tolerances: BTreeMap<String, f64>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub seed: u64,
    pub profile: Profile,
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dim: 3,
            k: 1,
            grid: None,
            box_len: None,
            lambdas: None,
            z_sweep: None,
            pair: None,
            tolerances: BTreeMap::new(),
            out: None,
            svg: None,
            seed: 0,
            profile: Profile::Quick,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    /// Parses a configuration file body.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::InvalidParameter(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    /// Sets one key. `tol.<name>` keys override named tolerances.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("{key}: cannot parse `{value}`")))
        }
        match key {
            "dim" => self.dim = num(key, value)?,
            "signature_k" | "signature-k" | "k" => self.k = num(key, value)?,
            "grid" | "n" => self.grid = Some(num(key, value)?),
            "box" | "L" => self.box_len = Some(num(key, value)?),
            "lambda_seq" | "lambda-seq" => self.lambdas = Some(value.parse()?),
            "z_sweep" | "z-sweep" => self.z_sweep = Some(value.parse()?),
            "pair" => self.pair = Some(value.to_string()),
            "out" => self.out = Some(PathBuf::from(value)),
            "svg" => self.svg = Some(PathBuf::from(value)),
            "seed" => self.seed = num(key, value)?,
            "profile" => self.profile = value.parse()?,
            "workers" => self.workers = Some(num(key, value)?),
            _ => match key.strip_prefix("tol.") {
                Some(name) => {
                    self.tolerances.insert(name.to_string(), num(key, value)?);
                }
                None => return Err(Error::InvalidParameter(format!("unknown key `{key}`"))),
            },
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.dim < 3 {
            return bad(format!("dim = {} must be at least 3", self.dim));
        }
        if self.k < 1 || self.k >= self.dim {
            return bad(format!("signature k = {} must lie in [1, {}]", self.k, self.dim - 1));
        }
        if let Some(n) = self.grid {
            if !n.is_power_of_two() || n < 2 {
                return bad(format!("grid n = {n} must be a power of two"));
            }
        }
        if let Some(l) = self.box_len {
            if !(l > 0.0 && l.is_finite()) {
                return bad(format!("box L = {l} must be positive"));
            }
        }
        if let Some(s) = &self.lambdas {
            if !(s.a > 0.0 && s.a < 1.0 && s.b > 0.0 && s.b < 1.0) {
                return bad(format!("lambda sequence {s} must lie in (0, 1)"));
            }
            if s.count < 2 {
                return bad(format!("lambda sequence {s} needs at least two points"));
            }
        }
        if let Some(z) = &self.z_sweep {
            let pts = z.points();
            if pts.is_empty() {
                return bad(format!("z sweep {z} is empty"));
            }
        }
        if let Some(p) = &self.pair {
            parse_pair(p, self.dim)?;
        }
        if let Some(w) = self.workers {
            if w == 0 {
                return bad("workers must be positive".into());
            }
        }
        for (k, v) in &self.tolerances {
            if !(*v > 0.0 && v.is_finite()) {
                return bad(format!("tolerance {k} = {v} must be positive"));
            }
        }
        Ok(())
    }

    /// Named tolerance, or `default`.
    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn pair_or(&self, default: Vertex) -> Result<ExponentPair> {
        match &self.pair {
            Some(p) => parse_pair(p, self.dim),
            None => vertex(self.dim, default),
        }
    }

    /// `key = value` echo of every set field, in a fixed order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("dim".to_string(), self.dim.to_string()),
            ("signature_k".to_string(), self.k.to_string()),
            ("profile".to_string(), self.profile.as_str().to_string()),
            ("seed".to_string(), self.seed.to_string()),
        ];
        if let Some(n) = self.grid {
            out.push(("grid".into(), n.to_string()));
        }
        if let Some(l) = self.box_len {
            out.push(("box".into(), l.to_string()));
        }
        if let Some(s) = &self.lambdas {
            out.push(("lambda_seq".into(), s.to_string()));
        }
        if let Some(z) = &self.z_sweep {
            out.push(("z_sweep".into(), z.to_string()));
        }
        if let Some(p) = &self.pair {
            out.push(("pair".into(), p.clone()));
        }
        for (k, v) in &self.tolerances {
            out.push((format!("tol.{k}"), v.to_string()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_with_comments() {
        let cfg = ExperimentConfig::parse(
            "# run\ndim = 4\nsignature_k = 2 # mixed\ngrid = 32\nlambda_seq = 0.25:0.015625:5\nz_sweep = circle:8\npair = 5/6,1/6\ntol.slope = 0.2\n",
        )
        .unwrap();
        assert_eq!(cfg.dim, 4);
        assert_eq!(cfg.k, 2);
        assert_eq!(cfg.grid, Some(32));
        assert_eq!(cfg.lambdas.unwrap().values().len(), 5);
        assert_eq!(cfg.z_sweep.as_ref().unwrap().points().len(), 8);
        assert_eq!(cfg.tol("slope", 0.1), 0.2);
        cfg.validate().unwrap();
    }

    #[test]
    fn validation_rejects_bad_values() {
        for text in ["dim = 2", "k = 3", "grid = 48", "lambda_seq = 0.5:2:3", "box = -1", "workers = 0"] {
            let cfg = ExperimentConfig::parse(text).unwrap();
            assert!(cfg.validate().is_err(), "{text}");
        }
        assert!(ExperimentConfig::parse("colour = red").is_err());
        assert!(ExperimentConfig::parse("just text").is_err());
    }

    #[test]
    fn pair_forms() {
        assert_eq!(parse_pair("F", 3).unwrap(), ExponentPair::from_ints(5, 6, 1, 6));
        assert_eq!(parse_pair("1, 1/4", 3).unwrap(), ExponentPair::from_ints(1, 1, 1, 4));
        assert_eq!(parse_pair("0.5,0.5", 3).unwrap(), ExponentPair::from_ints(1, 2, 1, 2));
    }

    #[test]
    fn line_sweep() {
        let z: ZSweep = "line:1,1:1,3:3".parse().unwrap();
        let pts = z.points();
        assert_eq!((pts[1].a, pts[1].b), (1.0, 2.0));
        assert_eq!(z.to_string(), "line:1,1:1,3:3");
    }
}
