//! Complex fields sampled on a periodic box, their discrete Fourier transforms in the
//! convention `f_hat(xi) = int e^{-2 pi i x . xi} f(x) dx`, and Lebesgue/Lorentz norms.
//!
//! Axis `i` has `n_i` samples at `x = -L_i/2 + j L_i/n_i` and frequencies
//! `c_i + m/L_i` for `m = -n_i/2 .. n_i/2 - 1`, stored with `m` ascending. The carrier
//! `c_i` centres the frequency window on a band away from the origin.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// One axis of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub n: usize,
    pub length: f64,
    pub carrier: f64,
}

impl Axis {
    pub fn new(n: usize, length: f64) -> Self {
        Self {
            n,
            length,
            carrier: 0.0,
        }
    }

    pub fn with_carrier(mut self, carrier: f64) -> Self {
        self.carrier = carrier;
        self
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn position(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    pub fn frequency(&self, i: usize) -> f64 {
        self.carrier + (i as f64 - (self.n / 2) as f64) / self.length
    }

    /// Half-width of the frequency window, `n / (2 L)`.
    pub fn nyquist(&self) -> f64 {
        self.n as f64 / (2.0 * self.length)
    }
}

/// Tensor grid; row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("grid needs at least one axis".into()));
        }
        for a in &axes {
            if a.n < 2 || !a.n.is_power_of_two() {
                return Err(Error::InvalidParameter(format!("axis size {} is not a power of two >= 2", a.n)));
            }
            if !(a.length > 0.0) || !a.length.is_finite() || !a.carrier.is_finite() {
                return Err(Error::InvalidParameter(format!("invalid axis length {} or carrier {}", a.length, a.carrier)));
            }
        }
        Ok(Self { axes })
    }

    /// `[-L/2, L/2)^d` with `n` samples per axis.
    pub fn cubic(d: usize, n: usize, length: f64) -> Result<Self> {
        Self::new(vec![Axis::new(n, length); d])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `h_1 h_2 ... h_d`.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).product()
    }

    /// `L_1 L_2 ... L_d`.
    pub fn volume(&self) -> f64 {
        self.axes.iter().map(|a| a.length).product()
    }

    pub fn is_isotropic(&self) -> bool {
        self.axes.iter().all(|a| a.n == self.axes[0].n && a.length == self.axes[0].length && a.carrier == 0.0)
    }

    /// Multi-index of a flat index.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for (i, a) in self.axes.iter().enumerate().rev() {
            out[i] = flat % a.n;
            flat /= a.n;
        }
    }

    pub fn position_into(&self, flat: usize, out: &mut [f64]) {
        let mut f = flat;
        for (i, a) in self.axes.iter().enumerate().rev() {
            out[i] = a.position(f % a.n);
            f /= a.n;
        }
    }

    pub fn frequency_into(&self, flat: usize, out: &mut [f64]) {
        let mut f = flat;
        for (i, a) in self.axes.iter().enumerate().rev() {
            out[i] = a.frequency(f % a.n);
            f /= a.n;
        }
    }

    pub fn position(&self, flat: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        self.position_into(flat, &mut x);
        x
    }

    pub fn frequency(&self, flat: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        self.frequency_into(flat, &mut x);
        x
    }

    /// Grid with every physical length scaled by `s` (frequencies by `1/s`).
    pub fn dilated(&self, s: f64) -> Self {
        Self {
            axes: self
                .axes
                .iter()
                .map(|a| Axis {
                    n: a.n,
                    length: a.length * s,
                    carrier: a.carrier / s,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Physical,
    Frequency,
}

impl Space {
    fn name(&self) -> &'static str {
        match self {
            Space::Physical => "physical",
            Space::Frequency => "frequency",
        }
    }
}

/// Values of a function on a [`Grid`], in one of the two spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<Complex64>,
    space: Space,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values, space })
    }

    pub fn zeros(grid: Grid, space: Space) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
            space,
        }
    }

    /// Samples `f(x)` at the physical grid points.
    pub fn from_physical(grid: Grid, f: impl Fn(&[f64]) -> Complex64 + Sync) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map_init(|| vec![0.0; grid.dim()], |x, i| {
                grid.position_into(i, x);
                f(x)
            })
            .collect();
        Self {
            grid,
            values,
            space: Space::Physical,
        }
    }

    /// Samples `g(xi)` at the grid frequencies.
    pub fn from_frequency(grid: Grid, g: impl Fn(&[f64]) -> Complex64 + Sync) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map_init(|| vec![0.0; grid.dim()], |x, i| {
                grid.frequency_into(i, x);
                g(x)
            })
            .collect();
        Self {
            grid,
            values,
            space: Space::Frequency,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn space(&self) -> Space {
        self.space
    }

    fn expect(&self, space: Space) -> Result<()> {
        if self.space != space {
            return Err(Error::WrongSpace {
                expected: space.name(),
                found: self.space.name(),
            });
        }
        Ok(())
    }

    /// Forward transform, physical to frequency.
    pub fn fourier(&self) -> Result<SampledField> {
        self.expect(Space::Physical)?;
        let mut v = self.values.clone();
        transform(&self.grid, &mut v, Direction::Forward);
        Ok(Self {
            grid: self.grid.clone(),
            values: v,
            space: Space::Frequency,
        })
    }

    /// Inverse transform, frequency to physical.
    pub fn inv_fourier(&self) -> Result<SampledField> {
        self.expect(Space::Frequency)?;
        let mut v = self.values.clone();
        transform(&self.grid, &mut v, Direction::Inverse);
        Ok(Self {
            grid: self.grid.clone(),
            values: v,
            space: Space::Physical,
        })
    }

    /// Pointwise product with `m(xi)` in frequency space.
    pub fn multiply_frequency(&self, m: impl Fn(&[f64]) -> Complex64 + Sync) -> Result<SampledField> {
        self.expect(Space::Frequency)?;
        let grid = &self.grid;
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map_init(|| vec![0.0; grid.dim()], |x, (i, v)| {
                grid.frequency_into(i, x);
                v * m(x)
            })
            .collect();
        Ok(Self {
            grid: grid.clone(),
            values,
            space: Space::Frequency,
        })
    }

    pub fn scale(&self, c: Complex64) -> SampledField {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            space: self.space,
        }
    }

    /// `self + c * other` on the same grid and space.
    pub fn axpy(&self, c: Complex64, other: &SampledField) -> Result<SampledField> {
        if self.grid != other.grid || self.space != other.space {
            return Err(Error::InvalidParameter("fields live on different grids or spaces".into()));
        }
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect(),
            space: self.space,
        })
    }

    /// Sum of `|v|^2` times the measure of the space: `h^d` physically, `L^{-d}` in frequency.
    pub fn l2_norm_sq(&self) -> f64 {
        let w = match self.space {
            Space::Physical => self.grid.cell_volume(),
            Space::Frequency => 1.0 / self.grid.volume(),
        };
        w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    /// `(h^d sum |f|^p)^{1/p}`, or the maximum for `p = inf`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.expect(Space::Physical)?;
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("p = {p} < 1")));
        }
        if p.is_infinite() {
            return Ok(self.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        let m = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if m == 0.0 {
            return Ok(0.0);
        }
        let s: f64 = self.values.iter().map(|v| (v.norm() / m).powf(p)).sum();
        Ok(m * (self.grid.cell_volume() * s).powf(1.0 / p))
    }

    /// Distribution function of `|f|` from the sorted samples.
    pub fn distribution(&self) -> Result<Distribution> {
        self.expect(Space::Physical)?;
        Ok(Distribution::new(self.values.iter().map(|v| v.norm()).collect(), self.grid.cell_volume()))
    }

    /// `int_0^inf mu(t)^{1/p} dt`.
    pub fn lorentz_p1(&self, p: f64) -> Result<f64> {
        check_lorentz_exponent(p)?;
        Ok(self.distribution()?.lorentz_p1(p))
    }

    /// `sup_t t mu(t)^{1/q}`.
    pub fn lorentz_qinf(&self, q: f64) -> Result<f64> {
        check_lorentz_exponent(q)?;
        Ok(self.distribution()?.lorentz_qinf(q))
    }

    /// Largest `|f|` relative to the total `L^2` mass outside the central half of the box.
    pub fn mass_outside_half_box(&self) -> Result<f64> {
        self.expect(Space::Physical)?;
        let grid = &self.grid;
        let mut x = vec![0.0; grid.dim()];
        let (mut outside, mut total) = (0.0, 0.0);
        for (i, v) in self.values.iter().enumerate() {
            grid.position_into(i, &mut x);
            let m = v.norm_sqr();
            total += m;
            if x.iter().zip(grid.axes()).any(|(xi, a)| xi.abs() > 0.25 * a.length) {
                outside += m;
            }
        }
        Ok(if total == 0.0 { 0.0 } else { outside / total })
    }

    /// Writes the binary format: magic `USOL`, version, header, then little-endian
    /// `re, im` pairs in row-major order.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(b"USOL")?;
        let space = match self.space {
            Space::Physical => 0u8,
            Space::Frequency => 1u8,
        };
        if self.grid.is_isotropic() {
            w.write_all(&1u32.to_le_bytes())?;
            w.write_all(&(self.grid.dim() as u32).to_le_bytes())?;
            w.write_all(&(self.grid.axes[0].n as u32).to_le_bytes())?;
            w.write_all(&self.grid.axes[0].length.to_le_bytes())?;
        } else {
            w.write_all(&2u32.to_le_bytes())?;
            w.write_all(&(self.grid.dim() as u32).to_le_bytes())?;
            for a in &self.grid.axes {
                w.write_all(&(a.n as u32).to_le_bytes())?;
                w.write_all(&a.length.to_le_bytes())?;
                w.write_all(&a.carrier.to_le_bytes())?;
            }
        }
        w.write_all(&[space])?;
        let mut buf = Vec::with_capacity(16 * self.values.len());
        for v in &self.values {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"USOL" {
            return Err(Error::Format("bad magic".into()));
        }
        let version = read_u32(r)?;
        let d = read_u32(r)? as usize;
        if d == 0 || d > 16 {
            return Err(Error::Format(format!("dimension {d}")));
        }
        let axes = match version {
            1 => {
                let n = read_u32(r)? as usize;
                let l = read_f64(r)?;
                vec![Axis::new(n, l); d]
            }
            2 => (0..d)
                .map(|_| -> Result<Axis> {
                    let n = read_u32(r)? as usize;
                    let l = read_f64(r)?;
                    let c = read_f64(r)?;
                    Ok(Axis::new(n, l).with_carrier(c))
                })
                .collect::<Result<_>>()?,
            v => return Err(Error::Format(format!("unsupported version {v}"))),
        };
        let grid = Grid::new(axes).map_err(|e| Error::Format(e.to_string()))?;
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let space = match flag[0] {
            0 => Space::Physical,
            1 => Space::Frequency,
            f => return Err(Error::Format(format!("space flag {f}"))),
        };
        let mut buf = vec![0u8; 16 * grid.len()];
        r.read_exact(&mut buf)?;
        let values = buf
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                )
            })
            .collect();
        Self::new(grid, values, space)
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn check_lorentz_exponent(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("Lorentz exponent {p} outside (1, inf)")));
    }
    Ok(())
}

/// Decreasing rearrangement of sampled magnitudes, each sample carrying measure `cell`.
#[derive(Debug, Clone)]
pub struct Distribution {
    sorted: Vec<f64>,
    cell: f64,
}

impl Distribution {
    pub fn new(mut mags: Vec<f64>, cell: f64) -> Self {
        mags.sort_by(|a, b| b.total_cmp(a));
        debug_assert!(mags.windows(2).all(|w| w[0] >= w[1]));
        Self { sorted: mags, cell }
    }

    /// `mu(t)`, the measure of `{|f| > t}`.
    pub fn measure_above(&self, t: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v > t);
        count as f64 * self.cell
    }

    pub fn lorentz_p1(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        (0..n)
            .map(|j| {
                let next = if j + 1 < n { self.sorted[j + 1] } else { 0.0 };
                (self.sorted[j] - next) * (((j + 1) as f64) * self.cell).powf(1.0 / p)
            })
            .sum()
    }

    pub fn lorentz_qinf(&self, q: f64) -> f64 {
        self.sorted
            .iter()
            .enumerate()
            .map(|(j, v)| v * (((j + 1) as f64) * self.cell).powf(1.0 / q))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

/// In-place transform along every axis.
fn transform(grid: &Grid, values: &mut [Complex64], dir: Direction) {
    let mut planner = FftPlanner::<f64>::new();
    let dims: Vec<usize> = grid.axes().iter().map(|a| a.n).collect();
    for (ax, axis) in grid.axes().iter().enumerate() {
        let n = axis.n;
        let fft = match dir {
            Direction::Forward => planner.plan_fft_forward(n),
            Direction::Inverse => planner.plan_fft_inverse(n),
        };
        let stride: usize = dims[ax + 1..].iter().product();
        
        // Pre- and post-factors of the shifted, modulated DFT on this axis.
        let half = (n / 2) as i64;
        let h = axis.spacing();
        let (pre, post): (Vec<Complex64>, Vec<Complex64>) = match dir {
            Direction::Forward => (
                (0..n).map(|j| Complex64::cis(-2.0 * PI * axis.position(j) * axis.carrier)).collect(),
                (0..n)
                    .map(|i| {
                        let m = i as i64 - half;
                        Complex64::new(if m % 2 == 0 { h } else { -h }, 0.0)
                    })
                    .collect(),
            ),
            Direction::Inverse => (
                (0..n)
                    .map(|i| {
                        let m = i as i64 - half;
                        Complex64::new(if m % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
                    })
                    .collect(),
                (0..n)
                    .map(|j| Complex64::cis(2.0 * PI * axis.position(j) * axis.carrier) / axis.length)
                    .collect(),
            ),
        };
        let run_line = |fft: &dyn Fft<f64>, buf: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>| {
            // buf arrives in storage order: physical j, or frequency index i (m = i - n/2).
            match dir {
                Direction::Forward => {
                    for (v, p) in buf.iter_mut().zip(&pre) {
                        *v *= p;
                    }
                    fft.process_with_scratch(buf, scratch);
                    // FFT bin k = m mod n; store at i = m + n/2.
                    buf.rotate_right(n / 2);
                    for (v, p) in buf.iter_mut().zip(&post) {
                        *v *= p;
                    }
                }
                Direction::Inverse => {
                    for (v, p) in buf.iter_mut().zip(&pre) {
                        *v *= p;
                    }
                    buf.rotate_left(n / 2);
                    fft.process_with_scratch(buf, scratch);
                    for (v, p) in buf.iter_mut().zip(&post) {
                        *v *= p;
                    }
                }
            }
        };
        let scratch_len = fft.get_inplace_scratch_len();
        if stride == 1 {
            values.par_chunks_mut(n).for_each_init(
                || (Vec::with_capacity(n), vec![Complex64::new(0.0, 0.0); scratch_len]),
                |(buf, scratch), chunk| {
                    buf.clear();
                    buf.extend_from_slice(chunk);
                    run_line(fft.as_ref(), buf, scratch);
                    chunk.copy_from_slice(buf);
                },
            );
        } else {
            let block = n * stride;
            values.par_chunks_mut(block).for_each_init(
                || (Vec::with_capacity(n), vec![Complex64::new(0.0, 0.0); scratch_len]),
                |(buf, scratch), chunk| {
                    for s in 0..stride {
                        buf.clear();
                        buf.extend((0..n).map(|j| chunk[j * stride + s]));
                        run_line(fft.as_ref(), buf, scratch);
                        for (j, v) in buf.iter().enumerate() {
                            chunk[j * stride + s] = *v;
                        }
                    }
                },
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gaussian_is_self_dual() {
        let g = Grid::cubic(1, 256, 16.0).unwrap();
        let f = SampledField::from_physical(g.clone(), |x| c((-PI * x[0] * x[0]).exp()));
        let fh = f.fourier().unwrap();
        for i in 0..g.len() {
            let xi = g.frequency(i)[0];
            assert!((fh.values()[i] - c((-PI * xi * xi).exp())).norm() < 1e-10);
        }
    }

    #[test]
    fn carrier_shifts_the_window() {
        let g = Grid::new(vec![Axis::new(128, 16.0).with_carrier(3.0)]).unwrap();
        let f = SampledField::from_physical(g.clone(), |x| {
            Complex64::cis(2.0 * PI * 3.0 * x[0]) * (-PI * x[0] * x[0]).exp()
        });
        let fh = f.fourier().unwrap();
        for i in 0..g.len() {
            let xi = g.frequency(i)[0] - 3.0;
            assert!((fh.values()[i] - c((-PI * xi * xi).exp())).norm() < 1e-10);
        }
    }

    #[test]
    fn delta_has_flat_spectrum() {
        let g = Grid::cubic(2, 16, 4.0).unwrap();
        let mut f = SampledField::zeros(g.clone(), Space::Physical);
        let origin = (0..g.len()).find(|&i| g.position(i).iter().all(|&x| x == 0.0)).unwrap();
        f.values_mut()[origin] = c(1.0 / g.cell_volume());
        for v in f.fourier().unwrap().values() {
            assert!((v - c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn norm_examples() {
        let g = Grid::cubic(1, 4, 1.0).unwrap();
        let mut f = SampledField::zeros(g, Space::Physical);
        f.values_mut()[1] = c(1.0);
        assert!((f.lp_norm(2.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(f.lp_norm(f64::INFINITY).unwrap(), 1.0);
        assert!(f.lp_norm(0.5).is_err());

        let g = Grid::cubic(1, 512, 16.0).unwrap();
        let f = SampledField::from_physical(g, |x| c((-PI * x[0] * x[0]).exp()));
        assert!((f.lp_norm(2.0).unwrap() - 2f64.powf(-0.25)).abs() < 1e-8);
    }

    #[test]
    fn lorentz_examples() {
        // value 2 on measure 1/4, value 1 on measure 1/2
        let g = Grid::cubic(1, 4, 1.0).unwrap();
        let f = SampledField::new(g, vec![c(2.0), c(1.0), c(1.0), c(0.0)], Space::Physical).unwrap();
        assert!((f.lorentz_qinf(2.0).unwrap() - 1.0).abs() < 1e-15);
        // indicator of measure 3/8
        let g = Grid::cubic(1, 8, 1.0).unwrap();
        let mut f = SampledField::zeros(g, Space::Physical);
        for i in 0..3 {
            f.values_mut()[i] = c(1.0);
        }
        let m: f64 = 3.0 / 8.0;
        assert!((f.lorentz_p1(1.5).unwrap() - m.powf(1.0 / 1.5)).abs() < 1e-15);
        assert!((f.lorentz_qinf(3.0).unwrap() - m.powf(1.0 / 3.0)).abs() < 1e-15);
        assert!(f.lorentz_p1(1.0).is_err());
    }

    #[test]
    fn binary_round_trip() {
        for g in [
            Grid::cubic(2, 8, 3.0).unwrap(),
            Grid::new(vec![Axis::new(4, 2.0).with_carrier(1.5), Axis::new(8, 1.0)]).unwrap(),
        ] {
            let f = SampledField::from_physical(g, |x| Complex64::new(x[0], x[1] * x[1]));
            let mut buf = Vec::new();
            f.write_to(&mut buf).unwrap();
            let back = SampledField::read_from(&mut buf.as_slice()).unwrap();
            assert_eq!(back, f);
        }
        assert!(SampledField::read_from(&mut &b"NOPE"[..]).is_err());
    }

    #[test]
    fn wrong_space_is_rejected() {
        let g = Grid::cubic(1, 4, 1.0).unwrap();
        let f = SampledField::zeros(g, Space::Frequency);
        assert!(matches!(f.fourier(), Err(Error::WrongSpace { .. })));
        assert!(f.lp_norm(2.0).is_err());
    }
}
