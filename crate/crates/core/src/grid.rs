//! Uniform periodic grid on `[-L, L)` and the fields sampled on it.
//!
//! The whole real line is truncated to a periodic box. Quadrature is the
//! periodic trapezoid rule, which on a periodic grid reduces to `h * sum`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible number of grid points.
pub const MIN_POINTS: usize = 8;

/// Uniform grid `x_j = -L + j h`, `h = 2L / n`, with its angular wavenumbers.
#[derive(Debug, Clone)]
pub struct Grid1D {
    n: usize,
    half_width: f64,
    spacing: f64,
    points: Vec<f64>,
    wavenumbers: Vec<f64>,
}

impl PartialEq for Grid1D {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_width == other.half_width
    }
}

/// Serializable description of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub half_width: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<Grid1D>> {
        Grid1D::new(self.n, self.half_width).map(Arc::new)
    }
}

impl Grid1D {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < MIN_POINTS {
            return Err(Error::BadGrid(format!("n = {n} < {MIN_POINTS}")));
        }
        if n % 2 != 0 {
            return Err(Error::BadGrid(format!("n = {n} must be even")));
        }
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(Error::BadGrid(format!("half width {half_width} must be finite and positive")));
        }
        let spacing = 2.0 * half_width / n as f64;
        let points = (0..n).map(|j| -half_width + j as f64 * spacing).collect();
        // FFT ordering: k = 0, 1, ..., n/2 - 1, -n/2, ..., -1.
        let wavenumbers = (0..n)
            .map(|m| {
                let k = if m < n / 2 { m as i64 } else { m as i64 - n as i64 };
                std::f64::consts::PI * k as f64 / half_width
            })
            .collect();
        Ok(Self { n, half_width, spacing, points, wavenumbers })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Grid spacing `h`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Angular wavenumbers `pi k / L` in FFT storage order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Signed integer mode index for FFT slot `m`.
    pub fn mode_index(&self, m: usize) -> i64 {
        if m < self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec { n: self.n, half_width: self.half_width }
    }

    /// Fractional index of `x`, i.e. `(x + L) / h`.
    pub fn locate(&self, x: f64) -> f64 {
        (x + self.half_width) / self.spacing
    }
}

/// Real samples of a function on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<Grid1D>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Arc<Grid1D>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidParameter(format!(
                "field has {} samples, grid has {}",
                values.len(),
                grid.n()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite sample at index {j}")));
        }
        Ok(Self { grid, values })
    }

    /// Wraps values the caller has already checked.
    pub(crate) fn from_vec_unchecked(grid: Arc<Grid1D>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        Self { grid, values }
    }

    pub fn zeros(grid: Arc<Grid1D>) -> Self {
        let n = grid.n();
        Self { grid, values: vec![0.0; n] }
    }

    pub fn constant(grid: Arc<Grid1D>, c: f64) -> Self {
        let n = grid.n();
        Self { grid, values: vec![c; n] }
    }

    /// Samples `f` at every grid point. Non-finite samples are rejected.
    pub fn from_fn(grid: Arc<Grid1D>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn check_grid(&self, grid: &Grid1D) -> Result<()> {
        if *self.grid == *grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Field> {
        Field::new(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: f64, other: &Field, b: f64) -> Result<Field> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Field::new(self.grid.clone(), values)
    }

    pub fn scale(&self, a: f64) -> Field {
        Field::from_vec_unchecked(self.grid.clone(), self.values.iter().map(|v| a * v).collect())
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn integrate(&self) -> f64 {
        integrate(self)
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self, p)
    }

    /// Linear interpolation, with zero outside `[x_0, x_{n-1}]`.
    pub fn interpolate_zero_extended(&self, x: f64) -> f64 {
        let s = self.grid.locate(x);
        if !(0.0..=(self.len() - 1) as f64).contains(&s) {
            return 0.0;
        }
        let j = s.floor() as usize;
        if j + 1 >= self.len() {
            return self.values[self.len() - 1];
        }
        let w = s - j as f64;
        (1.0 - w) * self.values[j] + w * self.values[j + 1]
    }

    /// Writes the two-column CSV `# x,value`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(32 * self.len() + 16);
        out.push_str("# x,value\n");
        for (x, v) in self.grid.points().iter().zip(&self.values) {
            let _ = writeln!(out, "{x},{v}");
        }
        std::fs::File::create(path)?.write_all(out.as_bytes())?;
        Ok(())
    }

    /// Reads a CSV written by [`Field::write_csv`]; the abscissae must match `grid`.
    pub fn read_csv(path: &Path, grid: Arc<Grid1D>) -> Result<Field> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut values = Vec::with_capacity(grid.n());
        for line in file.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',');
            let (Some(xs), Some(vs)) = (cols.next(), cols.next()) else {
                return Err(Error::Parse(format!("expected two columns in {line:?}")));
            };
            let x: f64 = xs.trim().parse().map_err(|e| Error::Parse(format!("{xs:?}: {e}")))?;
            let v: f64 = vs.trim().parse().map_err(|e| Error::Parse(format!("{vs:?}: {e}")))?;
            let j = values.len();
            if j >= grid.n() {
                return Err(Error::Parse(format!("more than {} rows", grid.n())));
            }
            if (x - grid.points()[j]).abs() > 1e-9 * grid.half_width().max(1.0) {
                return Err(Error::Parse(format!("row {j}: x = {x} does not match grid point {}", grid.points()[j])));
            }
            values.push(v);
        }
        Field::new(grid, values)
    }
}

/// Periodic trapezoid rule `h * sum_j f_j`.
pub fn integrate(f: &Field) -> f64 {
    f.grid.spacing() * f.values.iter().sum::<f64>()
}

/// Discrete `L^p` norm; `p = f64::INFINITY` gives the maximum modulus.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    lp_norm_slice(f.values(), f.grid.spacing(), p)
}

pub(crate) fn lp_norm_slice(values: &[f64], h: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    if p == 1.0 {
        return Ok(h * values.iter().map(|v| v.abs()).sum::<f64>());
    }
    if p == 2.0 {
        return Ok((h * values.iter().map(|v| v * v).sum::<f64>()).sqrt());
    }
    // Scale by the maximum so large p does not overflow.
    let m = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = values.iter().map(|v| (v.abs() / m).powf(p)).sum();
    Ok(m * (h * s).powf(1.0 / p))
}

/// Cumulative trapezoid integral anchored at the left grid edge: `g(x_0) = 0`.
pub fn antiderivative(f: &Field) -> Field {
    let values = cumulative_trapezoid(f.values(), f.grid.spacing());
    Field::from_vec_unchecked(f.grid.clone(), values)
}

pub(crate) fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, l: f64) -> Arc<Grid1D> {
        Arc::new(Grid1D::new(n, l).unwrap())
    }

    #[test]
    fn eight_points_on_four() {
        let g = grid(8, 4.0);
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.points(), &[-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn wavenumbers_are_integers_on_pi() {
        let g = grid(16, std::f64::consts::PI);
        let mut ks: Vec<f64> = g.wavenumbers().to_vec();
        ks.sort_by(f64::total_cmp);
        for (i, k) in ks.iter().enumerate() {
            assert!((k - (i as f64 - 8.0)).abs() < 1e-12);
        }
        assert_eq!(g.wavenumbers().iter().filter(|&&k| k == 0.0).count(), 1);
    }

    #[test]
    fn rejects_small_or_bad_grids() {
        assert!(matches!(Grid1D::new(4, 1.0), Err(Error::BadGrid(_))));
        assert!(Grid1D::new(16, f64::NAN).is_err());
        assert!(Grid1D::new(16, f64::INFINITY).is_err());
        assert!(Grid1D::new(16, -1.0).is_err());
    }

    #[test]
    fn spacing_times_n_is_domain_length() {
        for &(n, l) in &[(8, 4.0), (1024, 8.0), (4096, 3.7), (30, 0.1)] {
            let g = grid(n, l);
            assert!((g.spacing() * n as f64 - 2.0 * l).abs() <= 4.0 * f64::EPSILON * l);
            assert!(g.points().windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn integrate_constant_and_cosine() {
        let g = grid(8, 4.0);
        assert_eq!(integrate(&Field::constant(g.clone(), 1.0)), 8.0);
        let g = grid(64, 4.0);
        let f = Field::from_fn(g, |x| (std::f64::consts::PI * x / 4.0).cos()).unwrap();
        assert!(integrate(&f).abs() < 1e-14);
    }

    #[test]
    fn norms_of_constant_two() {
        let f = Field::constant(grid(8, 4.0), 2.0);
        assert_eq!(lp_norm(&f, 1.0).unwrap(), 16.0);
        assert_eq!(lp_norm(&f, f64::INFINITY).unwrap(), 2.0);
        assert!((lp_norm(&f, 3.0).unwrap() - (8.0_f64 * 8.0).powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(lp_norm(&f, 0.5).is_err());
    }

    #[test]
    fn antiderivative_of_zero_and_one() {
        let g = grid(8, 4.0);
        let z = antiderivative(&Field::zeros(g.clone()));
        assert!(z.values().iter().all(|&v| v == 0.0));
        let r = antiderivative(&Field::constant(g.clone(), 1.0));
        for (x, v) in g.points().iter().zip(r.values()) {
            assert!((v - (x + 4.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn antiderivative_reaches_bump_mass() {
        let g = grid(1024, 8.0);
        let s: f64 = 0.5;
        let norm = 2.0 / (s * (2.0 * std::f64::consts::PI).sqrt());
        let f = Field::from_fn(g, |x| norm * (-x * x / (2.0 * s * s)).exp()).unwrap();
        let a = antiderivative(&f);
        assert!((a.values()[a.len() - 1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn new_rejects_nan_and_wrong_length() {
        let g = grid(8, 1.0);
        assert!(Field::new(g.clone(), vec![0.0; 7]).is_err());
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(Field::new(g, v).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let g = grid(32, 2.0);
        let f = Field::from_fn(g.clone(), |x| (x * 1.3).sin() + 0.1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        f.write_csv(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# x,value\n"));
        let back = Field::read_csv(&p, g).unwrap();
        assert_eq!(back.values(), f.values());
    }
}
