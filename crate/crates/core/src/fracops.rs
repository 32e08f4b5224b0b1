//! Nonlocal operators on the grid: the fractional Laplacian `Λ^α` (Fourier
//! multiplier `|ξ|^α` and a direct singular-integral oracle), the Hilbert
//! transform, Riesz potentials, `∂_x^{-1} Λ^α`, and the velocity
//! reconstruction `u = ∂_x^{-1}(G + Λ^α ρ)`.
//!
//! Normalization: `Λ^α` is the operator with symbol `|ξ|^α`, i.e. the
//! hypersingular integral `c_α ∫ (f(x) - f(y)) / |x - y|^{1+α} dy` with
//! `c_α = 2^α Γ((1+α)/2) / (√π |Γ(-α/2)|)`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, Field, Grid1D};
use crate::special::{gamma, hurwitz_zeta};

/// Fractional order `α`, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidParameter(format!("fractional order must lie in (0, 1), got {alpha}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for FracOrder {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FracOrder> for f64 {
    fn from(a: FracOrder) -> f64 {
        a.0
    }
}

/// `c_α` such that `c_α ∫ (f(x) - f(y)) / |x - y|^{1+α} dy` has symbol `|ξ|^α`.
pub fn fractional_laplacian_constant(alpha: FracOrder) -> f64 {
    let a = alpha.value();
    2f64.powf(a) * gamma(0.5 * (1.0 + a)) / (std::f64::consts::PI.sqrt() * gamma(-0.5 * a).abs())
}

/// How the truncated box stands in for the real line in the spectral `Λ^α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Plain periodic operator on `[-L, L)`.
    Periodic,
    /// Periodic operator minus the contribution of the periodic images of the
    /// data, so compactly supported fields see the whole-line operator.
    FreeSpace,
}

struct AlphaCache {
    bits: u64,
    /// `|ξ|^α`
    fraclap: Vec<f64>,
    /// `|ξ|^{α-1}` on nonzero modes, 0 at `ξ = 0`
    inv_frac: Vec<f64>,
    /// FFT (size 2n) of the free-space `∂_x^{-1} Λ^α` kernel weights
    velocity_kernel: Vec<Complex64>,
    /// FFT (size 2n) of the periodic-image kernel, when requested
    image_kernel: Option<Vec<Complex64>>,
}

/// FFT plans, scratch buffers and cached multipliers for one grid.
///
/// Holds mutable scratch space: use one workspace per thread.
pub struct SpectralWorkspace {
    grid: Arc<Grid1D>,
    boundary: Boundary,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    fwd2: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    buf2: Vec<Complex64>,
    scratch: Vec<Complex64>,
    sign: Vec<f64>,
    hilbert_sign: f64,
    cache: Option<AlphaCache>,
}

impl std::fmt::Debug for SpectralWorkspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralWorkspace")
            .field("n", &self.grid.n())
            .field("half_width", &self.grid.half_width())
            .field("boundary", &self.boundary)
            .finish()
    }
}

impl SpectralWorkspace {
    pub fn new(grid: Arc<Grid1D>) -> Self {
        Self::with_boundary(grid, Boundary::Periodic)
    }

    pub fn with_boundary(grid: Arc<Grid1D>, boundary: Boundary) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let fwd2 = planner.plan_fft_forward(2 * n);
        let inv2 = planner.plan_fft_inverse(2 * n);
        let scratch_len = [&fwd, &inv, &fwd2, &inv2]
            .iter()
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        // Odd symbols vanish at ξ = 0 and at the Nyquist mode, so real inputs stay real.
        let sign = (0..n)
            .map(|m| {
                let k = grid.mode_index(m);
                if k == 0 || m == n / 2 {
                    0.0
                } else {
                    (k as f64).signum()
                }
            })
            .collect();
        Self {
            grid,
            boundary,
            fwd,
            inv,
            fwd2,
            inv2,
            buf: vec![Complex64::default(); n],
            buf2: vec![Complex64::default(); 2 * n],
            scratch: vec![Complex64::default(); scratch_len],
            sign,
            hilbert_sign: 1.0,
            cache: None,
        }
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Flips the sign of the Hilbert multiplier. Exists only so the self-test
    /// can prove that it detects a broken operator.
    #[doc(hidden)]
    pub fn inject_hilbert_sign_fault(&mut self) {
        self.hilbert_sign = -self.hilbert_sign;
    }

    fn check(&self, f: &Field) -> Result<()> {
        f.check_grid(&self.grid)
    }

    fn ensure_alpha(&mut self, alpha: FracOrder) {
        let bits = alpha.value().to_bits();
        let want_images = self.boundary == Boundary::FreeSpace;
        if let Some(c) = &self.cache {
            if c.bits == bits && c.image_kernel.is_some() == want_images {
                return;
            }
        }
        let a = alpha.value();
        let xi = self.grid.wavenumbers();
        let fraclap = xi.iter().map(|k| k.abs().powf(a)).collect();
        let inv_frac = xi.iter().map(|&k| if k == 0.0 { 0.0 } else { k.abs().powf(a - 1.0) }).collect();
        let velocity_kernel = {
            let n = self.grid.n();
            let mut kern: Vec<Complex64> = (0..2 * n)
                .map(|r| {
                    let m = if r < n { r as i64 } else { r as i64 - 2 * n as i64 };
                    Complex64::new(velocity_kernel_weight(alpha, self.grid.spacing(), m), 0.0)
                })
                .collect();
            self.fwd2.process_with_scratch(&mut kern, &mut self.scratch);
            kern
        };
        let image_kernel = want_images.then(|| {
            let n = self.grid.n();
            let l2 = 2.0 * self.grid.half_width();
            let s = 1.0 + a;
            let c = fractional_laplacian_constant(alpha);
            let h = self.grid.spacing();
            let mut kern: Vec<Complex64> = (0..2 * n)
                .map(|r| {
                    let m = if r < n { r as i64 } else { r as i64 - 2 * n as i64 };
                    if m.unsigned_abs() as usize >= n {
                        return Complex64::default();
                    }
                    let d = m as f64 * h;
                    let p = l2.powf(-s) * (hurwitz_zeta(s, 1.0 + d / l2) + hurwitz_zeta(s, 1.0 - d / l2));
                    Complex64::new(-c * h * p, 0.0)
                })
                .collect();
            self.fwd2.process_with_scratch(&mut kern, &mut self.scratch);
            kern
        });
        self.cache = Some(AlphaCache { bits, fraclap, inv_frac, velocity_kernel, image_kernel });
    }

    /// Applies a Fourier multiplier `m_k` (FFT storage order) to real data.
    pub(crate) fn apply_multiplier(&mut self, values: &[f64], mult: impl Fn(usize) -> Complex64) -> Vec<f64> {
        let n = self.grid.n();
        for (b, v) in self.buf.iter_mut().zip(values) {
            *b = Complex64::new(*v, 0.0);
        }
        self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (m, b) in self.buf.iter_mut().enumerate() {
            *b *= mult(m);
        }
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        let scale = 1.0 / n as f64;
        self.buf.iter().map(|c| c.re * scale).collect()
    }

    /// Applies a real multiplier in place.
    pub(crate) fn apply_real_multiplier_in_place(&mut self, values: &mut [f64], mult: &[f64]) {
        let n = self.grid.n();
        for (b, v) in self.buf.iter_mut().zip(values.iter()) {
            *b = Complex64::new(*v, 0.0);
        }
        self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (b, m) in self.buf.iter_mut().zip(mult) {
            *b *= *m;
        }
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        let scale = 1.0 / n as f64;
        for (v, c) in values.iter_mut().zip(&self.buf) {
            *v = c.re * scale;
        }
    }

    /// Linear (non-circular) convolution of `values` with a kernel whose
    /// size-2n FFT is `kernel_hat`; returns the first n outputs.
    fn linear_convolution(&mut self, values: &[f64], kernel_hat: &[Complex64]) -> Vec<f64> {
        let n = self.grid.n();
        for b in self.buf2.iter_mut() {
            *b = Complex64::default();
        }
        for (b, v) in self.buf2.iter_mut().zip(values) {
            *b = Complex64::new(*v, 0.0);
        }
        self.fwd2.process_with_scratch(&mut self.buf2, &mut self.scratch);
        for (b, k) in self.buf2.iter_mut().zip(kernel_hat) {
            *b *= *k;
        }
        self.inv2.process_with_scratch(&mut self.buf2, &mut self.scratch);
        let scale = 1.0 / (2 * n) as f64;
        self.buf2[..n].iter().map(|c| c.re * scale).collect()
    }

    pub(crate) fn fraclap_values(&mut self, values: &[f64], alpha: FracOrder) -> Vec<f64> {
        self.ensure_alpha(alpha);
        let mult = std::mem::take(&mut self.cache.as_mut().expect("cache").fraclap);
        let mut out = values.to_vec();
        self.apply_real_multiplier_in_place(&mut out, &mult);
        self.cache.as_mut().expect("cache").fraclap = mult;
        if self.boundary == Boundary::FreeSpace {
            let kern = self.cache.as_mut().expect("cache").image_kernel.take().expect("image kernel");
            let images = self.linear_convolution(values, &kern);
            self.cache.as_mut().expect("cache").image_kernel = Some(kern);
            for (o, s) in out.iter_mut().zip(images) {
                *o -= s;
            }
        }
        out
    }

    /// Whole-line `∂_x^{-1} Λ^α` by product integration of the kernel
    /// `(c_α/α) sgn(x) |x|^{-α}` against the piecewise-linear interpolant.
    pub(crate) fn free_space_antiderivative_values(&mut self, values: &[f64], alpha: FracOrder) -> Vec<f64> {
        self.ensure_alpha(alpha);
        let kern = std::mem::take(&mut self.cache.as_mut().expect("cache").velocity_kernel);
        let out = self.linear_convolution(values, &kern);
        self.cache.as_mut().expect("cache").velocity_kernel = kern;
        out
    }
}

/// Product-integration weight of `(c_α/α) sgn(x)|x|^{-α}` against the hat
/// function centred `m` cells away.
fn velocity_kernel_weight(alpha: FracOrder, h: f64, m: i64) -> f64 {
    let a = alpha.value();
    let k2 = |v: f64| v.signum() * v.abs().powf(2.0 - a) / ((1.0 - a) * (2.0 - a));
    let mf = m as f64;
    let second_diff = k2(mf + 1.0) - 2.0 * k2(mf) + k2(mf - 1.0);
    fractional_laplacian_constant(alpha) / a * h.powf(1.0 - a) * second_diff
}

/// `Λ^α f` via the multiplier `|ξ|^α` (plus the image correction when the
/// workspace uses [`Boundary::FreeSpace`]).
pub fn fractional_laplacian_spectral(f: &Field, alpha: FracOrder, ws: &mut SpectralWorkspace) -> Result<Field> {
    ws.check(f)?;
    let out = ws.fraclap_values(f.values(), alpha);
    Field::new(f.grid().clone(), out)
}

/// Hilbert transform, symbol `-i sgn(ξ)`.
pub fn hilbert_transform(f: &Field, ws: &mut SpectralWorkspace) -> Result<Field> {
    ws.check(f)?;
    let sign = std::mem::take(&mut ws.sign);
    let hs = ws.hilbert_sign;
    let out = ws.apply_multiplier(f.values(), |m| Complex64::new(0.0, -hs * sign[m]));
    ws.sign = sign;
    Field::new(f.grid().clone(), out)
}

/// Riesz potential `Λ^{-s}`, symbol `|ξ|^{-s}`; the zero mode is dropped.
pub fn riesz_potential(f: &Field, s: f64, ws: &mut SpectralWorkspace) -> Result<Field> {
    ws.check(f)?;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!("Riesz potential order must lie in (0, 1), got {s}")));
    }
    let xi: Vec<f64> = ws.grid.wavenumbers().to_vec();
    let out = ws.apply_multiplier(f.values(), |m| {
        let k = xi[m].abs();
        Complex64::new(if k == 0.0 { 0.0 } else { k.powf(-s) }, 0.0)
    });
    Field::new(f.grid().clone(), out)
}

/// `∂_x^{-1} Λ^α f` through the multiplier `-i sgn(ξ) |ξ|^{α-1}`.
///
/// The multiplier fixes the result up to a constant; the constant is chosen
/// so the left-edge value equals the whole-line integral
/// `∫_{-∞}^{x_0} Λ^α f`, computed by direct quadrature of the zero-extended data.
pub fn antiderivative_fraclap(f: &Field, alpha: FracOrder, ws: &mut SpectralWorkspace) -> Result<Field> {
    ws.check(f)?;
    ws.ensure_alpha(alpha);
    let cache = ws.cache.as_mut().expect("cache");
    let inv = std::mem::take(&mut cache.inv_frac);
    let sign = std::mem::take(&mut ws.sign);
    let mut out = ws.apply_multiplier(f.values(), |m| Complex64::new(0.0, -sign[m] * inv[m]));
    ws.sign = sign;
    ws.cache.as_mut().expect("cache").inv_frac = inv;
    let anchor = left_edge_tail(f, alpha);
    let shift = anchor - out[0];
    for v in &mut out {
        *v += shift;
    }
    Field::new(f.grid().clone(), out)
}

/// `∫_{-∞}^{x_0} Λ^α f` for `f` extended by zero outside the grid.
fn left_edge_tail(f: &Field, alpha: FracOrder) -> f64 {
    let h = f.grid().spacing();
    f.values()
        .iter()
        .enumerate()
        .map(|(j, v)| velocity_kernel_weight(alpha, h, -(j as i64)) * v)
        .sum()
}

/// Whole-line `∂_x^{-1} Λ^α f` for `f` extended by zero outside the grid.
pub fn antiderivative_fraclap_free_space(f: &Field, alpha: FracOrder, ws: &mut SpectralWorkspace) -> Result<Field> {
    ws.check(f)?;
    let out = ws.free_space_antiderivative_values(f.values(), alpha);
    Field::new(f.grid().clone(), out)
}

/// Which discretization of `∂_x^{-1} Λ^α ρ` the velocity uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityRoute {
    /// Whole-line kernel convolution (no periodic images).
    #[default]
    FreeSpace,
    /// Periodic multiplier with the left-edge gauge of [`antiderivative_fraclap`].
    Spectral,
}

/// `u = ∂_x^{-1} G + ∂_x^{-1} Λ^α ρ`, vanishing at `x -> -∞`.
pub fn velocity_from_state(
    rho: &Field,
    g: &Field,
    alpha: FracOrder,
    ws: &mut SpectralWorkspace,
) -> Result<Field> {
    velocity_with_route(rho, g, alpha, ws, VelocityRoute::FreeSpace)
}

pub fn velocity_with_route(
    rho: &Field,
    g: &Field,
    alpha: FracOrder,
    ws: &mut SpectralWorkspace,
    route: VelocityRoute,
) -> Result<Field> {
    ws.check(rho)?;
    ws.check(g)?;
    let values = velocity_values(rho.values(), g.values(), alpha, ws, route);
    Field::new(rho.grid().clone(), values)
}

pub(crate) fn velocity_values(
    rho: &[f64],
    g: &[f64],
    alpha: FracOrder,
    ws: &mut SpectralWorkspace,
    route: VelocityRoute,
) -> Vec<f64> {
    let h = ws.grid.spacing();
    let mut u = grid::cumulative_trapezoid(g, h);
    let frac = match route {
        VelocityRoute::FreeSpace => ws.free_space_antiderivative_values(rho, alpha),
        VelocityRoute::Spectral => {
            let f = Field::from_vec_unchecked(ws.grid.clone(), rho.to_vec());
            antiderivative_fraclap(&f, alpha, ws).expect("same grid").into_values()
        }
    };
    for (u, f) in u.iter_mut().zip(frac) {
        *u += f;
    }
    u
}

/// Which continuation of the sampled data the quadrature oracle uses.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    /// Finest resolved scale; the symmetric increment is integrated down to `h/2`.
    pub resolution: f64,
    /// Beyond this distance the data vanish on both sides of `x`.
    pub reach: f64,
}

/// `Λ^α f(x)` by direct quadrature of the symmetric-increment form
/// `c_α ∫_0^∞ (2 f(x) - f(x+z) - f(x-z)) / z^{1+α} dz`.
///
/// Dyadic shells from `h/2` to `reach`, each split into cells of width at
/// most `h/2` (at least 16 per shell); on each cell the increment is taken
/// at the midpoint and the weight `z^{-1-α}` is integrated exactly. The core
/// `[0, h/2]` uses a second difference; beyond `reach` the tail is exact.
pub fn fractional_laplacian_quadrature_fn(
    f: impl Fn(f64) -> f64,
    alpha: FracOrder,
    x: f64,
    opts: QuadratureOptions,
) -> f64 {
    let a = alpha.value();
    let h = opts.resolution;
    let z_min = 0.5 * h;
    let fx = f(x);
    let weight = |lo: f64, hi: f64| (lo.powf(-a) - hi.powf(-a)) / a;
    let mut total = 0.0;
    let mut lo = z_min;
    while lo < opts.reach {
        let hi = (2.0 * lo).min(opts.reach);
        let cells = (((hi - lo) / (0.5 * h)).ceil() as usize).max(16);
        let w = (hi - lo) / cells as f64;
        for c in 0..cells {
            let a0 = lo + c as f64 * w;
            let a1 = a0 + w;
            let zm = 0.5 * (a0 + a1);
            total += (2.0 * fx - f(x + zm) - f(x - zm)) * weight(a0, a1);
        }
        lo = hi;
    }
    total += 2.0 * fx * opts.reach.powf(-a) / a;
    let second = (f(x + z_min) - 2.0 * fx + f(x - z_min)) / (z_min * z_min);
    total += -second * z_min.powf(2.0 - a) / (2.0 - a);
    fractional_laplacian_constant(alpha) * total
}

/// Quadrature oracle for sampled data, linearly interpolated and extended
/// by zero outside the grid.
pub fn fractional_laplacian_quadrature(f: &Field, alpha: FracOrder, x: f64) -> Result<f64> {
    let g = f.grid();
    let (lo, hi) = (-g.half_width(), g.half_width());
    if !(x >= lo && x < hi) {
        return Err(Error::OutOfDomain { x, lo, hi });
    }
    let opts = QuadratureOptions { resolution: g.spacing(), reach: 2.0 * g.half_width() };
    Ok(fractional_laplacian_quadrature_fn(|y| f.interpolate_zero_extended(y), alpha, x, opts))
}

/// Outcome of the Stroock-Varopoulos check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StroockVaropoulos {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Relative slack allowed when comparing the two sides.
pub const INEQUALITY_TOL: f64 = 1e-9;

/// `∫ v^p Λ^α v  >=  4p/(p+1)^2 ∫ (Λ^{α/2} v^{(p+1)/2})^2` for `v >= 0`.
pub fn stroock_varopoulos_check(
    v: &Field,
    p: f64,
    alpha: FracOrder,
    ws: &mut SpectralWorkspace,
) -> Result<StroockVaropoulos> {
    ws.check(v)?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("Stroock-Varopoulos needs p >= 1, got {p}")));
    }
    if v.min() < 0.0 {
        return Err(Error::InvalidParameter("Stroock-Varopoulos needs v >= 0".into()));
    }
    let h = v.grid().spacing();
    let lap_v = ws.fraclap_values(v.values(), alpha);
    let lhs = h * v.values().iter().zip(&lap_v).map(|(x, l)| x.powf(p) * l).sum::<f64>();
    let w: Vec<f64> = v.values().iter().map(|x| x.powf(0.5 * (p + 1.0))).collect();
    let half = ws.fraclap_values(&w, FracOrder(0.5 * alpha.value()));
    let energy = h * half.iter().map(|x| x * x).sum::<f64>();
    let rhs = 4.0 * p / ((p + 1.0) * (p + 1.0)) * energy;
    let holds = lhs >= rhs - INEQUALITY_TOL * rhs.abs();
    Ok(StroockVaropoulos { lhs, rhs, holds })
}

/// Both sides of the Gagliardo-Nirenberg type inequality, without its constant.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GagliardoNirenberg {
    pub lhs: f64,
    pub rhs_without_constant: f64,
    pub ratio: f64,
}

/// `||v||_q^{θ1}` against `||Λ^{α/2} |v|^{r/2}||_2^2 ||v||_1^{θ2}` with
/// `θ1 = q/(q-1) (r - 1 + α)` and `θ2 = θ1 - r`.
///
/// The energy is evaluated as `∫ w Λ^α w` with `w = |v|^{r/2}`.
pub fn gagliardo_nirenberg_check(
    v: &Field,
    r: f64,
    q: f64,
    alpha: FracOrder,
    ws: &mut SpectralWorkspace,
) -> Result<GagliardoNirenberg> {
    ws.check(v)?;
    if !(r > 2.0 && q > 1.0 && q < r && r < 2.0 * q) {
        return Err(Error::InvalidParameter(format!(
            "Gagliardo-Nirenberg needs r > 2, q > 1, q < r < 2q; got r = {r}, q = {q}"
        )));
    }
    if v.min() < 0.0 {
        return Err(Error::InvalidParameter("Gagliardo-Nirenberg check needs v >= 0".into()));
    }
    let h = v.grid().spacing();
    let theta1 = q / (q - 1.0) * (r - 1.0 + alpha.value());
    let theta2 = theta1 - r;
    let lhs = v.lp_norm(q)?.powf(theta1);
    let w: Vec<f64> = v.values().iter().map(|x| x.abs().powf(0.5 * r)).collect();
    let lw = ws.fraclap_values(&w, alpha);
    let energy = h * w.iter().zip(&lw).map(|(a, b)| a * b).sum::<f64>();
    let rhs = energy * v.lp_norm(1.0)?.powf(theta2);
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(GagliardoNirenberg { lhs, rhs_without_constant: rhs, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ws(n: usize, l: f64) -> SpectralWorkspace {
        SpectralWorkspace::new(Arc::new(Grid1D::new(n, l).unwrap()))
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn frac_order_bounds() {
        assert!(FracOrder::new(0.0).is_err());
        assert!(FracOrder::new(1.0).is_err());
        assert!(FracOrder::new(f64::NAN).is_err());
        assert!(FracOrder::new(0.5).is_ok());
    }

    #[test]
    fn constant_is_annihilated() {
        let mut w = ws(64, 3.0);
        let f = Field::constant(w.grid().clone(), 2.5);
        let a = FracOrder::new(0.3).unwrap();
        let out = fractional_laplacian_spectral(&f, a, &mut w).unwrap();
        assert!(out.sup_norm() < 1e-13);
        assert!(hilbert_transform(&f, &mut w).unwrap().sup_norm() < 1e-13);
        assert!(riesz_potential(&f, 0.5, &mut w).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn cosine_eigenfunction() {
        let mut w = ws(64, PI);
        let g = w.grid().clone();
        let f = Field::from_fn(g.clone(), |x| (3.0 * x).cos()).unwrap();
        let out = fractional_laplacian_spectral(&f, FracOrder::new(0.5).unwrap(), &mut w).unwrap();
        let expect: Vec<f64> = g.points().iter().map(|x| 3f64.sqrt() * (3.0 * x).cos()).collect();
        assert!(max_diff(out.values(), &expect) < 1e-12);

        let f2 = Field::from_fn(g.clone(), |x| (2.0 * x).cos()).unwrap();
        let r = riesz_potential(&f2, 0.5, &mut w).unwrap();
        let expect: Vec<f64> = g.points().iter().map(|x| (2.0 * x).cos() / 2f64.sqrt()).collect();
        assert!(max_diff(r.values(), &expect) < 1e-12);
    }

    #[test]
    fn hilbert_of_cos_and_sin() {
        let mut w = ws(64, PI);
        let g = w.grid().clone();
        for k in 1..5 {
            let kf = k as f64;
            let c = Field::from_fn(g.clone(), |x| (kf * x).cos()).unwrap();
            let s = Field::from_fn(g.clone(), |x| (kf * x).sin()).unwrap();
            let hc = hilbert_transform(&c, &mut w).unwrap();
            let hs = hilbert_transform(&s, &mut w).unwrap();
            assert!(max_diff(hc.values(), s.values()) < 1e-12);
            assert!(max_diff(hs.values(), c.scale(-1.0).values()) < 1e-12);
        }
    }

    #[test]
    fn injected_fault_breaks_hilbert() {
        let mut w = ws(64, PI);
        w.inject_hilbert_sign_fault();
        let g = w.grid().clone();
        let c = Field::from_fn(g.clone(), |x| x.cos()).unwrap();
        let hc = hilbert_transform(&c, &mut w).unwrap();
        let s = Field::from_fn(g, |x| x.sin()).unwrap();
        assert!(max_diff(hc.values(), s.values()) > 1.0);
    }

    #[test]
    fn antiderivative_fraclap_of_cosine() {
        let mut w = ws(128, PI);
        let g = w.grid().clone();
        let a = FracOrder::new(0.4).unwrap();
        let k = 3.0_f64;
        let f = Field::from_fn(g.clone(), |x| (k * x).cos()).unwrap();
        let out = antiderivative_fraclap(&f, a, &mut w).unwrap();
        let expect: Vec<f64> = g.points().iter().map(|x| k.powf(a.value() - 1.0) * (k * x).sin()).collect();
        let offset = out.values()[0] - expect[0];
        let shifted: Vec<f64> = out.values().iter().map(|v| v - offset).collect();
        assert!(max_diff(&shifted, &expect) < 1e-12);
        let zero = antiderivative_fraclap(&Field::zeros(g), a, &mut w).unwrap();
        assert!(zero.sup_norm() == 0.0);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let mut w = ws(64, PI);
        let other = Arc::new(Grid1D::new(32, PI).unwrap());
        let f = Field::zeros(other);
        assert!(matches!(hilbert_transform(&f, &mut w), Err(Error::GridMismatch)));
        assert!(fractional_laplacian_spectral(&f, FracOrder::new(0.5).unwrap(), &mut w).is_err());
    }

    #[test]
    fn quadrature_of_zero_and_out_of_domain() {
        let g = Arc::new(Grid1D::new(64, 2.0).unwrap());
        let f = Field::zeros(g);
        let a = FracOrder::new(0.5).unwrap();
        assert_eq!(fractional_laplacian_quadrature(&f, a, 0.3).unwrap(), 0.0);
        assert!(matches!(fractional_laplacian_quadrature(&f, a, 2.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn velocity_kernel_far_field_matches_power_law() {
        let a = FracOrder::new(0.5).unwrap();
        let h = 0.01;
        let c = fractional_laplacian_constant(a);
        for m in [50_i64, -200, 1000] {
            let d = m as f64 * h;
            let exact = c / 0.5 * d.signum() * d.abs().powf(-0.5) * h;
            let w = velocity_kernel_weight(a, h, m);
            assert!((w - exact).abs() < 1e-4 * exact.abs(), "m={m}: {w} vs {exact}");
        }
        assert_eq!(velocity_kernel_weight(a, h, 0), 0.0);
    }

    #[test]
    fn gagliardo_nirenberg_rejects_bad_exponents() {
        let mut w = ws(64, 4.0);
        let f = Field::zeros(w.grid().clone());
        let a = FracOrder::new(0.5).unwrap();
        assert!(gagliardo_nirenberg_check(&f, 2.0, 1.5, a, &mut w).is_err());
        assert!(gagliardo_nirenberg_check(&f, 5.0, 2.0, a, &mut w).is_err());
        let z = gagliardo_nirenberg_check(&f, 3.0, 2.0, a, &mut w).unwrap();
        assert_eq!(z.lhs, 0.0);
        assert_eq!(z.ratio, 0.0);
    }

    #[test]
    fn stroock_varopoulos_zero_and_negative() {
        let mut w = ws(64, 4.0);
        let g = w.grid().clone();
        let a = FracOrder::new(0.5).unwrap();
        let z = stroock_varopoulos_check(&Field::zeros(g.clone()), 2.0, a, &mut w).unwrap();
        assert_eq!((z.lhs, z.rhs, z.holds), (0.0, 0.0, true));
        let neg = Field::constant(g, -1.0);
        assert!(stroock_varopoulos_check(&neg, 2.0, a, &mut w).is_err());
    }
}
