//! Exact solutions: the Getoor profile `Φ_α`, its fractional Laplacian and
//! the velocity profile `U = ∂_x^{-1} Λ^α Φ_α`, the self-similar
//! (Barenblatt-type) density/velocity pair, and the rarefaction triple.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::FracOrder;
use crate::quadrature::tanh_sinh;
use crate::special::{gamma, hyp2f1_series};

/// `K(α)` in `Φ_α(x) = K (1 - x²)_+^{α/2}`.
pub fn getoor_constant(alpha: FracOrder) -> f64 {
    let a = alpha.value();
    gamma(0.5) / (2f64.powf(a) * gamma(1.0 + 0.5 * a) * gamma(0.5 * (1.0 + a)))
}

/// `∫ Φ_α dx = π / (2^α Γ((1+α)/2) Γ((3+α)/2))`.
///
/// This is not 1: about 1.97 at `α = 1/2`.
pub fn getoor_mass(alpha: FracOrder) -> f64 {
    let a = alpha.value();
    PI / (2f64.powf(a) * gamma(0.5 * (1.0 + a)) * gamma(0.5 * (3.0 + a)))
}

pub fn getoor_profile(alpha: FracOrder, x: f64) -> f64 {
    let w = 1.0 - x * x;
    if w <= 0.0 {
        0.0
    } else {
        getoor_constant(alpha) * w.powf(0.5 * alpha.value())
    }
}

/// `Λ^α Φ_α` outside the unit interval,
/// `H(x) = C |x|^{-1-α} F((1+α)/2, (2+α)/2; (3+α)/2; x^{-2})` with
/// `C = Γ(1/2) / (Γ(-α/2) Γ((3+α)/2)) < 0`.
#[derive(Debug, Clone, Copy)]
pub struct GetoorTail {
    alpha: f64,
    scale: f64,
    a: f64,
    b: f64,
    c: f64,
    // z -> 1 - z connection coefficients, s = c - a - b = -α/2
    s: f64,
    conn1: f64,
    conn2: f64,
}

impl GetoorTail {
    pub fn new(alpha: FracOrder) -> Self {
        let al = alpha.value();
        let (a, b, c) = (0.5 * (1.0 + al), 0.5 * (2.0 + al), 0.5 * (3.0 + al));
        let s = c - a - b;
        let gc = gamma(c);
        Self {
            alpha: al,
            scale: gamma(0.5) / (gamma(-0.5 * al) * gamma(c)),
            a,
            b,
            c,
            s,
            conn1: gc * gamma(s) / (gamma(c - a) * gamma(c - b)),
            conn2: gc * gamma(-s) / (gamma(a) * gamma(b)),
        }
    }

    /// Prefactor `C` of the far-field law `H(x) ~ C |x|^{-1-α}`.
    pub fn far_field_constant(&self) -> f64 {
        self.scale
    }

    /// `H` at `|x| = r > 1`, given `w = 1 - r^{-2}` computed by the caller.
    fn eval_rw(&self, r: f64, w: f64) -> f64 {
        let z = 1.0 - w;
        let f = if z <= 0.5 {
            hyp2f1_series(self.a, self.b, self.c, z, 1e-17, 10_000).value
        } else {
            let f1 = hyp2f1_series(self.a, self.b, 1.0 - self.s, w, 1e-17, 10_000).value;
            let f2 = hyp2f1_series(self.c - self.a, self.c - self.b, 1.0 + self.s, w, 1e-17, 10_000).value;
            self.conn1 * f1 + w.powf(self.s) * self.conn2 * f2
        };
        self.scale * r.powf(-1.0 - self.alpha) * f
    }

    /// `H(x)` for `|x| > 1`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let r = x.abs();
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("the exterior formula needs |x| > 1, got {x}")));
        }
        Ok(self.eval_rw(r, 1.0 - 1.0 / (r * r)))
    }

    /// `H(1 + d)` for `d > 0`, accurate as `d -> 0`.
    fn eval_offset(&self, d: f64) -> f64 {
        let r = 1.0 + d;
        self.eval_rw(r, d * (2.0 + d) / (r * r))
    }

    /// `∫_{-∞}^{-r} H = ∫_r^∞ H` by termwise integration of the Gauss series
    /// (valid for `r >= 2`, where it converges like `4^{-n}`).
    fn far_integral(&self, r: f64) -> f64 {
        let z = 1.0 / (r * r);
        let mut coef = 1.0;
        let mut zpow = 1.0;
        let mut sum = 0.0;
        for n in 0..10_000 {
            let nf = n as f64;
            let term = coef * zpow / (self.alpha + 2.0 * nf);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            coef *= (self.a + nf) * (self.b + nf) / ((self.c + nf) * (nf + 1.0));
            zpow *= z;
        }
        self.scale * r.powf(-self.alpha) * sum
    }

    /// `∫_r^∞ H(s) ds` for `r >= 1`.
    pub fn integral_from(&self, r: f64) -> f64 {
        assert!(r >= 1.0, "tail integral needs r >= 1");
        if r >= 2.0 {
            return self.far_integral(r);
        }
        let near = tanh_sinh(|d, _| self.eval_offset(d), r - 1.0, 1.0, 1e-14);
        near + self.far_integral(2.0)
    }
}

/// `Λ^α Φ_α(x)` with the closed-form tail evaluated directly.
pub fn getoor_fraclap_tail(alpha: FracOrder, x: f64) -> Result<f64> {
    GetoorTail::new(alpha).eval(x)
}

/// `Λ^α Φ_α(x)` on the whole line: 1 on `|x| <= 1`, the tail outside.
pub fn getoor_fraclap(alpha: FracOrder, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        1.0
    } else {
        GetoorTail::new(alpha).eval(x).expect("|x| > 1")
    }
}

/// Nodes of the cached reference mesh.
pub const U_CACHE_POINTS: usize = 1 << 16;
/// The cache covers `[-U_CACHE_RANGE, U_CACHE_RANGE]`.
pub const U_CACHE_RANGE: f64 = 100.0;
/// Below this `|y|` the cache is bypassed.
const NEAR_KINK: f64 = 1.25;

/// `U(y) = ∫_{-∞}^y Λ^α Φ_α`, tabulated once on a reference mesh.
///
/// `U(y) = y` on `[-1, 1]`. Outside, values come from linear interpolation
/// of exact node values, except within a few cells of the kinks at `±1`
/// and beyond the mesh, where `U` is evaluated directly.
#[derive(Debug, Clone)]
pub struct GetoorVelocityProfile {
    alpha: FracOrder,
    tail: GetoorTail,
    /// `∫_{-∞}^{-1} H`; equals -1 up to quadrature error
    left_mass: f64,
    step: f64,
    values: Vec<f64>,
}

impl GetoorVelocityProfile {
    pub fn new(alpha: FracOrder) -> Self {
        let tail = GetoorTail::new(alpha);
        let left_mass = tail.integral_from(1.0);
        let step = 2.0 * U_CACHE_RANGE / (U_CACHE_POINTS - 1) as f64;
        let mut p = Self { alpha, tail, left_mass, step, values: Vec::new() };
        let values = (0..U_CACHE_POINTS).map(|k| p.exact(-U_CACHE_RANGE + k as f64 * step)).collect();
        p.values = values;
        p
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    /// `U(-1)`, equal to -1 by the zero-mean property of `Λ^α Φ_α`.
    pub fn left_value(&self) -> f64 {
        self.left_mass
    }

    /// Direct evaluation without the cache.
    pub fn exact(&self, y: f64) -> f64 {
        if y <= -1.0 {
            self.tail.integral_from(-y)
        } else if y <= 1.0 {
            self.left_mass + y + 1.0
        } else {
            2.0 * self.left_mass + 2.0 - self.tail.integral_from(y)
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        // the derivative blows up like (|y| - 1)^{-α/2}: evaluate directly next to the kinks
        if y.abs() <= NEAR_KINK || y.abs() >= U_CACHE_RANGE {
            return self.exact(y);
        }
        let pos = (y + U_CACHE_RANGE) / self.step;
        let k = (pos.floor() as usize).min(U_CACHE_POINTS - 2);
        let x0 = -U_CACHE_RANGE + k as f64 * self.step;
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        let t = (y - x0) / self.step;
        v0 + t * (v1 - v0)
    }
}

fn profile_cache() -> &'static Mutex<HashMap<u64, Arc<GetoorVelocityProfile>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<GetoorVelocityProfile>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared, lazily built profile for `α`.
pub fn velocity_profile(alpha: FracOrder) -> Arc<GetoorVelocityProfile> {
    let key = alpha.value().to_bits();
    if let Some(p) = profile_cache().lock().expect("profile cache").get(&key) {
        return p.clone();
    }
    let built = Arc::new(GetoorVelocityProfile::new(alpha));
    profile_cache().lock().expect("profile cache").entry(key).or_insert(built).clone()
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time must be positive, got {t}")))
    }
}

/// `t^{-1/(1+α)} Φ_α(x t^{-1/(1+α)})`.
pub fn selfsimilar_density(alpha: FracOrder, x: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    let s = t.powf(1.0 / (1.0 + alpha.value()));
    Ok(getoor_profile(alpha, x / s) / s)
}

/// `U(x t^{-1/(1+α)})`.
pub fn selfsimilar_velocity(alpha: FracOrder, x: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    let s = t.powf(1.0 / (1.0 + alpha.value()));
    Ok(velocity_profile(alpha).eval(x / s))
}

/// Width `s(t)` and amplitude `A` of the mass-`m` Barenblatt solution
/// `ρ = (A/s) Φ_α(x/s)`, `u = A s^{-α} U(x/s)`, where `A = m / ∫Φ_α` and
/// `s^{1+α} = (1+α) A t`.
pub fn barenblatt_scales(alpha: FracOrder, mass: f64, t: f64) -> Result<(f64, f64)> {
    check_time(t)?;
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
    }
    let a = alpha.value();
    let amp = mass / getoor_mass(alpha);
    let s = ((1.0 + a) * amp * t).powf(1.0 / (1.0 + a));
    Ok((s, amp))
}

/// Density of the mass-`m` self-similar solution of `ρ_t + (ρ u)_x = 0`,
/// `u = ∂_x^{-1} Λ^α ρ`.
pub fn barenblatt_density(alpha: FracOrder, mass: f64, x: f64, t: f64) -> Result<f64> {
    let (s, amp) = barenblatt_scales(alpha, mass, t)?;
    Ok(amp / s * getoor_profile(alpha, x / s))
}

pub fn barenblatt_velocity(alpha: FracOrder, mass: f64, x: f64, t: f64) -> Result<f64> {
    let (s, amp) = barenblatt_scales(alpha, mass, t)?;
    Ok(amp * s.powf(-alpha.value()) * velocity_profile(alpha).eval(x / s))
}

/// Masses of the rarefaction wave `(ρ̄, Ḡ, ū)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RarefactionTriple {
    m_rho: f64,
    m_g: f64,
}

impl RarefactionTriple {
    pub fn new(m_rho: f64, m_g: f64) -> Result<Self> {
        if !(m_rho > 0.0 && m_rho.is_finite()) || !(m_g > 0.0 && m_g.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rarefaction masses must be positive, got M_rho = {m_rho}, M_G = {m_g}"
            )));
        }
        Ok(Self { m_rho, m_g })
    }

    pub fn m_rho(&self) -> f64 {
        self.m_rho
    }

    pub fn m_g(&self) -> f64 {
        self.m_g
    }

    fn on_fan(&self, x: f64, t: f64) -> bool {
        x > 0.0 && x <= self.m_g * t
    }

    pub fn velocity(&self, x: f64, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(if x <= 0.0 {
            0.0
        } else if x <= self.m_g * t {
            x / t
        } else {
            self.m_g
        })
    }

    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(if self.on_fan(x, t) { self.m_rho / self.m_g / t } else { 0.0 })
    }

    pub fn g(&self, x: f64, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(if self.on_fan(x, t) { 1.0 / t } else { 0.0 })
    }
}

pub fn rarefaction_velocity(rt: &RarefactionTriple, x: f64, t: f64) -> Result<f64> {
    rt.velocity(x, t)
}

pub fn rarefaction_density(rt: &RarefactionTriple, x: f64, t: f64) -> Result<f64> {
    rt.density(x, t)
}

pub fn rarefaction_g(rt: &RarefactionTriple, x: f64, t: f64) -> Result<f64> {
    rt.g(x, t)
}
