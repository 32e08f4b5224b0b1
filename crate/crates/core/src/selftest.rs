//! Operator identities checked at run time, one JSON-serializable record per check.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closedform::{getoor_profile, velocity_profile, GetoorTail};
use crate::error::Result;
use crate::fracops::{
    antiderivative_fraclap, fractional_laplacian_constant, fractional_laplacian_quadrature,
    fractional_laplacian_spectral, hilbert_transform, riesz_potential, Boundary, FracOrder, SpectralWorkspace,
};
use crate::grid::{Field, Grid1D};
use crate::quadrature::tanh_sinh;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTestRecord {
    pub op: String,
    pub alpha: Option<f64>,
    pub n: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceProfile {
    #[default]
    Default,
    /// Quarter of the default tolerance on discretization-limited checks.
    Strict,
}

/// Deliberate defects, used to show that the suite catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    HilbertSign,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SelfTestOptions {
    pub seed: u64,
    pub profile: ToleranceProfile,
    pub fault: Option<Fault>,
}

pub const ALPHAS: [f64; 3] = [0.25, 0.5, 0.75];

fn record(op: &str, alpha: Option<f64>, n: usize, max_error: f64, tolerance: f64) -> SelfTestRecord {
    SelfTestRecord { op: op.into(), alpha, n, max_error, tolerance, passed: max_error <= tolerance }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Random trigonometric polynomial on `[-π, π)` with modes up to 6.
fn random_trig(grid: &Arc<Grid1D>, rng: &mut ChaCha8Rng) -> Result<Field> {
    let coefs: Vec<(f64, f64)> = (0..=6).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    Field::from_fn(grid.clone(), |x| {
        coefs.iter().enumerate().map(|(k, (a, b))| a * (k as f64 * x).cos() + b * (k as f64 * x).sin()).sum()
    })
}

/// Exterior `Λ^α Φ_α(x) = -c_α ∫_{-1}^{1} Φ_α(y) |x - y|^{-1-α} dy`.
fn getoor_exterior_by_quadrature(alpha: FracOrder, x: f64) -> f64 {
    let a = alpha.value();
    let c = fractional_laplacian_constant(alpha);
    -c * tanh_sinh(|y, _| getoor_profile(alpha, y) * (x - y).abs().powf(-1.0 - a), -1.0, 1.0, 1e-13)
}

pub fn run_selftest(opts: SelfTestOptions) -> Result<Vec<SelfTestRecord>> {
    let scale = match opts.profile {
        ToleranceProfile::Default => 1.0,
        ToleranceProfile::Strict => 0.25,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();

    let torus = Arc::new(Grid1D::new(128, PI)?);
    let mut ws = SpectralWorkspace::new(torus.clone());
    if opts.fault == Some(Fault::HilbertSign) {
        ws.inject_hilbert_sign_fault();
    }

    let mut err: f64 = 0.0;
    for k in 1..=5 {
        let kf = k as f64;
        let c = Field::from_fn(torus.clone(), |x| (kf * x).cos())?;
        let s = Field::from_fn(torus.clone(), |x| (kf * x).sin())?;
        err = err.max(max_diff(hilbert_transform(&c, &mut ws)?.values(), s.values()));
        err = err.max(max_diff(hilbert_transform(&s, &mut ws)?.values(), c.scale(-1.0).values()));
    }
    out.push(record("hilbert_transform_cos_sin", None, torus.n(), err, 1e-12));

    let f = random_trig(&torus, &mut rng)?;
    let mean = f.integrate() / (2.0 * PI);
    let centred = f.map(|v| v - mean)?;
    let hh = hilbert_transform(&hilbert_transform(&f, &mut ws)?, &mut ws)?;
    out.push(record("hilbert_involution", None, torus.n(), max_diff(hh.values(), centred.scale(-1.0).values()), 1e-12));

    for &a in &ALPHAS {
        let al = FracOrder::new(a)?;
        let c3 = Field::from_fn(torus.clone(), |x| (3.0 * x).cos())?;
        let l = fractional_laplacian_spectral(&c3, al, &mut ws)?;
        let expect = c3.scale(3f64.powf(a));
        out.push(record("fractional_laplacian_eigenfunction", Some(a), torus.n(), max_diff(l.values(), expect.values()), 1e-11));

        let back = riesz_potential(&fractional_laplacian_spectral(&f, al, &mut ws)?, a, &mut ws)?;
        out.push(record("riesz_inverts_fractional_laplacian", Some(a), torus.n(), max_diff(back.values(), centred.values()), 1e-11));

        let k = 2.0_f64;
        let c2 = Field::from_fn(torus.clone(), |x| (k * x).cos())?;
        let anti = antiderivative_fraclap(&c2, al, &mut ws)?;
        let expect: Vec<f64> = torus.points().iter().map(|x| k.powf(a - 1.0) * (k * x).sin()).collect();
        let shift = anti.values()[0] - expect[0];
        let err = anti.values().iter().zip(&expect).map(|(u, e)| (u - shift - e).abs()).fold(0.0, f64::max);
        out.push(record("antiderivative_fraclap_multiplier", Some(a), torus.n(), err, 1e-11));
    }

    let line = Arc::new(Grid1D::new(8192, 8.0)?);
    let mut free = SpectralWorkspace::with_boundary(line.clone(), Boundary::FreeSpace);
    for &a in &ALPHAS {
        let al = FracOrder::new(a)?;
        let phi = Field::from_fn(line.clone(), |x| getoor_profile(al, x))?;
        let l = fractional_laplacian_spectral(&phi, al, &mut free)?;
        let err = line
            .points()
            .iter()
            .zip(l.values())
            .filter(|(x, _)| x.abs() <= 0.9)
            .map(|(_, v)| (v - 1.0).abs())
            .fold(0.0, f64::max);
        out.push(record("getoor_identity_spectral", Some(a), line.n(), err, 2e-2 * scale));

        let mut qerr: f64 = 0.0;
        for x in [-0.9, -0.6, -0.2, 0.0, 0.35, 0.7, 0.9] {
            qerr = qerr.max((fractional_laplacian_quadrature(&phi, al, x)? - 1.0).abs());
        }
        out.push(record("getoor_identity_quadrature", Some(a), line.n(), qerr, 1e-2 * scale));

        let tail = GetoorTail::new(al);
        let mut terr: f64 = 0.0;
        for x in [1.05, 1.5, 2.0, 4.0, -3.0] {
            let exact = getoor_exterior_by_quadrature(al, x);
            terr = terr.max(((tail.eval(x)? - exact) / exact).abs());
        }
        out.push(record("getoor_tail_closed_form", Some(a), 0, terr, 1e-8));

        let u = velocity_profile(al);
        let uerr = (u.eval(-1.0) + 1.0).abs().max((u.eval(1.0) - u.eval(-1.0) - 2.0).abs());
        out.push(record("velocity_profile_unit_interval", Some(a), 0, uerr, 1e-9));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_suite_passes_and_fault_is_caught() {
        let clean = run_selftest(SelfTestOptions::default()).unwrap();
        for r in &clean {
            assert!(r.passed, "{r:?}");
        }
        let broken = run_selftest(SelfTestOptions { fault: Some(Fault::HilbertSign), ..Default::default() }).unwrap();
        assert!(broken.iter().any(|r| !r.passed));
    }
}
