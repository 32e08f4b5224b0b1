#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use euler_align::closedform::RarefactionTriple;
use euler_align::quadrature::GaussPanels;
use euler_align::{Field, Grid1D, SolverConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

/// Every `*.toml` under `configs/`, sorted by name.
pub fn shipped_configs() -> Vec<(String, SolverConfig)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(configs_dir())
        .expect("configs directory")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    paths.sort();
    paths.into_iter().map(|p| (p.file_stem().unwrap().to_string_lossy().into_owned(), load_config(&p))).collect()
}

/// The solver part of a run configuration (the `[scaling]` table is dropped).
pub fn load_config(path: &Path) -> SolverConfig {
    let mut table: toml::Table = std::fs::read_to_string(path).unwrap().parse().unwrap();
    table.remove("scaling");
    toml::Value::Table(table).try_into().unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn shipped(name: &str) -> SolverConfig {
    load_config(&configs_dir().join(format!("{name}.toml")))
}

fn bump(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// Sum of one to three `C∞` bumps with support inside `|x| <= support`.
pub fn random_bumps(grid: &Arc<Grid1D>, rng: &mut ChaCha8Rng, support: f64) -> Field {
    let k = rng.random_range(1..=3);
    let parts: Vec<(f64, f64, f64)> = (0..k)
        .map(|_| {
            let radius = rng.random_range(0.25 * support..0.5 * support);
            let center = rng.random_range(-(support - radius)..(support - radius));
            (center, radius, rng.random_range(0.2..1.0))
        })
        .collect();
    Field::from_fn(grid.clone(), |x| parts.iter().map(|(c, r, a)| a * bump((x - c) / r)).sum()).unwrap()
}

/// `∬ ū φ_t + ū²/2 φ_x dx dt + ∫ ū(x,0) φ(x,0) dx` for
/// `φ = exp(-((x-x0)/σ)² - (t/τ)²)`, with `velocity(x, t)` and its data
/// `initial(x)`; the integrands are split at `kinks(t)`.
pub fn burgers_weak_residual(
    velocity: impl Fn(f64, f64) -> f64,
    initial: impl Fn(f64) -> f64,
    kinks: impl Fn(f64) -> Vec<f64>,
    x0: f64,
    sigma: f64,
    tau: f64,
) -> f64 {
    let gl = GaussPanels::new(20);
    let (xa, xb) = (x0 - 9.0 * sigma, x0 + 9.0 * sigma);
    let phi = |x: f64, t: f64| (-((x - x0) / sigma).powi(2) - (t / tau).powi(2)).exp();
    let phi_t = |x: f64, t: f64| -2.0 * t / (tau * tau) * phi(x, t);
    let phi_x = |x: f64, t: f64| -2.0 * (x - x0) / (sigma * sigma) * phi(x, t);
    let pieces = |t: f64| {
        let mut cuts = vec![xa];
        cuts.extend(kinks(t).into_iter().filter(|k| *k > xa && *k < xb));
        cuts.push(xb);
        cuts.sort_by(f64::total_cmp);
        cuts
    };
    let inner = |t: f64| {
        let cuts = pieces(t);
        cuts.windows(2)
            .map(|w| {
                gl.integrate(
                    |x| {
                        let u = velocity(x, t);
                        u * phi_t(x, t) + 0.5 * u * u * phi_x(x, t)
                    },
                    w[0],
                    w[1],
                    8,
                )
            })
            .sum::<f64>()
    };
    let bulk = gl.integrate(inner, 0.0, 9.0 * tau, 64);
    let cuts0 = pieces(0.0);
    let boundary: f64 = cuts0.windows(2).map(|w| gl.integrate(|x| initial(x) * phi(x, 0.0), w[0], w[1], 8)).sum();
    bulk + boundary
}

/// Weak residual of the rarefaction velocity of `triple`.
pub fn rarefaction_residual(triple: &RarefactionTriple, x0: f64, sigma: f64, tau: f64) -> f64 {
    let mg = triple.m_g();
    burgers_weak_residual(
        |x, t| if t > 0.0 { triple.velocity(x, t).unwrap() } else if x > 0.0 { mg } else { 0.0 },
        |x| if x > 0.0 { mg } else { 0.0 },
        |t| vec![0.0, mg * t],
        x0,
        sigma,
        tau,
    )
}
