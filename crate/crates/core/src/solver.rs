//! Time integration of the viscous system
//! `ρ_t + (ρu)_x = ερ_xx`, `G_t + (Gu)_x = εG_xx`, `u = ∂_x^{-1}(G + Λ^α ρ)`.
//!
//! Strang splitting: a diffusion half-step by exact integrating factor,
//! a Heun (SSP-RK2) transport step with `u` recomputed at each stage, and a
//! second diffusion half-step.

use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closedform::{getoor_mass, getoor_profile};
use crate::error::{Error, Result};
use crate::fracops::{velocity_values, FracOrder, SpectralWorkspace, VelocityRoute};
use crate::grid::{lp_norm_slice, Field, Grid1D, GridSpec};
use crate::quadrature::GaussPanels;

/// Transport discretization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxScheme {
    /// Pointwise flux, spectral derivative with 2/3-rule dealiasing.
    Spectral,
    /// First-order finite volumes, face velocity averaged from cell centres.
    #[default]
    Upwind,
}

/// Named initial profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// Normal density with the given mass and standard deviation.
    Gaussian {
        mass: f64,
        #[serde(default)]
        center: f64,
        width: f64,
    },
    /// `C∞` bump `exp(-1/(1-r²))`, `r = (x - center)/radius`, scaled to `mass`.
    Bump {
        mass: f64,
        #[serde(default)]
        center: f64,
        radius: f64,
    },
    /// `(A/s) Φ_α(x/s)`; `A = 1` unless a mass is given.
    Getoor {
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        mass: Option<f64>,
    },
    /// Two-column CSV as written by [`Field::write_csv`], on the run's grid.
    Csv { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

/// `∫_{-1}^1 exp(-1/(1-x²)) dx`
fn bump_integral() -> f64 {
    GaussPanels::new(16).integrate(bump_shape, -1.0, 1.0, 64)
}

fn bump_shape(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r * r)).exp()
    }
}

impl Profile {
    pub fn sample(&self, grid: &Arc<Grid1D>, alpha: FracOrder) -> Result<Field> {
        match self {
            Profile::Gaussian { mass, center, width } => {
                positive("width", *width)?;
                let norm = mass / (width * (2.0 * std::f64::consts::PI).sqrt());
                Field::from_fn(grid.clone(), |x| norm * (-0.5 * ((x - center) / width).powi(2)).exp())
            }
            Profile::Bump { mass, center, radius } => {
                positive("radius", *radius)?;
                let norm = mass / (radius * bump_integral());
                Field::from_fn(grid.clone(), |x| norm * bump_shape((x - center) / radius))
            }
            Profile::Getoor { width, mass } => {
                positive("width", *width)?;
                let amp = match mass {
                    Some(m) => m / getoor_mass(alpha),
                    None => 1.0,
                };
                Field::from_fn(grid.clone(), |x| amp / width * getoor_profile(alpha, x / width))
            }
            Profile::Csv { path } => Field::read_csv(path, grid.clone()),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// How `G0` is built from `ρ0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GMode {
    /// `G0 = c ρ0` with `0 <= b <= c <= a`.
    Proportional { b: f64, a: f64, c: f64 },
    Independent { g0: Profile },
    ZeroG,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDataSpec {
    pub rho0: Profile,
    pub mode: GMode,
}

/// Constants of the pointwise sandwich `0 <= bρ <= G <= aρ` and whether the
/// initial data satisfy it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub b: f64,
    pub a: f64,
    pub holds: bool,
}

fn default_cfl() -> f64 {
    0.4
}

fn default_margin_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub alpha: FracOrder,
    /// Viscosity; defaults to the grid spacing.
    #[serde(default)]
    pub epsilon: Option<f64>,
    pub grid: GridSpec,
    #[serde(default)]
    pub t_start: f64,
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub flux_scheme: FluxScheme,
    #[serde(default)]
    pub output_times: Vec<f64>,
    #[serde(default)]
    pub velocity: VelocityRoute,
    /// Abort once `|ρ|` or `|G|` beyond `3L/4` exceeds this fraction of its maximum.
    #[serde(default = "default_margin_tol")]
    pub margin_tol: f64,
    pub initial: InitialDataSpec,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<Arc<Grid1D>> {
        let grid = self.grid.build()?;
        if let Some(e) = self.epsilon {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::InvalidParameter(format!("epsilon must be >= 0, got {e}")));
            }
        }
        if !(self.t_start >= 0.0 && self.t_start.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_start must be >= 0, got {}", self.t_start)));
        }
        if !(self.t_end >= self.t_start && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter(format!("t_end must be >= t_start, got {}", self.t_end)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParameter(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.margin_tol > 0.0) {
            return Err(Error::InvalidParameter("margin_tol must be positive".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for &t in &self.output_times {
            if !(t >= self.t_start && t <= self.t_end) || t < prev {
                return Err(Error::InvalidParameter(format!(
                    "output times must be sorted and lie in [{}, {}]",
                    self.t_start, self.t_end
                )));
            }
            prev = t;
        }
        Ok(grid)
    }

    pub fn epsilon_value(&self, grid: &Grid1D) -> f64 {
        self.epsilon.unwrap_or(grid.spacing())
    }
}

/// `(ρ, G, t)` with the velocity it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub rho: Field,
    pub g: Field,
    pub u: Field,
    pub t: f64,
}

impl State {
    /// Builds a state and its velocity.
    pub fn new(rho: Field, g: Field, t: f64, alpha: FracOrder, ws: &mut SpectralWorkspace) -> Result<Self> {
        Self::with_route(rho, g, t, alpha, ws, VelocityRoute::FreeSpace)
    }

    pub fn with_route(
        rho: Field,
        g: Field,
        t: f64,
        alpha: FracOrder,
        ws: &mut SpectralWorkspace,
        route: VelocityRoute,
    ) -> Result<Self> {
        if !rho.same_grid(&g) {
            return Err(Error::GridMismatch);
        }
        rho.check_grid(ws.grid())?;
        let u = velocity_values(rho.values(), g.values(), alpha, ws, route);
        let u = Field::new(rho.grid().clone(), u)?;
        Ok(Self { rho, g, u, t })
    }
}

/// Samples the initial data and checks the sandwich constants.
pub fn make_initial_state(
    spec: &InitialDataSpec,
    grid: &Arc<Grid1D>,
    alpha: FracOrder,
    ws: &mut SpectralWorkspace,
) -> Result<(State, Sandwich)> {
    make_initial_state_at(spec, grid, alpha, ws, 0.0, VelocityRoute::FreeSpace)
}

pub(crate) fn make_initial_state_at(
    spec: &InitialDataSpec,
    grid: &Arc<Grid1D>,
    alpha: FracOrder,
    ws: &mut SpectralWorkspace,
    t0: f64,
    route: VelocityRoute,
) -> Result<(State, Sandwich)> {
    let rho = spec.rho0.sample(grid, alpha)?;
    if let Some((j, v)) = rho.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::InvalidInitialData(format!(
            "rho0 is negative ({v}) at x = {}",
            grid.points()[j]
        )));
    }
    let (g, sandwich) = match &spec.mode {
        GMode::Proportional { b, a, c } => {
            if !(*b >= 0.0 && b <= c && c <= a && a.is_finite()) {
                return Err(Error::InvalidInitialData(format!(
                    "proportional mode needs 0 <= b <= c <= a, got b = {b}, c = {c}, a = {a}"
                )));
            }
            (rho.scale(*c), Sandwich { b: *b, a: *a, holds: true })
        }
        GMode::ZeroG => (Field::zeros(grid.clone()), Sandwich { b: 0.0, a: 0.0, holds: true }),
        GMode::Independent { g0 } => {
            let g = g0.sample(grid, alpha)?;
            let s = measured_sandwich(&rho, &g);
            (g, s)
        }
    };
    check_support(&rho, "rho0")?;
    check_support(&g, "G0")?;
    let state = State::with_route(rho, g, t0, alpha, ws, route)?;
    Ok((state, sandwich))
}

/// Tightest `b <= G/ρ <= a` where `ρ > 0`; fails if `G` is negative or lives
/// where `ρ` vanishes.
fn measured_sandwich(rho: &Field, g: &Field) -> Sandwich {
    let mut a = 0.0_f64;
    let mut b = f64::INFINITY;
    let mut holds = true;
    for (r, gv) in rho.values().iter().zip(g.values()) {
        if *gv < 0.0 {
            holds = false;
        }
        if *r > 0.0 {
            let q = gv / r;
            a = a.max(q);
            b = b.min(q);
        } else if *gv != 0.0 {
            holds = false;
        }
    }
    if !b.is_finite() {
        b = 0.0;
    }
    Sandwich { b: b.max(0.0), a, holds }
}

/// Data must vanish (to `1e-12` relative) outside `[-L/2, L/2]`.
fn check_support(f: &Field, name: &str) -> Result<()> {
    let peak = f.sup_norm();
    let half = 0.5 * f.grid().half_width();
    for (x, v) in f.grid().points().iter().zip(f.values()) {
        if x.abs() > half && v.abs() > 1e-12 * peak {
            return Err(Error::InvalidInitialData(format!(
                "{name} is not supported in [-L/2, L/2]: value {v} at x = {x}"
            )));
        }
    }
    Ok(())
}

/// Precomputed operators for one configuration.
pub struct Stepper {
    alpha: FracOrder,
    epsilon: f64,
    cfl: f64,
    scheme: FluxScheme,
    route: VelocityRoute,
    ws: SpectralWorkspace,
    /// `ε σ(ξ)`: the diffusion symbol per mode
    diffusion_rate: Vec<f64>,
    /// `i ξ` with the 2/3 rule applied
    derivative: Vec<Complex64>,
    half_step: Option<(u64, Vec<f64>)>,
}

impl std::fmt::Debug for Stepper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stepper")
            .field("alpha", &self.alpha)
            .field("epsilon", &self.epsilon)
            .field("scheme", &self.scheme)
            .finish()
    }
}

impl Stepper {
    pub fn new(cfg: &SolverConfig) -> Result<Self> {
        let grid = cfg.validate()?;
        let ws = SpectralWorkspace::new(grid.clone());
        Ok(Self::with_workspace(cfg, ws))
    }

    pub fn with_workspace(cfg: &SolverConfig, ws: SpectralWorkspace) -> Self {
        let grid = ws.grid().clone();
        let n = grid.n();
        let h = grid.spacing();
        let epsilon = cfg.epsilon_value(&grid);
        let diffusion_rate = grid
            .wavenumbers()
            .iter()
            .map(|&k| match cfg.flux_scheme {
                FluxScheme::Spectral => epsilon * k * k,
                // symbol of the three-point Laplacian keeps the heat semigroup positive
                FluxScheme::Upwind => epsilon * (2.0 - 2.0 * (k * h).cos()) / (h * h),
            })
            .collect();
        let cutoff = n as i64 / 3;
        let derivative = (0..n)
            .map(|m| {
                let k = grid.mode_index(m);
                if k.abs() > cutoff || m == n / 2 {
                    Complex64::default()
                } else {
                    Complex64::new(0.0, grid.wavenumbers()[m])
                }
            })
            .collect();
        Self {
            alpha: cfg.alpha,
            epsilon,
            cfl: cfg.cfl,
            scheme: cfg.flux_scheme,
            route: cfg.velocity,
            ws,
            diffusion_rate,
            derivative,
            half_step: None,
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        self.ws.grid()
    }

    pub fn workspace(&mut self) -> &mut SpectralWorkspace {
        &mut self.ws
    }

    /// Largest step allowed by the CFL condition at `state`.
    pub fn max_dt(&self, state: &State) -> f64 {
        self.cfl * self.grid().spacing() / state.u.sup_norm().max(1e-12)
    }

    fn velocity(&mut self, rho: &[f64], g: &[f64]) -> Vec<f64> {
        velocity_values(rho, g, self.alpha, &mut self.ws, self.route)
    }

    fn diffuse(&mut self, values: &mut [f64], dt: f64) {
        if self.epsilon == 0.0 {
            return;
        }
        let key = dt.to_bits();
        let mult = match self.half_step.take() {
            Some((k, m)) if k == key => m,
            _ => self.diffusion_rate.iter().map(|r| (-r * dt).exp()).collect(),
        };
        self.ws.apply_real_multiplier_in_place(values, &mult);
        self.half_step = Some((key, mult));
    }

    /// `-(f u)_x`
    fn transport_rhs(&mut self, f: &[f64], u: &[f64]) -> Vec<f64> {
        let n = f.len();
        let h = self.grid().spacing();
        match self.scheme {
            FluxScheme::Upwind => {
                let mut flux = vec![0.0; n];
                for j in 0..n {
                    let jp = (j + 1) % n;
                    let uf = 0.5 * (u[j] + u[jp]);
                    flux[j] = uf.max(0.0) * f[j] + uf.min(0.0) * f[jp];
                }
                (0..n).map(|j| -(flux[j] - flux[(j + n - 1) % n]) / h).collect()
            }
            FluxScheme::Spectral => {
                let prod: Vec<f64> = f.iter().zip(u).map(|(a, b)| a * b).collect();
                let d = std::mem::take(&mut self.derivative);
                let out = self.ws.apply_multiplier(&prod, |m| -d[m]);
                self.derivative = d;
                out
            }
        }
    }

    /// One Strang step of size `dt`.
    pub fn step(&mut self, state: &State, dt: f64) -> Result<State> {
        state.rho.check_grid(self.grid())?;
        let limit = self.max_dt(state);
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, limit });
        }
        let half = 0.5 * dt;
        let mut rho = state.rho.values().to_vec();
        let mut g = state.g.values().to_vec();
        self.diffuse(&mut rho, half);
        self.diffuse(&mut g, half);

        let u0 = self.velocity(&rho, &g);
        let r_rho = self.transport_rhs(&rho, &u0);
        let r_g = self.transport_rhs(&g, &u0);
        let rho1: Vec<f64> = rho.iter().zip(&r_rho).map(|(a, b)| a + dt * b).collect();
        let g1: Vec<f64> = g.iter().zip(&r_g).map(|(a, b)| a + dt * b).collect();
        let u1 = self.velocity(&rho1, &g1);
        let r_rho1 = self.transport_rhs(&rho1, &u1);
        let r_g1 = self.transport_rhs(&g1, &u1);
        for j in 0..rho.len() {
            rho[j] = 0.5 * (rho[j] + rho1[j] + dt * r_rho1[j]);
            g[j] = 0.5 * (g[j] + g1[j] + dt * r_g1[j]);
        }

        self.diffuse(&mut rho, half);
        self.diffuse(&mut g, half);
        let t = state.t + dt;
        if rho.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { field: "rho", t });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { field: "G", t });
        }
        let u = self.velocity(&rho, &g);
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { field: "u", t });
        }
        let grid = self.grid().clone();
        Ok(State {
            rho: Field::from_vec_unchecked(grid.clone(), rho),
            g: Field::from_vec_unchecked(grid.clone(), g),
            u: Field::from_vec_unchecked(grid, u),
            t,
        })
    }
}

/// One step with a throwaway [`Stepper`] around `ws`.
pub fn step(state: &State, dt: f64, cfg: &SolverConfig, ws: SpectralWorkspace) -> Result<(State, SpectralWorkspace)> {
    let mut stepper = Stepper::with_workspace(cfg, ws);
    let next = stepper.step(state, dt)?;
    Ok((next, stepper.ws))
}

/// Per-step summary of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub t: f64,
    pub mass_rho: f64,
    pub mass_g: f64,
    /// `‖ρ‖_p` for `p = 1, 2, 4, ∞`
    pub rho_norms: [f64; 4],
    pub g_norms: [f64; 4],
    pub u_sup: f64,
    pub min_g: f64,
    /// `min (aρ - G)`
    pub min_upper_gap: f64,
    /// `max (bρ - G)`
    pub max_lower_excess: f64,
}

pub const SUMMARY_P: [f64; 4] = [1.0, 2.0, 4.0, f64::INFINITY];

pub const SUMMARY_COLUMNS: [&str; 15] = [
    "t",
    "M_rho",
    "M_G",
    "rho_L1",
    "rho_L2",
    "rho_L4",
    "rho_Linf",
    "G_L1",
    "G_L2",
    "G_L4",
    "G_Linf",
    "u_Linf",
    "min_G",
    "min_a_rho_minus_G",
    "max_b_rho_minus_G",
];

impl SummaryRow {
    pub fn of(state: &State, sandwich: &Sandwich) -> Self {
        let h = state.rho.grid().spacing();
        let norms = |v: &[f64]| SUMMARY_P.map(|p| lp_norm_slice(v, h, p).expect("p >= 1"));
        let (mut upper, mut lower) = (f64::INFINITY, f64::NEG_INFINITY);
        for (r, g) in state.rho.values().iter().zip(state.g.values()) {
            upper = upper.min(sandwich.a * r - g);
            lower = lower.max(sandwich.b * r - g);
        }
        Self {
            t: state.t,
            mass_rho: state.rho.integrate(),
            mass_g: state.g.integrate(),
            rho_norms: norms(state.rho.values()),
            g_norms: norms(state.g.values()),
            u_sup: state.u.sup_norm(),
            min_g: state.g.min(),
            min_upper_gap: upper,
            max_lower_excess: lower,
        }
    }

    pub fn to_array(&self) -> [f64; 15] {
        let mut out = [0.0; 15];
        out[0] = self.t;
        out[1] = self.mass_rho;
        out[2] = self.mass_g;
        out[3..7].copy_from_slice(&self.rho_norms);
        out[7..11].copy_from_slice(&self.g_norms);
        out[11] = self.u_sup;
        out[12] = self.min_g;
        out[13] = self.min_upper_gap;
        out[14] = self.max_lower_excess;
        out
    }

    pub fn from_array(a: &[f64; 15]) -> Self {
        Self {
            t: a[0],
            mass_rho: a[1],
            mass_g: a[2],
            rho_norms: [a[3], a[4], a[5], a[6]],
            g_norms: [a[7], a[8], a[9], a[10]],
            u_sup: a[11],
            min_g: a[12],
            min_upper_gap: a[13],
            max_lower_excess: a[14],
        }
    }
}

/// Output of [`run`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub epsilon: f64,
    pub sandwich: Sandwich,
    /// Initial state, then one state per output time.
    pub states: Vec<State>,
    /// One row for the initial state and one after every step.
    pub summary: Vec<SummaryRow>,
    pub steps: usize,
}

/// Integrates from `t_start` to `t_end`, landing exactly on every output time.
pub fn run(cfg: &SolverConfig) -> Result<Trajectory> {
    let grid = cfg.validate()?;
    let mut stepper = Stepper::new(cfg)?;
    let (mut state, sandwich) =
        make_initial_state_at(&cfg.initial, &grid, cfg.alpha, stepper.workspace(), cfg.t_start, cfg.velocity)?;
    let mut summary = vec![SummaryRow::of(&state, &sandwich)];
    let mut states = vec![state.clone()];
    let mut targets: Vec<f64> = cfg.output_times.iter().copied().filter(|&t| t > cfg.t_start).collect();
    targets.dedup();
    if targets.last().is_none_or(|&t| t < cfg.t_end) && cfg.t_end > cfg.t_start {
        // the final state is always kept
        targets.push(cfg.t_end);
    }
    let margin = 0.75 * grid.half_width();
    let mut steps = 0;
    for target in targets {
        while state.t < target {
            let limit = stepper.max_dt(&state);
            let remaining = target - state.t;
            // avoid a sliver step just short of the target
            let dt = if remaining <= limit * (1.0 + 1e-9) {
                remaining
            } else if remaining < 2.0 * limit {
                0.5 * remaining
            } else {
                limit
            };
            let mut next = stepper.step(&state, dt.min(limit))?;
            if dt == remaining {
                next.t = target;
            }
            state = next;
            steps += 1;
            check_margin(&state, margin, cfg.margin_tol)?;
            summary.push(SummaryRow::of(&state, &sandwich));
        }
        states.push(state.clone());
    }
    Ok(Trajectory { config: cfg.clone(), epsilon: stepper.epsilon(), sandwich, states, summary, steps })
}

fn check_margin(state: &State, margin: f64, tol: f64) -> Result<()> {
    let peak = state.rho.sup_norm().max(state.g.sup_norm());
    let pts = state.rho.grid().points();
    for j in 0..pts.len() {
        if pts[j].abs() >= margin {
            let v = state.rho.values()[j].abs().max(state.g.values()[j].abs());
            if v > tol * peak {
                return Err(Error::BoundaryMargin { t: state.t, limit: margin });
            }
        }
    }
    Ok(())
}
