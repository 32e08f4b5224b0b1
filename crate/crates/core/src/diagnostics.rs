//! Post-processing of trajectories: decay-exponent fits, the Oleinik and
//! comparison checks, conservation and maximum-principle drift, and the two
//! scaling-limit experiments.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedform::{barenblatt_density, RarefactionTriple};
use crate::error::{Error, Result};
use crate::fracops::FracOrder;
use crate::grid::{lp_norm_slice, Grid1D};
use crate::solver::{run, GMode, Sandwich, SolverConfig, State, SummaryRow, Trajectory, SUMMARY_P};

/// Which exponent a fitted slope is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayReference {
    /// `-1 + 1/p`
    Sharp,
    /// `(-1 + 1/p) / (2 + α)`
    ViscosityBound { alpha: f64 },
}

impl DecayReference {
    pub fn slope(&self, p: f64) -> f64 {
        let sharp = -1.0 + 1.0 / p;
        match self {
            DecayReference::Sharp => sharp,
            DecayReference::ViscosityBound { alpha } => sharp / (2.0 + alpha),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub p: f64,
    /// Samples used in the fit (the last decade of the series).
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    pub reference_slope: f64,
}

/// Least-squares slope of `log ‖·‖` against `log t` over the last decade.
pub fn decay_fit(series: &[(f64, f64)], p: f64, reference: DecayReference) -> Result<DecayFit> {
    if series.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InsufficientData("times must be strictly increasing".into()));
    }
    if series.iter().any(|(t, v)| !(*t > 0.0) || !(*v > 0.0)) {
        return Err(Error::InsufficientData("decay fits need positive times and norms".into()));
    }
    let (t_first, t_last) = match (series.first(), series.last()) {
        (Some(a), Some(b)) => (a.0, b.0),
        _ => return Err(Error::InsufficientData("empty series".into())),
    };
    if t_last < 10.0 * t_first * (1.0 - 1e-12) {
        return Err(Error::InsufficientData(format!("series spans [{t_first}, {t_last}], less than a decade")));
    }
    let window: Vec<(f64, f64)> = series.iter().copied().filter(|(t, _)| *t >= t_last / 10.0 * (1.0 - 1e-12)).collect();
    if window.len() < 10 {
        return Err(Error::InsufficientData(format!("{} samples in the last decade, need 10", window.len())));
    }
    let xs: Vec<f64> = window.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = window.iter().map(|(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = if window.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(DecayFit {
        p,
        times: window.iter().map(|w| w.0).collect(),
        norms: window.iter().map(|w| w.1).collect(),
        fitted_slope: slope,
        slope_stderr: stderr,
        reference_slope: reference.slope(p),
    })
}

/// Which summary column a decay fit reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSeries {
    Rho,
    G,
}

/// `(t, ‖·‖_p)` pairs from a summary, restricted to `t in [t0, t1]`.
/// `p` must be one of 1, 2, 4 or infinity.
pub fn norm_series(summary: &[SummaryRow], which: NormSeries, p: f64, t0: f64, t1: f64) -> Result<Vec<(f64, f64)>> {
    let idx = SUMMARY_P
        .iter()
        .position(|q| *q == p)
        .ok_or_else(|| Error::InvalidParameter(format!("no summary column for p = {p}")))?;
    let mut out: Vec<(f64, f64)> = summary
        .iter()
        .filter(|r| r.t >= t0 && r.t <= t1)
        .map(|r| {
            let v = match which {
                NormSeries::Rho => r.rho_norms[idx],
                NormSeries::G => r.g_norms[idx],
            };
            (r.t, v)
        })
        .collect();
    out.dedup_by(|a, b| a.0 == b.0);
    Ok(out)
}

/// `t · sup (u_x)_+` and `t · ‖G‖_∞` along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OleinikReport {
    pub times: Vec<f64>,
    pub slope_bound: Vec<f64>,
    pub g_bound: Vec<f64>,
    /// Largest value of `slope_bound` over the upper half of the times.
    pub constant: f64,
    /// Log-log growth rate of `slope_bound` over the upper half.
    pub growth: f64,
    /// The same for `g_bound`.
    pub g_growth: f64,
    /// Both growth rates below [`OLEINIK_GROWTH_LIMIT`].
    pub bounded: bool,
}

/// A series counts as bounded when it grows slower than `t^{1/2}` over the
/// upper half of the run; `t · const` grows like `t`.
pub const OLEINIK_GROWTH_LIMIT: f64 = 0.5;

pub fn oleinik_check(traj: &Trajectory) -> OleinikReport {
    oleinik_series(&traj.states)
}

/// Forward differences of `u`; states at `t = 0` are skipped.
pub fn oleinik_series(states: &[State]) -> OleinikReport {
    let mut times = Vec::new();
    let mut slope_bound = Vec::new();
    let mut g_bound = Vec::new();
    for s in states.iter().filter(|s| s.t > 0.0) {
        let h = s.u.grid().spacing();
        let u = s.u.values();
        let max_slope = u.windows(2).map(|w| (w[1] - w[0]) / h).fold(0.0_f64, f64::max);
        times.push(s.t);
        slope_bound.push(s.t * max_slope);
        g_bound.push(s.t * s.g.sup_norm());
    }
    let (constant, growth) = upper_half_growth(&times, &slope_bound);
    let (_, g_growth) = upper_half_growth(&times, &g_bound);
    let bounded = growth < OLEINIK_GROWTH_LIMIT && g_growth < OLEINIK_GROWTH_LIMIT;
    OleinikReport { times, slope_bound, g_bound, constant, growth, g_growth, bounded }
}

fn upper_half_growth(times: &[f64], values: &[f64]) -> (f64, f64) {
    let Some(&t_last) = times.last() else {
        return (0.0, 0.0);
    };
    let t_mid = 0.5 * (times[0] + t_last);
    let pts: Vec<(f64, f64)> = times.iter().zip(values).filter(|(t, _)| **t >= t_mid).map(|(t, v)| (*t, *v)).collect();
    let constant = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    let growth = if pts.len() < 2 || first.1 <= 0.0 || last.1 <= 0.0 || last.0 <= first.0 {
        0.0
    } else {
        (last.1 / first.1).ln() / (last.0 / first.0).ln()
    };
    (constant, growth)
}

/// Worst violations of `0 <= bρ <= G <= aρ` over all stored states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub min_g: f64,
    /// `min (aρ - G)`
    pub min_upper_gap: f64,
    /// `min (G - bρ)`
    pub min_lower_gap: f64,
    pub b: f64,
    pub a: f64,
}

impl ComparisonReport {
    pub fn worst(&self) -> f64 {
        self.min_g.min(self.min_upper_gap).min(self.min_lower_gap)
    }
}

pub fn comparison_principle_report(traj: &Trajectory) -> ComparisonReport {
    comparison_over_states(&traj.states, &traj.sandwich)
}

pub fn comparison_over_states(states: &[State], sandwich: &Sandwich) -> ComparisonReport {
    let mut r = ComparisonReport {
        min_g: f64::INFINITY,
        min_upper_gap: f64::INFINITY,
        min_lower_gap: f64::INFINITY,
        b: sandwich.b,
        a: sandwich.a,
    };
    for s in states {
        for (rho, g) in s.rho.values().iter().zip(s.g.values()) {
            r.min_g = r.min_g.min(*g);
            r.min_upper_gap = r.min_upper_gap.min(sandwich.a * rho - g);
            r.min_lower_gap = r.min_lower_gap.min(g - sandwich.b * rho);
        }
    }
    r
}

/// Largest relative change of `M_ρ` and `M_G` from the first summary row.
/// A quantity that starts at zero is measured relative to `M_ρ(0)`.
pub fn mass_drift(summary: &[SummaryRow]) -> (f64, f64) {
    let Some(first) = summary.first() else {
        return (0.0, 0.0);
    };
    let scale_rho = first.mass_rho.abs().max(f64::MIN_POSITIVE);
    let scale_g = if first.mass_g != 0.0 { first.mass_g.abs() } else { scale_rho };
    summary.iter().fold((0.0, 0.0), |(dr, dg), r| {
        (
            f64::max(dr, ((r.mass_rho - first.mass_rho) / scale_rho).abs()),
            f64::max(dg, ((r.mass_g - first.mass_g) / scale_g).abs()),
        )
    })
}

/// `max_t (‖u(t)‖_∞ - ‖u_0‖_∞) / ‖u_0‖_∞`, clipped at 0.
pub fn max_principle_violation(summary: &[SummaryRow]) -> f64 {
    let Some(first) = summary.first() else {
        return 0.0;
    };
    let scale = first.u_sup.max(f64::MIN_POSITIVE);
    summary.iter().map(|r| (r.u_sup - first.u_sup) / scale).fold(0.0, f64::max)
}

/// Largest relative increase of `‖ρ‖_p` between consecutive rows.
pub fn lp_monotonicity_violation(summary: &[SummaryRow], p: f64) -> Result<f64> {
    let idx = SUMMARY_P
        .iter()
        .position(|q| *q == p)
        .ok_or_else(|| Error::InvalidParameter(format!("no summary column for p = {p}")))?;
    Ok(summary
        .windows(2)
        .map(|w| (w[1].rho_norms[idx] - w[0].rho_norms[idx]) / w[0].rho_norms[idx].max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max))
}

/// Discrete smooth bump of half-width `radius`, normalized to unit sum.
#[derive(Debug, Clone)]
pub struct Mollifier {
    weights: Vec<f64>,
    half: usize,
}

impl Mollifier {
    pub fn new(radius: f64, h: f64) -> Self {
        let half = (radius / h).floor() as usize;
        let mut weights: Vec<f64> = (0..=2 * half)
            .map(|k| {
                let r = (k as f64 - half as f64) * h / radius;
                if r.abs() < 1.0 {
                    (-1.0 / (1.0 - r * r)).exp()
                } else {
                    0.0
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            weights.iter_mut().for_each(|w| *w /= total);
        } else {
            weights = vec![1.0];
        }
        let half = weights.len() / 2;
        Self { weights, half }
    }

    /// Convolution with zero extension beyond the ends.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len() as i64;
        (0..n)
            .map(|j| {
                self.weights
                    .iter()
                    .enumerate()
                    .map(|(k, w)| {
                        let i = j + k as i64 - self.half as i64;
                        if (0..n).contains(&i) {
                            w * v[i as usize]
                        } else {
                            0.0
                        }
                    })
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMode {
    Rarefaction,
    Barenblatt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub mode: ScalingMode,
    pub lambdas: Vec<f64>,
    /// Headline distance per λ: `sup_t ‖u^λ - ū‖_{L^q}` (rarefaction) or
    /// `‖ρ^λ - ρ_B‖_{L^q}` at the evaluation time (Barenblatt).
    pub distances: Vec<f64>,
    /// Rarefaction only: the same, with `0.02 R` neighbourhoods of the kinks removed.
    pub distances_excluding_kinks: Vec<f64>,
    /// Rarefaction only: time-averaged `L^q` distance of mollified `ρ^λ` and `ρ̄`.
    pub rho_distances: Vec<f64>,
    /// Rarefaction only: the same for `G^λ` and `Ḡ`.
    pub g_distances: Vec<f64>,
    pub q: f64,
    pub r: f64,
    pub t1: f64,
    pub t2: f64,
}

impl ScalingReport {
    /// Each distance at most `(1 + slack)` times the previous one.
    pub fn non_increasing(values: &[f64], slack: f64) -> bool {
        values.windows(2).all(|w| w[1] <= (1.0 + slack) * w[0])
    }

    pub fn strictly_decreasing(values: &[f64]) -> bool {
        values.windows(2).all(|w| w[1] < w[0])
    }
}

/// Rescaled fields `u^λ, ρ^λ, G^λ` on the base grid at rescaled time `t`.
#[derive(Debug, Clone)]
pub struct ScalingSample {
    pub t: f64,
    pub u: Vec<f64>,
    pub rho: Vec<f64>,
    pub g: Vec<f64>,
}

/// A state of the λ-run, whose grid is the base grid dilated by λ, read
/// back in rescaled variables: grid point `j` maps to base point `j`.
pub fn rescale_state(state: &State, lambda: f64) -> ScalingSample {
    ScalingSample {
        t: state.t / lambda,
        u: state.u.values().to_vec(),
        rho: state.rho.values().iter().map(|v| lambda * v).collect(),
        g: state.g.values().iter().map(|v| lambda * v).collect(),
    }
}

/// Distances of rescaled samples to the rarefaction triple on `[-R, R]`:
/// `(sup_t ‖u - ū‖_q, same without kinks, mean_t ‖ρ - ρ̄‖_q, mean_t ‖G - Ḡ‖_q)`,
/// the last two after mollification at width `0.05 R`.
pub fn rarefaction_distances(
    base: &Grid1D,
    triple: &RarefactionTriple,
    samples: &[ScalingSample],
    q: f64,
    r: f64,
) -> Result<(f64, f64, f64, f64)> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples in [t1, t2]".into()));
    }
    let h = base.spacing();
    let x = base.points();
    let moll = Mollifier::new(0.05 * r, h);
    let window: Vec<usize> = (0..x.len()).filter(|&j| x[j].abs() <= r).collect();
    let (mut du, mut du_ex, mut drho, mut dg) = (0.0_f64, 0.0_f64, 0.0, 0.0);
    for s in samples {
        let kinks = [0.0, triple.m_g() * s.t];
        let mut diff = Vec::with_capacity(window.len());
        let mut diff_ex = Vec::new();
        for &j in &window {
            let d = s.u[j] - triple.velocity(x[j], s.t)?;
            diff.push(d);
            if kinks.iter().all(|k| (x[j] - k).abs() > 0.02 * r) {
                diff_ex.push(d);
            }
        }
        du = du.max(lp_norm_slice(&diff, h, q)?);
        du_ex = du_ex.max(lp_norm_slice(&diff_ex, h, q)?);
        let exact_rho: Vec<f64> = x.iter().map(|x| triple.density(*x, s.t)).collect::<Result<_>>()?;
        let exact_g: Vec<f64> = x.iter().map(|x| triple.g(*x, s.t)).collect::<Result<_>>()?;
        let pairs = [(&s.rho, exact_rho), (&s.g, exact_g)];
        let mut acc = [0.0; 2];
        for (k, (num, exact)) in pairs.into_iter().enumerate() {
            let (a, b) = (moll.apply(num), moll.apply(&exact));
            let d: Vec<f64> = window.iter().map(|&j| a[j] - b[j]).collect();
            acc[k] = lp_norm_slice(&d, h, q)?;
        }
        drho += acc[0];
        dg += acc[1];
    }
    let m = samples.len() as f64;
    Ok((du, du_ex, drho / m, dg / m))
}

/// Sampling of `[t1, t2]` used by the rarefaction experiment.
pub const SCALING_TIME_SAMPLES: usize = 11;

/// For each λ, runs the base configuration on the grid dilated by λ (same
/// point count, `ε` scaled by λ, so the rescaled problem keeps the base
/// viscosity) up to `λ t2`, and compares `u^λ, ρ^λ, G^λ` with the
/// rarefaction triple of the same masses for `t in [t1, t2]`.
pub fn scaling_limit_experiment(
    base_cfg: &SolverConfig,
    lambdas: &[f64],
    q: f64,
    r: f64,
    t1: f64,
    t2: f64,
) -> Result<ScalingReport> {
    check_lambdas(lambdas)?;
    if !(t1 > 0.0 && t2 >= t1) || !(r > 0.0) || !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < t1 <= t2, R > 0, q >= 1; got t1 = {t1}, t2 = {t2}, R = {r}, q = {q}")));
    }
    let base = base_cfg.validate()?;
    if base_cfg.t_start != 0.0 {
        return Err(Error::InvalidParameter("the rarefaction experiment starts at t = 0".into()));
    }
    let (m_rho, m_g) = initial_masses(base_cfg, &base)?;
    if !(m_g > 1e-12 * m_rho.abs().max(1.0)) {
        return Err(Error::InvalidParameter(format!("rarefaction limit needs M_G > 0, got {m_g}")));
    }
    let triple = RarefactionTriple::new(m_rho, m_g)?;
    let eps = base_cfg.epsilon_value(&base);
    let times: Vec<f64> = (0..SCALING_TIME_SAMPLES)
        .map(|k| t1 + (t2 - t1) * k as f64 / (SCALING_TIME_SAMPLES - 1) as f64)
        .collect();
    let rows: Vec<Result<(f64, f64, f64, f64)>> = lambdas
        .par_iter()
        .map(|&lambda| {
            let mut cfg = base_cfg.clone();
            cfg.grid.half_width *= lambda;
            cfg.epsilon = Some(eps * lambda);
            cfg.t_end = lambda * t2;
            cfg.output_times = times.iter().map(|t| lambda * t).collect();
            cfg.output_times.dedup();
            let traj = run(&cfg)?;
            let samples: Vec<ScalingSample> = traj.states[1..].iter().map(|s| rescale_state(s, lambda)).collect();
            rarefaction_distances(&base, &triple, &samples, q, r)
        })
        .collect();
    let mut report = ScalingReport {
        mode: ScalingMode::Rarefaction,
        lambdas: lambdas.to_vec(),
        distances: vec![],
        distances_excluding_kinks: vec![],
        rho_distances: vec![],
        g_distances: vec![],
        q,
        r,
        t1,
        t2,
    };
    for row in rows {
        let (du, du_ex, drho, dg) = row?;
        report.distances.push(du);
        report.distances_excluding_kinks.push(du_ex);
        report.rho_distances.push(drho);
        report.g_distances.push(dg);
    }
    Ok(report)
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if lambdas.is_empty() || lambdas.iter().any(|l| !(*l >= 1.0 && l.is_finite())) || !ScalingReport::strictly_decreasing(&lambdas.iter().map(|l| -l).collect::<Vec<_>>()) {
        return Err(Error::InvalidParameter("lambdas must be increasing and >= 1".into()));
    }
    Ok(())
}

fn initial_masses(cfg: &SolverConfig, grid: &std::sync::Arc<Grid1D>) -> Result<(f64, f64)> {
    let mut ws = crate::fracops::SpectralWorkspace::new(grid.clone());
    let (s, _) = crate::solver::make_initial_state(&cfg.initial, grid, cfg.alpha, &mut ws)?;
    Ok((s.rho.integrate(), s.g.integrate()))
}

/// `L^q` distance on the base grid between `λ ρ(λ x, ·)` and the
/// Barenblatt density of the same mass at time `t_eval`.
pub fn barenblatt_distance(base: &Grid1D, alpha: FracOrder, mass: f64, rescaled_rho: &[f64], t_eval: f64, q: f64) -> Result<f64> {
    let diff: Vec<f64> = base
        .points()
        .iter()
        .zip(rescaled_rho)
        .map(|(x, v)| Ok(v - barenblatt_density(alpha, mass, *x, t_eval)?))
        .collect::<Result<_>>()?;
    lp_norm_slice(&diff, base.spacing(), q)
}

/// For each λ, runs the `G ≡ 0` base configuration on the grid dilated by λ
/// with `ε` scaled by `λ^{1-α}` up to `λ^{1+α} t_eval`, and measures
/// `‖λ ρ(λ·, λ^{1+α} t_eval) - ρ_B(·, t_eval)‖_{L^q}`, where `ρ_B` is the
/// Barenblatt solution with the mass of `ρ0`.
///
/// `t_start` of the base configuration acts as the clock origin: data
/// `Φ_α` placed at `t_start = 1/(1+α)` coincide with `ρ_B` of mass `∫Φ_α`.
pub fn barenblatt_limit_experiment(base_cfg: &SolverConfig, lambdas: &[f64], q: f64, t_eval: f64) -> Result<ScalingReport> {
    check_lambdas(lambdas)?;
    if base_cfg.initial.mode != GMode::ZeroG {
        return Err(Error::InvalidParameter("the Barenblatt experiment needs G0 = 0".into()));
    }
    if !(t_eval > 0.0) || !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("need t_eval > 0 and q >= 1, got {t_eval}, {q}")));
    }
    let base = base_cfg.validate()?;
    let (mass, _) = initial_masses(base_cfg, &base)?;
    let a = base_cfg.alpha.value();
    let eps = base_cfg.epsilon_value(&base);
    let distances: Vec<Result<f64>> = lambdas
        .par_iter()
        .map(|&lambda| {
            let mut cfg = base_cfg.clone();
            cfg.grid.half_width *= lambda;
            cfg.epsilon = Some(eps * lambda.powf(1.0 - a));
            cfg.t_end = lambda.powf(1.0 + a) * t_eval;
            if cfg.t_end < cfg.t_start {
                return Err(Error::InvalidParameter("evaluation time precedes t_start".into()));
            }
            cfg.output_times = vec![];
            let traj = run(&cfg)?;
            let last = traj.states.last().expect("initial state");
            let rescaled: Vec<f64> = last.rho.values().iter().map(|v| lambda * v).collect();
            barenblatt_distance(&base, base_cfg.alpha, mass, &rescaled, t_eval, q)
        })
        .collect();
    Ok(ScalingReport {
        mode: ScalingMode::Barenblatt,
        lambdas: lambdas.to_vec(),
        distances: distances.into_iter().collect::<Result<_>>()?,
        distances_excluding_kinks: vec![],
        rho_distances: vec![],
        g_distances: vec![],
        q,
        r: base.half_width(),
        t1: t_eval,
        t2: t_eval,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_slope() {
        let series: Vec<(f64, f64)> = (0..20)
            .map(|k| {
                let t = 10f64.powf(k as f64 / 19.0);
                (t, t.powf(-0.5))
            })
            .collect();
        let fit = decay_fit(&series, 2.0, DecayReference::Sharp).unwrap();
        assert!((fit.fitted_slope + 0.5).abs() < 1e-12);
        assert_eq!(fit.reference_slope, -0.5);
        let vb = DecayReference::ViscosityBound { alpha: 0.5 }.slope(2.0);
        assert!((vb + 0.2).abs() < 1e-15);
    }

    #[test]
    fn short_series_is_rejected() {
        let series: Vec<(f64, f64)> = (1..10).map(|k| (k as f64 * 0.1, 1.0)).collect();
        assert!(decay_fit(&series, 2.0, DecayReference::Sharp).is_err());
        let few: Vec<(f64, f64)> = vec![(1.0, 1.0), (5.0, 0.5), (10.0, 0.3)];
        assert!(decay_fit(&few, 2.0, DecayReference::Sharp).is_err());
    }

    #[test]
    fn mollifier_preserves_constants_in_the_interior() {
        let m = Mollifier::new(0.2, 0.01);
        let out = m.apply(&vec![3.0; 200]);
        assert!((out[100] - 3.0).abs() < 1e-14);
        assert!(out[0] < 3.0);
    }

    #[test]
    fn lambdas_must_increase() {
        assert!(check_lambdas(&[1.0, 2.0, 4.0]).is_ok());
        assert!(check_lambdas(&[2.0, 1.0]).is_err());
        assert!(check_lambdas(&[0.5, 1.0]).is_err());
        assert!(check_lambdas(&[]).is_err());
    }

    #[test]
    fn upper_half_growth_of_linear_series() {
        let t: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        let (c, g) = upper_half_growth(&t, &t);
        assert_eq!(c, 10.0);
        assert!((g - 1.0).abs() < 1e-12);
        let flat = vec![1.0; 10];
        assert_eq!(upper_half_growth(&t, &flat).1, 0.0);
    }
}
