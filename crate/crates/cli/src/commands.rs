use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use euler_align::closedform::{getoor_fraclap, getoor_profile, velocity_profile};
use euler_align::diagnostics::{
    barenblatt_limit_experiment, comparison_principle_report, decay_fit, lp_monotonicity_violation, mass_drift,
    max_principle_violation, norm_series, oleinik_check, scaling_limit_experiment, DecayReference, NormSeries,
    ScalingMode, ScalingReport, OLEINIK_GROWTH_LIMIT,
};
use euler_align::io::{load_trajectory, write_trajectory};
use euler_align::selftest::{run_selftest, SelfTestOptions, ToleranceProfile};
use euler_align::{run, FracOrder, GMode, Trajectory};

use crate::config::{self, RunConfig};
use crate::manifest::Manifest;
use crate::{Context, Failure};

const MASS_TOL: f64 = 1e-10;
const MONOTONE_TOL: f64 = 1e-6;

fn write_file(m: &mut Manifest, path: PathBuf, text: &str) -> Result<(), Failure> {
    fs::write(&path, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
    m.output(&path);
    Ok(())
}

fn require_config(ctx: &Context, m: &mut Manifest) -> Result<RunConfig, Failure> {
    let path = ctx.config.as_ref().ok_or_else(|| Failure::BadInput("--config is required".into()))?;
    let cfg = config::load(path)?;
    m.config = Some(cfg.echo.clone());
    Ok(cfg)
}

/// Comparison and max-principle thresholds, relative.
fn principle_tol(profile: ToleranceProfile) -> f64 {
    match profile {
        ToleranceProfile::Default => 1e-6,
        ToleranceProfile::Strict => 1e-9,
    }
}

pub fn selftest(ctx: &Context, m: &mut Manifest) -> Result<(), Failure> {
    let records = run_selftest(SelfTestOptions { seed: ctx.seed, profile: ctx.profile, fault: ctx.fault })?;
    let json = serde_json::to_string_pretty(&records).map_err(|e| Failure::Runtime(e.to_string()))?;
    write_file(m, ctx.out.join("selftest.json"), &(json + "\n"))?;
    for r in &records {
        let name = match r.alpha {
            Some(a) => format!("{}[alpha={a}]", r.op),
            None => r.op.clone(),
        };
        m.check(&name, r.max_error, r.tolerance, r.passed, None);
    }
    Ok(())
}

pub fn simulate(ctx: &Context, m: &mut Manifest) -> Result<(), Failure> {
    let cfg = require_config(ctx, m)?;
    let traj = run(&cfg.solver)?;
    let files = write_trajectory(&traj, &ctx.out)?;
    for f in &files {
        m.output(f);
    }
    write_file(m, ctx.out.join("summary.gp"), &summary_gnuplot(&cfg.solver.initial.mode))?;
    let (dr, dg) = mass_drift(&traj.summary);
    m.check_le("mass_drift", dr.max(dg), MASS_TOL);
    m.check_le("rho_l2_monotone", lp_monotonicity_violation(&traj.summary, 2.0)?, MONOTONE_TOL);
    Ok(())
}

fn summary_gnuplot(mode: &GMode) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset logscale xy\nset xlabel 't'\nset key bottom left\n\
         plot 'summary.csv' using 1:5 with lines title '|rho|_2', \\\n     'summary.csv' using 1:6 with lines title '|rho|_4'",
    );
    if *mode != GMode::ZeroG {
        s.push_str(", \\\n     'summary.csv' using 1:11 with lines title '|G|_inf'");
    }
    s.push_str(", \\\n     'summary.csv' using 1:12 with lines title '|u|_inf'\n");
    s
}

pub const ALL_CHECKS: [&str; 5] = ["mass", "comparison", "maxprinciple", "decay", "oleinik"];

/// `decay` fits the last decade of the run against asymptotic rates, so it
/// only makes sense for long runs and must be asked for.
pub const DEFAULT_CHECKS: [&str; 4] = ["mass", "comparison", "maxprinciple", "oleinik"];

pub fn verify(ctx: &Context, m: &mut Manifest, dir: &Path, checks: Option<&[String]>) -> Result<(), Failure> {
    let traj = load_trajectory(dir)?;
    m.config = serde_json::to_value(&traj.config).ok();
    let wanted: Vec<String> = match checks {
        Some(list) => list.iter().map(|c| c.trim().to_ascii_lowercase()).collect(),
        None => DEFAULT_CHECKS.iter().map(|c| c.to_string()).collect(),
    };
    for c in &wanted {
        if !ALL_CHECKS.contains(&c.as_str()) {
            return Err(Failure::BadInput(format!("unknown check '{c}'; known: {}", ALL_CHECKS.join(","))));
        }
    }
    let tol = principle_tol(ctx.profile);
    for c in &wanted {
        match c.as_str() {
            "mass" => {
                let (dr, dg) = mass_drift(&traj.summary);
                m.check_le("mass_drift", dr.max(dg), MASS_TOL);
            }
            "comparison" => {
                let r = comparison_principle_report(&traj);
                let scale = traj.states[0].rho.sup_norm().max(f64::MIN_POSITIVE);
                m.check_le("comparison_principle", (-r.worst()).max(0.0) / scale, tol);
            }
            "maxprinciple" => m.check_le("max_principle", max_principle_violation(&traj.summary), tol),
            "decay" => decay_checks(ctx, m, &traj)?,
            "oleinik" => {
                let r = oleinik_check(&traj);
                m.check_le("oleinik_slope_growth", r.growth, OLEINIK_GROWTH_LIMIT);
                m.check_le("oleinik_g_growth", r.g_growth, OLEINIK_GROWTH_LIMIT);
            }
            _ => unreachable!(),
        }
    }
    Ok(())
}

/// Slopes of `‖ρ‖_2`, `‖ρ‖_4` and `‖G‖_∞` over the last decade of the run.
/// Every slope must respect the viscosity-regime bound; with `G ≢ 0` they
/// must also match the sharp rates.
fn decay_checks(ctx: &Context, m: &mut Manifest, traj: &Trajectory) -> Result<(), Failure> {
    let alpha = traj.config.alpha.value();
    let window = match ctx.profile {
        ToleranceProfile::Default => 1.0,
        ToleranceProfile::Strict => 0.5,
    };
    let has_g = traj.config.initial.mode != GMode::ZeroG;
    let mut series = vec![(NormSeries::Rho, 2.0, 0.1), (NormSeries::Rho, 4.0, 0.1)];
    if has_g {
        series.push((NormSeries::G, f64::INFINITY, 0.15));
    }
    for (which, p, sharp_tol) in series {
        let label = format!("{}_L{}", if which == NormSeries::Rho { "rho" } else { "G" }, if p.is_finite() { p.to_string() } else { "inf".into() });
        let data = norm_series(&traj.summary, which, p, f64::MIN_POSITIVE, f64::INFINITY)?;
        let fit = decay_fit(&data, p, DecayReference::Sharp)?;
        let bound = DecayReference::ViscosityBound { alpha }.slope(p) + 0.05;
        m.check_le(&format!("decay_bound_{label}"), fit.fitted_slope, bound);
        if has_g {
            let dev = (fit.fitted_slope - fit.reference_slope).abs();
            m.check(
                &format!("decay_sharp_{label}"),
                dev,
                sharp_tol * window,
                dev <= sharp_tol * window,
                Some(format!("slope {:.4}, reference {}", fit.fitted_slope, fit.reference_slope)),
            );
        }
    }
    Ok(())
}

pub fn scaling(ctx: &Context, m: &mut Manifest, mode: Option<ScalingMode>, lambdas: Option<&[f64]>) -> Result<(), Failure> {
    let cfg = require_config(ctx, m)?;
    let section = cfg.scaling.clone();
    let mode = mode
        .or(section.as_ref().map(|s| s.mode))
        .ok_or_else(|| Failure::BadInput("no scaling mode: pass --mode or add a [scaling] table".into()))?;
    let lambdas: Vec<f64> = lambdas
        .map(<[f64]>::to_vec)
        .or(section.as_ref().map(|s| s.lambdas.clone()))
        .unwrap_or_else(|| match mode {
            ScalingMode::Rarefaction => vec![1.0, 2.0, 4.0, 8.0],
            ScalingMode::Barenblatt => vec![1.0, 2.0, 4.0],
        });
    let report = match mode {
        ScalingMode::Rarefaction => {
            let q = section.as_ref().map_or(2.0, |s| s.q);
            let (t1, t2) = section.as_ref().map_or((1.0, 2.0), |s| (s.t1, s.t2));
            let r = section.as_ref().and_then(|s| s.r).unwrap_or(0.5 * cfg.solver.grid.half_width);
            scaling_limit_experiment(&cfg.solver, &lambdas, q, r, t1, t2)?
        }
        ScalingMode::Barenblatt => {
            let q = section.as_ref().map_or(1.0, |s| s.q);
            let t_eval = section.as_ref().map_or(1.0, |s| s.t_eval);
            barenblatt_limit_experiment(&cfg.solver, &lambdas, q, t_eval)?
        }
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Runtime(e.to_string()))?;
    write_file(m, ctx.out.join("scaling.json"), &(json + "\n"))?;
    write_file(m, ctx.out.join("scaling.csv"), &scaling_csv(&report))?;
    write_file(m, ctx.out.join("scaling.gp"), SCALING_GNUPLOT)?;

    let first = report.distances[0];
    let last = *report.distances.last().expect("at least one lambda");
    match section.as_ref().and_then(|s| s.max_distance) {
        Some(bound) => m.check_le("distance_bound", report.distances.iter().copied().fold(0.0, f64::max), bound),
        None => m.check(
            "distance_decreasing",
            last,
            first,
            ScalingReport::strictly_decreasing(&report.distances),
            Some(format!("{:?}", report.distances)),
        ),
    }
    if mode == ScalingMode::Rarefaction {
        m.check_le("distance_ratio", last / first, 0.5);
        for (name, v) in [("rho_distance_decreasing", &report.rho_distances), ("g_distance_decreasing", &report.g_distances)] {
            m.check(name, *v.last().expect("nonempty"), v[0], ScalingReport::strictly_decreasing(v), Some(format!("{v:?}")));
        }
    }
    Ok(())
}

fn scaling_csv(r: &ScalingReport) -> String {
    let mut s = String::from("# lambda,distance,distance_excluding_kinks,rho_distance,G_distance\n");
    let get = |v: &Vec<f64>, k: usize| v.get(k).map_or(String::new(), |x| x.to_string());
    for (k, l) in r.lambdas.iter().enumerate() {
        writeln!(
            s,
            "{l},{},{},{},{}",
            r.distances[k],
            get(&r.distances_excluding_kinks, k),
            get(&r.rho_distances, k),
            get(&r.g_distances, k)
        )
        .expect("string write");
    }
    s
}

const SCALING_GNUPLOT: &str = "set datafile separator ','\nset logscale xy\nset xlabel 'lambda'\nset ylabel 'distance'\n\
plot 'scaling.csv' using 1:2 with linespoints title 'distance'\n";

pub fn profiles(ctx: &Context, m: &mut Manifest, alpha: f64, range: f64, points: usize) -> Result<(), Failure> {
    let al = FracOrder::new(alpha)?;
    if !(range > 0.0 && range.is_finite()) || points < 2 {
        return Err(Failure::BadInput("need range > 0 and at least 2 points".into()));
    }
    let u = velocity_profile(al);
    let mut s = String::from("# x,Phi,Lambda_alpha_Phi,U\n");
    for k in 0..points {
        let x = -range + 2.0 * range * k as f64 / (points - 1) as f64;
        // the exterior value is singular at |x| = 1
        let lap = if x.abs() == 1.0 { f64::NAN } else { getoor_fraclap(al, x) };
        writeln!(s, "{x},{},{lap},{}", getoor_profile(al, x), u.eval(x)).expect("string write");
    }
    let stem = format!("profiles_alpha_{alpha}");
    write_file(m, ctx.out.join(format!("{stem}.csv")), &s)?;
    let gp = format!(
        "set datafile separator ','\nset multiplot layout 3,1\nset xlabel 'x'\n\
         plot '{stem}.csv' using 1:2 with lines title 'Phi'\n\
         set yrange [-3:1.5]\nplot '{stem}.csv' using 1:3 with lines title 'Lambda^alpha Phi'\n\
         set autoscale y\nplot '{stem}.csv' using 1:4 with lines title 'U'\nunset multiplot\n"
    );
    write_file(m, ctx.out.join(format!("{stem}.gp")), &gp)?;
    Ok(())
}
