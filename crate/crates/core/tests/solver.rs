mod common;

use euler_align::diagnostics::{lp_monotonicity_violation, mass_drift, max_principle_violation};
use euler_align::solver::{make_initial_state, Stepper};
use euler_align::{run, FluxScheme, FracOrder, GMode, GridSpec, InitialDataSpec, Profile, SolverConfig, VelocityRoute};

fn config(n: usize, l: f64, scheme: FluxScheme, mode: GMode, t_end: f64) -> SolverConfig {
    SolverConfig {
        alpha: FracOrder::new(0.5).unwrap(),
        epsilon: None,
        grid: GridSpec { n, half_width: l },
        t_start: 0.0,
        t_end,
        cfl: 0.4,
        flux_scheme: scheme,
        output_times: vec![],
        velocity: VelocityRoute::FreeSpace,
        margin_tol: 1e-6,
        initial: InitialDataSpec { rho0: Profile::Bump { mass: 1.0, center: 0.0, radius: 2.0 }, mode },
    }
}

fn proportional(c: f64) -> GMode {
    GMode::Proportional { b: c, a: c, c }
}

fn l1_diff(a: &[f64], b: &[f64], h: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * h
}

/// Fixed steps `T/k`, `T/2k`, `T/4k` below the CFL limit; successive differences shrink by `2^order`.
#[test]
fn splitting_is_second_order_in_time() {
    for scheme in [FluxScheme::Upwind, FluxScheme::Spectral] {
        let cfg = config(256, 8.0, scheme, proportional(1.0), 0.5);
        let grid = cfg.validate().unwrap();
        let mut stepper = Stepper::new(&cfg).unwrap();
        let (s0, _) = make_initial_state(&cfg.initial, &grid, cfg.alpha, stepper.workspace()).unwrap();
        let k0 = (cfg.t_end / stepper.max_dt(&s0)).ceil() as usize * 2;
        let limit = stepper.max_dt(&s0);
        let finals: Vec<Vec<f64>> = [k0, 2 * k0, 4 * k0]
            .iter()
            .map(|&k| {
                let dt = cfg.t_end / k as f64;
                assert!(dt <= limit);
                let mut s = s0.clone();
                for _ in 0..k {
                    s = stepper.step(&s, dt).unwrap();
                }
                s.rho.values().to_vec()
            })
            .collect();
        let h = grid.spacing();
        let (d1, d2) = (l1_diff(&finals[0], &finals[1], h), l1_diff(&finals[1], &finals[2], h));
        let order = (d1 / d2).log2();
        assert!(order >= 1.8, "{scheme:?}: observed order {order} ({d1:.2e}, {d2:.2e})");
    }
}

/// Halving the viscosity changes the solution by less the smaller it is.
#[test]
fn solutions_converge_as_viscosity_vanishes() {
    let base = config(2048, 8.0, FluxScheme::Spectral, proportional(1.0), 1.0);
    let grid = base.validate().unwrap();
    let h = grid.spacing();
    let finals: Vec<Vec<f64>> = [0.16, 0.08, 0.04, 0.02]
        .iter()
        .map(|&e| {
            let mut cfg = base.clone();
            cfg.epsilon = Some(e);
            run(&cfg).unwrap().states.last().unwrap().rho.values().to_vec()
        })
        .collect();
    let diffs: Vec<f64> = finals.windows(2).map(|w| l1_diff(&w[0], &w[1], h)).collect();
    assert!(diffs.windows(2).all(|w| w[1] < w[0]), "{diffs:?}");
}

#[test]
fn equal_data_stay_equal_and_u_obeys_the_maximum_principle() {
    let mut cfg = config(1024, 8.0, FluxScheme::Upwind, proportional(1.0), 2.0);
    cfg.initial.rho0 = Profile::Bump { mass: 1.0, center: 0.0, radius: 0.5 };
    let traj = run(&cfg).unwrap();
    let scale = traj.states[0].rho.sup_norm();
    for row in &traj.summary {
        assert!(row.min_upper_gap >= -1e-8 * scale && row.max_lower_excess <= 1e-8 * scale, "t = {}", row.t);
    }
    let u0 = traj.summary[0].u_sup;
    assert!(traj.summary.iter().all(|r| r.u_sup <= u0 + 1e-8));
    assert!(max_principle_violation(&traj.summary) <= 1e-8);
}

#[test]
fn upwind_norms_do_not_grow() {
    for mode in [GMode::ZeroG, proportional(1.0), proportional(4.0)] {
        let traj = run(&config(2048, 32.0, FluxScheme::Upwind, mode.clone(), 3.0)).unwrap();
        for p in [2.0, 4.0, f64::INFINITY] {
            let v = lp_monotonicity_violation(&traj.summary, p).unwrap();
            assert!(v <= 1e-12, "{mode:?}, p = {p}: {v}");
        }
        let (dr, dg) = mass_drift(&traj.summary);
        assert!(dr <= 1e-12 && dg <= 1e-12);
    }
}

#[test]
fn zero_duration_run_is_the_initial_state() {
    let mut cfg = config(128, 8.0, FluxScheme::Upwind, GMode::ZeroG, 0.0);
    cfg.output_times = vec![0.0];
    let traj = run(&cfg).unwrap();
    assert_eq!(traj.steps, 0);
    assert_eq!(traj.states.len(), 1);
    assert_eq!(traj.summary.len(), 1);
    assert_eq!(traj.states[0].t, 0.0);
}

#[test]
fn reruns_are_bit_identical() {
    let cfg = config(512, 8.0, FluxScheme::Spectral, proportional(2.0), 1.0);
    let (a, b) = (run(&cfg).unwrap(), run(&cfg).unwrap());
    assert_eq!(a.summary, b.summary);
    assert_eq!(a.states, b.states);
}

/// Both transport discretizations resolve the same solution.
#[test]
fn flux_schemes_agree() {
    let finals = [FluxScheme::Upwind, FluxScheme::Spectral]
        .map(|s| run(&config(2048, 8.0, s, proportional(1.0), 1.0)).unwrap().states.pop().unwrap());
    let h = finals[0].rho.grid().spacing();
    let d = l1_diff(finals[0].rho.values(), finals[1].rho.values(), h);
    assert!(d < 1e-2, "{d}");
}

#[test]
fn shipped_configs_validate() {
    let configs = common::shipped_configs();
    assert!(configs.len() >= 5);
    for (name, cfg) in configs {
        assert!(cfg.validate().is_ok(), "{name}");
    }
}
