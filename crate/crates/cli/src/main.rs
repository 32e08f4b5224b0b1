//! Command-line driver for the `euler-align` library.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for bad
//! input (unreadable or invalid configuration, bad arguments), 3 when a run
//! aborts (non-finite values, CFL violation, mass reaching the boundary).
//! A `manifest.json` is written to the output directory in every case.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use euler_align::diagnostics::ScalingMode;
use euler_align::selftest::{Fault, ToleranceProfile};

use crate::manifest::{Manifest, Status};

/// Environment variable that overrides `--out`.
pub const OUT_ENV: &str = "EULER_ALIGN_OUT";

#[derive(Debug)]
pub enum Failure {
    /// A check ran and did not pass.
    Check(String),
    BadInput(String),
    Runtime(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::BadInput(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::BadInput(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<euler_align::Error> for Failure {
    fn from(e: euler_align::Error) -> Self {
        use euler_align::Error as E;
        match e {
            E::CflViolation { .. } | E::NonFinite { .. } | E::BoundaryMargin { .. } => Failure::Runtime(e.to_string()),
            E::InsufficientData(_) => Failure::Check(e.to_string()),
            other => Failure::BadInput(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    Default,
    Strict,
}

impl From<ProfileArg> for ToleranceProfile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Default => ToleranceProfile::Default,
            ProfileArg::Strict => ToleranceProfile::Strict,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FaultArg {
    HilbertSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Rarefaction,
    Barenblatt,
}

impl From<ModeArg> for ScalingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Rarefaction => ScalingMode::Rarefaction,
            ModeArg::Barenblatt => ScalingMode::Barenblatt,
        }
    }
}

#[derive(Debug, Args)]
struct Global {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overridden by EULER_ALIGN_OUT).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized self-test inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = ProfileArg::Default)]
    tolerance_profile: ProfileArg,
    #[arg(long, global = true, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

#[derive(Debug, Parser)]
#[command(name = "euler-align", version, about = "Euler-alignment system with fractional alignment kernel")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the operators against known identities; writes selftest.json.
    Selftest,
    /// Run the configured problem and write the trajectory.
    Simulate,
    /// Re-check a written trajectory.
    Verify {
        /// Trajectory directory written by `simulate`.
        dir: PathBuf,
        /// Comma-separated subset of mass, comparison, maxprinciple, decay, oleinik
        /// (default: all but decay).
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
    },
    /// Scaling-limit experiment over a list of dilation factors.
    Scaling {
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
    },
    /// Tabulate Φ_α, Λ^α Φ_α and the velocity profile U_α.
    Profiles {
        #[arg(long)]
        alpha: f64,
        /// Half-width of the tabulated interval.
        #[arg(long, default_value_t = 4.0)]
        range: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Selftest => "selftest",
            Command::Simulate => "simulate",
            Command::Verify { .. } => "verify",
            Command::Scaling { .. } => "scaling",
            Command::Profiles { .. } => "profiles",
        }
    }
}

pub struct Context {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub profile: ToleranceProfile,
    pub fault: Option<Fault>,
}

fn output_dir(cli: &Cli) -> PathBuf {
    if let Some(dir) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    if let Some(dir) = &cli.global.out {
        return dir.clone();
    }
    match &cli.command {
        Command::Verify { dir, .. } => dir.clone(),
        _ => PathBuf::from("out"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let out = output_dir(&cli);
    let mut manifest = Manifest::new(cli.command.name(), std::env::args().collect());

    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("warning: thread pool: {e}");
        }
    }
    let ctx = Context {
        config: cli.global.config.clone(),
        out: out.clone(),
        seed: cli.global.seed,
        profile: cli.global.tolerance_profile.into(),
        fault: cli.global.inject_fault.map(|FaultArg::HilbertSign| Fault::HilbertSign),
    };

    let result = std::fs::create_dir_all(&out)
        .map_err(|e| Failure::BadInput(format!("cannot create {}: {e}", out.display())))
        .and_then(|_| match &cli.command {
            Command::Selftest => commands::selftest(&ctx, &mut manifest),
            Command::Simulate => commands::simulate(&ctx, &mut manifest),
            Command::Verify { dir, checks } => commands::verify(&ctx, &mut manifest, dir, checks.as_deref()),
            Command::Scaling { mode, lambdas } => {
                commands::scaling(&ctx, &mut manifest, mode.map(Into::into), lambdas.as_deref())
            }
            Command::Profiles { alpha, range, points } => commands::profiles(&ctx, &mut manifest, *alpha, *range, *points),
        })
        .and_then(|_| match manifest.failed_checks() {
            0 => Ok(()),
            k => Err(Failure::Check(format!("{k} check(s) failed"))),
        });

    let code = match &result {
        Ok(()) => {
            manifest.finish(Status::Pass, None, started.elapsed());
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            let status = match f {
                Failure::Check(_) => Status::CheckFailed,
                Failure::BadInput(_) => Status::BadInput,
                Failure::Runtime(_) => Status::RuntimeAbort,
            };
            manifest.finish(status, Some(f.message().to_string()), started.elapsed());
            f.exit_code()
        }
    };
    if let Err(e) = manifest.write(&out) {
        eprintln!("error: cannot write manifest: {e}");
    }
    for c in &manifest.checks {
        println!("{} {} value={:e} threshold={:e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    ExitCode::from(code)
}
