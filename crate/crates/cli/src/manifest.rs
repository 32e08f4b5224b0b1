use std::path::Path;
use std::time::Duration;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    Pass,
    CheckFailed,
    BadInput,
    RuntimeAbort,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Written as `manifest.json` next to every command's outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub argv: Vec<String>,
    pub code_version: String,
    pub config: Option<serde_json::Value>,
    pub outputs: Vec<String>,
    pub checks: Vec<CheckOutcome>,
    pub status: Status,
    pub failure_reason: Option<String>,
    pub wall_clock_seconds: f64,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl Manifest {
    pub fn new(command: &str, argv: Vec<String>) -> Self {
        Manifest {
            command: command.to_string(),
            argv,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config: None,
            outputs: vec![],
            checks: vec![],
            status: Status::Running,
            failure_reason: None,
            wall_clock_seconds: 0.0,
        }
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Records a check that passes when `value <= threshold`.
    pub fn check_le(&mut self, name: &str, value: f64, threshold: f64) {
        self.checks.push(CheckOutcome {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
            detail: None,
        });
    }

    pub fn check(&mut self, name: &str, value: f64, threshold: f64, passed: bool, detail: Option<String>) {
        self.checks.push(CheckOutcome { name: name.into(), value, threshold, passed, detail });
    }

    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn finish(&mut self, status: Status, reason: Option<String>, elapsed: Duration) {
        self.status = status;
        self.failure_reason = reason;
        self.wall_clock_seconds = elapsed.as_secs_f64();
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(dir.join(MANIFEST_FILE), text + "\n")
    }
}
