//! TOML run configuration: the solver fields at top level plus an optional
//! `[scaling]` table. Unknown keys anywhere are errors.

use std::path::Path;

use euler_align::diagnostics::ScalingMode;
use euler_align::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::Failure;

fn default_q() -> f64 {
    2.0
}

fn default_t1() -> f64 {
    1.0
}

fn default_t2() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    pub mode: ScalingMode,
    pub lambdas: Vec<f64>,
    /// Norm exponent of the distances.
    #[serde(default = "default_q")]
    pub q: f64,
    /// Half-width of the comparison window (rarefaction).
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default = "default_t1")]
    pub t1: f64,
    #[serde(default = "default_t2")]
    pub t2: f64,
    /// Evaluation time (Barenblatt).
    #[serde(default = "default_t1")]
    pub t_eval: f64,
    /// When set, every distance must stay below it instead of decreasing in λ
    /// (for data that already are the limit profile).
    #[serde(default)]
    pub max_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub scaling: Option<ScalingSection>,
    /// The parsed file, echoed into manifests.
    pub echo: serde_json::Value,
}

pub fn parse(text: &str) -> Result<RunConfig, Failure> {
    let mut table: toml::Table = text.parse().map_err(|e| Failure::BadInput(format!("config: {e}")))?;
    let echo = serde_json::to_value(&table).map_err(|e| Failure::BadInput(format!("config: {e}")))?;
    let scaling = match table.remove("scaling") {
        Some(v) => Some(v.try_into::<ScalingSection>().map_err(|e| Failure::BadInput(format!("config [scaling]: {e}")))?),
        None => None,
    };
    let solver: SolverConfig =
        toml::Value::Table(table).try_into().map_err(|e| Failure::BadInput(format!("config: {e}")))?;
    solver.validate().map_err(|e| Failure::BadInput(format!("config: {e}")))?;
    Ok(RunConfig { solver, scaling, echo })
}

pub fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::BadInput(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
alpha = 0.5
t_end = 1.0
[grid]
n = 64
half_width = 8.0
[initial.rho0]
kind = "bump"
mass = 1.0
radius = 1.0
[initial.mode]
kind = "zero_g"
"#;

    #[test]
    fn parses_minimal_config() {
        let c = parse(BASE).unwrap();
        assert_eq!(c.solver.grid.n, 64);
        assert!(c.scaling.is_none());
        assert_eq!(c.solver.cfl, 0.4);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse(&format!("epsilom = 0.1\n{BASE}")).is_err());
        let with_scaling = format!("{BASE}\n[scaling]\nmode = \"barenblatt\"\nlambdas = [1.0, 2.0]\nwat = 1\n");
        assert!(parse(&with_scaling).is_err());
    }

    #[test]
    fn scaling_section_defaults() {
        let c = parse(&format!("{BASE}\n[scaling]\nmode = \"barenblatt\"\nlambdas = [1.0, 2.0]\n")).unwrap();
        let s = c.scaling.unwrap();
        assert_eq!(s.mode, ScalingMode::Barenblatt);
        assert_eq!((s.q, s.t_eval), (2.0, 1.0));
    }

    #[test]
    fn invalid_alpha_is_rejected() {
        assert!(parse(&BASE.replace("alpha = 0.5", "alpha = 1.0")).is_err());
    }
}
