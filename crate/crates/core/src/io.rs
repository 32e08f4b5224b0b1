//! Trajectory persistence: one CSV per stored state (`x,rho,G,u`), a
//! summary CSV with one row per step, and a JSON index tying them to the
//! configuration.
//!
//! Numbers are written in Rust's shortest round-trip form, so identical
//! runs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::solver::{Sandwich, SolverConfig, State, SummaryRow, Trajectory, SUMMARY_COLUMNS};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const INDEX_FILE: &str = "trajectory.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateEntry {
    pub t: f64,
    pub file: String,
}

/// Contents of `trajectory.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryIndex {
    pub config: SolverConfig,
    pub epsilon: f64,
    pub sandwich: Sandwich,
    pub steps: usize,
    pub states: Vec<StateEntry>,
    pub summary: String,
}

fn state_csv(s: &State) -> String {
    let mut out = String::from("# x,rho,G,u\n");
    let x = s.rho.grid().points();
    for j in 0..x.len() {
        writeln!(out, "{},{},{},{}", x[j], s.rho.values()[j], s.g.values()[j], s.u.values()[j]).expect("string write");
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = format!("# {}\n", SUMMARY_COLUMNS.join(","));
    for r in rows {
        let cells: Vec<String> = r.to_array().iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes the trajectory into `dir` (created if needed); returns the files written.
pub fn write_trajectory(traj: &Trajectory, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for (k, s) in traj.states.iter().enumerate() {
        let name = format!("state_{k:04}.csv");
        let path = dir.join(&name);
        fs::write(&path, state_csv(s))?;
        written.push(path);
        entries.push(StateEntry { t: s.t, file: name });
    }
    let summary_path = dir.join(SUMMARY_FILE);
    fs::write(&summary_path, summary_csv(&traj.summary))?;
    written.push(summary_path);
    let index = TrajectoryIndex {
        config: traj.config.clone(),
        epsilon: traj.epsilon,
        sandwich: traj.sandwich,
        steps: traj.steps,
        states: entries,
        summary: SUMMARY_FILE.to_string(),
    };
    let index_path = dir.join(INDEX_FILE);
    fs::write(&index_path, serde_json::to_string_pretty(&index)? + "\n")?;
    written.push(index_path);
    Ok(written)
}

fn parse_row(line: &str, width: usize, path: &Path, lineno: usize) -> Result<Vec<f64>> {
    let cells: Vec<f64> = line
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
    if cells.len() != width {
        return Err(Error::Parse(format!(
            "{}:{}: expected {width} columns, found {}",
            path.display(),
            lineno + 1,
            cells.len()
        )));
    }
    Ok(cells)
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let text = fs::read_to_string(path)?;
    data_lines(&text)
        .map(|(i, l)| {
            let cells = parse_row(l, SUMMARY_COLUMNS.len(), path, i)?;
            let arr: [f64; 15] = cells.try_into().expect("width checked");
            Ok(SummaryRow::from_array(&arr))
        })
        .collect()
}

/// Reads back a directory written by [`write_trajectory`].
pub fn load_trajectory(dir: &Path) -> Result<Trajectory> {
    let index_path = dir.join(INDEX_FILE);
    let index: TrajectoryIndex = serde_json::from_str(&fs::read_to_string(&index_path)?)?;
    let grid = index.config.validate()?;
    let mut states = Vec::with_capacity(index.states.len());
    for entry in &index.states {
        let path = dir.join(&entry.file);
        let text = fs::read_to_string(&path)?;
        let mut cols: [Vec<f64>; 4] = Default::default();
        for (i, l) in data_lines(&text) {
            let cells = parse_row(l, 4, &path, i)?;
            for (c, v) in cols.iter_mut().zip(cells) {
                c.push(v);
            }
        }
        if cols[0].len() != grid.n() || cols[0].iter().zip(grid.points()).any(|(a, b)| (a - b).abs() > 1e-9 * grid.half_width()) {
            return Err(Error::Parse(format!("{}: abscissae do not match the configured grid", path.display())));
        }
        let [_, rho, g, u] = cols;
        states.push(State {
            rho: Field::new(grid.clone(), rho)?,
            g: Field::new(grid.clone(), g)?,
            u: Field::new(grid.clone(), u)?,
            t: entry.t,
        });
    }
    let summary = read_summary(&dir.join(&index.summary))?;
    Ok(Trajectory {
        config: index.config,
        epsilon: index.epsilon,
        sandwich: index.sandwich,
        states,
        summary,
        steps: index.steps,
    })
}
