//! Numerical laboratory for the one-dimensional pressureless Euler alignment
//! system with the singular kernel `|x|^{-1-α}`, written in the form
//!
//! ```text
//! ρ_t + (ρu)_x = ε ρ_xx,   G_t + (Gu)_x = ε G_xx,   u = ∂_x^{-1}(G + Λ^α ρ).
//! ```
//!
//! [`grid`] holds the periodic mesh and sampled fields, [`fracops`] the
//! nonlocal operators, [`closedform`] the exact solutions used as oracles,
//! [`solver`] the time stepper and [`diagnostics`] the checks run on its output.

pub mod closedform;
pub mod diagnostics;
pub mod error;
pub mod fracops;
pub mod grid;
pub mod io;
pub mod quadrature;
pub mod selftest;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use fracops::{Boundary, FracOrder, SpectralWorkspace, VelocityRoute};
pub use grid::{Field, Grid1D, GridSpec};
pub use solver::{run, FluxScheme, GMode, InitialDataSpec, Profile, SolverConfig, State, Trajectory};
