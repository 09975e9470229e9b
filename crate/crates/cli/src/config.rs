//! Run configuration shared by every subcommand.

use std::path::PathBuf;

/// Knobs common to the subcommands; each command reads the subset it needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Model file (ignored by the built-in simulation commands).
    pub model: Option<PathBuf>,
    pub seed: u64,
    /// Direction count N_p.
    pub directions: usize,
    /// Candidate count N_δ; the simulation panels use ⌊√N_δ⌋ per axis.
    pub candidates: usize,
    /// Covariate grid size N_x for the built-in data-generating processes.
    pub grid: usize,
    /// Halfspace acceptance tolerance.
    pub tol: f64,
    pub out: PathBuf,
    /// Restrict directions to the outer-set family (at most one nonzero
    /// coordinate in the shared-regressor block).
    pub restricted: bool,
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: None,
            seed: 17,
            directions: 2000,
            candidates: 20_000,
            grid: 101,
            tol: 1e-9,
            out: PathBuf::from("out"),
            restricted: false,
            svg: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.directions == 0 || self.candidates == 0 || self.grid == 0 {
            return Err("counts must be >= 1".into());
        }
        if self.tol <= 0.0 || self.tol.is_nan() {
            return Err("tolerance must be positive".into());
        }
        Ok(())
    }
}
