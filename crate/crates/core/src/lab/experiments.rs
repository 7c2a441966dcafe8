//! Batch drivers for the recovery tables and phase-transition grids.

use crate::error::{Error, Result};
use crate::rng::{derive_seed, purpose};
use crate::sensing::{make_bernoulli_mask, make_gaussian_map};
use crate::solve::{solve_completion, solve_gaussian, AdmmConfig, Solution};
use crate::tensor::Dims;

use super::generate::{rand_low_tubal, FactorScale};
use super::metrics::RecoveryVerdict;

/// Relative error at or below which a trial counts as recovered.
pub const SUCCESS_THRESHOLD: f64 = 1e-3;

/// Relative tolerance for the tubal rank reported for an estimate.
pub const REPORT_RANK_TOL: f64 = 1e-3;

/// Keeps the last iterate of a solve that hit the iteration cap.
fn last_iterate(res: Result<Solution>) -> Result<Solution> {
    match res {
        Err(Error::NotConverged(sol)) => Ok(*sol),
        other => other,
    }
}

/// Gaussian recovery of an `n x n x n3` tensor of tubal rank `r` from `m`
/// measurements. Factors are `N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub n: usize,
    pub n3: usize,
    pub r: usize,
    pub m: usize,
    pub seed: u64,
}

/// Completion of an `n x n x n` tensor of tubal rank `r` sampled at rate
/// `p`. Factors are `N(0, 1/n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table2Row {
    pub n: usize,
    pub r: usize,
    pub p: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct TableOutcome {
    pub dims: Dims,
    pub r: usize,
    /// Measurements taken, or entries observed.
    pub samples: usize,
    pub verdict: RecoveryVerdict,
}

/// Runs each row independently; a failing row does not stop the batch.
pub fn run_table1(rows: &[Table1Row], cfg: &AdmmConfig) -> Vec<Result<TableOutcome>> {
    rows.iter().map(|row| table1_row(row, cfg)).collect()
}

fn table1_row(row: &Table1Row, cfg: &AdmmConfig) -> Result<TableOutcome> {
    let dims = Dims::new(row.n, row.n, row.n3)?;
    let x0 = rand_low_tubal(dims, row.r, row.seed, FactorScale::Unit)?;
    let map = make_gaussian_map(row.m, dims, row.seed)?;
    let y = map.apply(&x0)?;
    let sol = last_iterate(solve_gaussian(&map, &y, cfg))?;
    Ok(TableOutcome {
        dims,
        r: row.r,
        samples: row.m,
        verdict: RecoveryVerdict::assess(&sol.x, &x0, &sol.report, SUCCESS_THRESHOLD, REPORT_RANK_TOL),
    })
}

/// Runs each row independently; a failing row does not stop the batch.
pub fn run_table2(rows: &[Table2Row], cfg: &AdmmConfig) -> Vec<Result<TableOutcome>> {
    rows.iter().map(|row| table2_row(row, cfg)).collect()
}

fn table2_row(row: &Table2Row, cfg: &AdmmConfig) -> Result<TableOutcome> {
    let dims = Dims::new(row.n, row.n, row.n)?;
    let x0 = rand_low_tubal(dims, row.r, row.seed, FactorScale::InvN)?;
    let mask = make_bernoulli_mask(dims, row.p, row.seed)?;
    let sol = last_iterate(solve_completion(&mask, &mask.proj_omega(&x0)?, cfg))?;
    Ok(TableOutcome {
        dims,
        r: row.r,
        samples: mask.count(),
        verdict: RecoveryVerdict::assess(&sol.x, &x0, &sol.report, SUCCESS_THRESHOLD, REPORT_RANK_TOL),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseKind {
    /// Levels are measurement counts `m`.
    Gaussian,
    /// Levels are sampling rates `p`.
    Completion,
}

impl PhaseKind {
    fn tag(self) -> u64 {
        match self {
            PhaseKind::Gaussian => 1,
            PhaseKind::Completion => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhaseSpec {
    pub kind: PhaseKind,
    pub dims: Dims,
    /// Measurement counts (Gaussian) or sampling rates (completion).
    pub levels: Vec<f64>,
    pub ranks: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub threshold: f64,
    pub config: AdmmConfig,
}

impl PhaseSpec {
    fn validate(&self) -> Result<()> {
        self.dims.validate()?;
        self.config.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::InvalidConfig("threshold must be positive".into()));
        }
        for &level in &self.levels {
            match self.kind {
                PhaseKind::Gaussian if !(level >= 1.0 && level.fract() == 0.0) => {
                    return Err(Error::InvalidConfig(format!(
                        "measurement count {level} is not a positive integer"
                    )));
                }
                PhaseKind::Completion if !(level > 0.0 && level <= 1.0) => {
                    return Err(Error::InvalidRate(level));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Seed of trial `t` in cell `(level, r)`. It depends only on the cell
    /// coordinates, never on evaluation order.
    pub fn trial_seed(&self, level: f64, r: usize, t: usize) -> u64 {
        derive_seed(
            self.seed,
            &[purpose::TRIAL, self.kind.tag(), level.to_bits(), r as u64, t as u64],
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCell {
    pub level: f64,
    pub r: usize,
    pub trials: usize,
    pub successes: usize,
    /// Trials that raised an error and produced no estimate.
    pub errors: usize,
    /// Mean over trials that produced an estimate; NaN if none did.
    pub mean_rel_error: f64,
    pub mean_iterations: f64,
}

impl PhaseCell {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone)]
pub struct PhaseGrid {
    pub spec: PhaseSpec,
    /// Row-major over `(level, r)`.
    pub cells: Vec<PhaseCell>,
}

impl PhaseGrid {
    pub fn cell(&self, level_idx: usize, rank_idx: usize) -> &PhaseCell {
        &self.cells[level_idx * self.spec.ranks.len() + rank_idx]
    }
}

fn run_trial(spec: &PhaseSpec, level: f64, r: usize, seed: u64) -> Result<RecoveryVerdict> {
    let sol;
    let x0;
    match spec.kind {
        PhaseKind::Gaussian => {
            x0 = rand_low_tubal(spec.dims, r, seed, FactorScale::Unit)?;
            let map = make_gaussian_map(level as usize, spec.dims, seed)?;
            let y = map.apply(&x0)?;
            sol = last_iterate(solve_gaussian(&map, &y, &spec.config))?;
        }
        PhaseKind::Completion => {
            x0 = rand_low_tubal(spec.dims, r, seed, FactorScale::InvN)?;
            let mask = make_bernoulli_mask(spec.dims, level, seed)?;
            sol = last_iterate(solve_completion(&mask, &mask.proj_omega(&x0)?, &spec.config))?;
        }
    }
    Ok(RecoveryVerdict::assess(&sol.x, &x0, &sol.report, spec.threshold, REPORT_RANK_TOL))
}

/// Evaluates every `(level, r)` cell over `spec.trials` seeded trials.
/// Trial failures are tallied per cell rather than aborting the grid.
pub fn phase_grid(spec: &PhaseSpec) -> Result<PhaseGrid> {
    spec.validate()?;
    let mut cells = Vec::with_capacity(spec.levels.len() * spec.ranks.len());
    for &level in &spec.levels {
        for &r in &spec.ranks {
            let mut cell = PhaseCell {
                level,
                r,
                trials: spec.trials,
                successes: 0,
                errors: 0,
                mean_rel_error: 0.0,
                mean_iterations: 0.0,
            };
            let mut done = 0usize;
            for t in 0..spec.trials {
                match run_trial(spec, level, r, spec.trial_seed(level, r, t)) {
                    Ok(v) => {
                        done += 1;
                        cell.successes += usize::from(v.recovered);
                        cell.mean_rel_error += v.rel_error;
                        cell.mean_iterations += v.iterations as f64;
                    }
                    Err(_) => cell.errors += 1,
                }
            }
            if done == 0 {
                cell.mean_rel_error = f64::NAN;
                cell.mean_iterations = f64::NAN;
            } else {
                cell.mean_rel_error /= done as f64;
                cell.mean_iterations /= done as f64;
            }
            cells.push(cell);
        }
    }
    Ok(PhaseGrid {
        spec: spec.clone(),
        cells,
    })
}
