//! Experiment support: random low-tubal-rank tensors, sample-complexity
//! formulas, incoherence and tangent-space projections, recovery metrics,
//! and the batch drivers that regenerate the recovery tables and phase
//! grids.

mod analysis;
mod bounds;
mod experiments;
mod generate;
mod metrics;

pub use analysis::{incoherence, proj_t, proj_t_perp};
pub use bounds::{completion_rate_bound, dof, gaussian_bound, robust_bound};
pub use experiments::{
    phase_grid, run_table1, run_table2, PhaseCell, PhaseGrid, PhaseKind, PhaseSpec, Table1Row,
    Table2Row, TableOutcome, REPORT_RANK_TOL, SUCCESS_THRESHOLD,
};
pub use generate::{rand_low_tubal, FactorScale};
pub use metrics::{psnr, rel_error, RecoveryVerdict};
