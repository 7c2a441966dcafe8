//! CSV output. Reals are written with 17 significant digits.

use std::path::Path;

use tubal::solve::{Residuals, SolverReport};

use crate::error::CliResult;

pub fn real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub const SOLVER_COLUMNS: [&str; 7] = [
    "iterations",
    "converged",
    "res_x",
    "res_z",
    "res_feas",
    "res_gap",
    "mu_final",
];

fn residual_fields(r: &Residuals) -> [String; 4] {
    [real(r.delta_x), real(r.delta_z), real(r.feasibility), opt_real(r.gap)]
}

pub fn solver_fields(report: &SolverReport) -> Vec<String> {
    let mut out = vec![report.iterations.to_string(), report.converged.to_string()];
    out.extend(residual_fields(&report.residuals));
    out.push(real(report.mu_final));
    out
}

pub fn write_history(path: &Path, report: &SolverReport) -> CliResult<()> {
    let rows: Vec<Vec<String>> = report
        .history
        .iter()
        .map(|h| {
            let mut row = vec![h.iter.to_string(), real(h.objective)];
            row.extend(residual_fields(&h.residuals));
            row.push(real(h.mu));
            row
        })
        .collect();
    write_csv(
        path,
        &["iter", "objective", "res_x", "res_z", "res_feas", "res_gap", "mu"],
        &rows,
    )
}
