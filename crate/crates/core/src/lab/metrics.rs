use crate::solve::SolverReport;
use crate::tensor::Tensor3;
use crate::tsvd::tubal_rank;

/// `||xhat - x0||_F / ||x0||_F`. A zero reference gives 0 for an exact
/// match and infinity otherwise.
///
/// # Panics
/// If the shapes differ.
pub fn rel_error(xhat: &Tensor3, x0: &Tensor3) -> f64 {
    assert_eq!(xhat.dims(), x0.dims(), "shape mismatch");
    let diff = (xhat - x0).fro_norm();
    let base = x0.fro_norm();
    if base == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / base
    }
}

/// Peak signal-to-noise ratio in dB, `10 log10(||M||_inf^2 / MSE)`.
/// Infinite for an exact reconstruction.
///
/// # Panics
/// If the shapes differ.
pub fn psnr(xhat: &Tensor3, m: &Tensor3) -> f64 {
    assert_eq!(xhat.dims(), m.dims(), "shape mismatch");
    let diff = xhat - m;
    let mse = diff.fro_norm().powi(2) / m.dims().len() as f64;
    if mse == 0.0 {
        return f64::INFINITY;
    }
    let peak = m.max_abs();
    10.0 * (peak * peak / mse).log10()
}

/// Outcome of one recovery attempt against a known ground truth.
#[derive(Debug, Clone)]
pub struct RecoveryVerdict {
    pub rel_error: f64,
    /// Tubal rank of the estimate.
    pub rank: usize,
    pub recovered: bool,
    pub iterations: usize,
    pub converged: bool,
}

impl RecoveryVerdict {
    /// `recovered` means `rel_error <= threshold`.
    pub fn assess(
        xhat: &Tensor3,
        x0: &Tensor3,
        report: &SolverReport,
        threshold: f64,
        rank_tol: f64,
    ) -> Self {
        let rel = rel_error(xhat, x0);
        RecoveryVerdict {
            rel_error: rel,
            rank: tubal_rank(xhat, rank_tol).unwrap_or(0),
            recovered: rel <= threshold,
            iterations: report.iterations,
            converged: report.converged,
        }
    }
}
