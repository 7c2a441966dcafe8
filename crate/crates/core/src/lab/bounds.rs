//! Closed-form sample-complexity quantities.

use crate::error::{Error, Result};

/// Degrees of freedom of an `n1 x n2 x n3` tensor of tubal rank `r`:
/// `r (n1 + n2 - r) n3`.
///
/// # Panics
/// If `r > min(n1, n2)`.
pub fn dof(n1: u64, n2: u64, n3: u64, r: u64) -> u64 {
    assert!(r <= n1.min(n2), "rank {r} exceeds min({n1}, {n2})");
    r * (n1 + n2 - r) * n3
}

/// Gaussian measurements sufficient for exact recovery:
/// `3 r (n1 + n2 - r) n3 + 1`.
pub fn gaussian_bound(n1: u64, n2: u64, n3: u64, r: u64) -> u64 {
    3 * dof(n1, n2, n3, r) + 1
}

/// Measurements sufficient for robust recovery at level `epsilon`:
/// `ceil((3 r (n1 + n2 - r) n3 + 3/2) / (1 - epsilon)^2)`.
pub fn robust_bound(n1: u64, n2: u64, n3: u64, r: u64, epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let numer = 3.0 * dof(n1, n2, n3, r) as f64 + 1.5;
    Ok((numer / (1.0 - epsilon).powi(2)).ceil() as u64)
}

/// Sampling rate of the completion guarantee,
/// `c0 mu r ln^2(max(n1, n2) n3) / (min(n1, n2) n3)`. The constant `c0` is
/// not known in closed form and is supplied by the caller.
pub fn completion_rate_bound(n1: usize, n2: usize, n3: usize, r: usize, mu: f64, c0: f64) -> f64 {
    let big = (n1.max(n2) * n3) as f64;
    let small = (n1.min(n2) * n3) as f64;
    c0 * mu * r as f64 * big.ln().powi(2) / small
}
