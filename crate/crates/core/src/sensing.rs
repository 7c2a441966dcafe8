//! Measurement models: dense Gaussian maps `y = A vec(X)` and Bernoulli
//! sampling masks with their projections.

use faer::ColRef;

use crate::error::{Error, Result};
use crate::rng::{self, purpose, Normals};
use crate::tensor::{Dims, Matrix2, Tensor3};

/// Upper bound on `m * n1 * n2 * n3` for a dense map.
pub const MAX_MAP_ENTRIES: usize = 1 << 28;

/// `vec(X)`: the storage order (`i` fastest, then `j`, then `k`), so entry
/// `(i, j, k)` lands at `k n1 n2 + j n1 + i`.
pub fn vec(x: &Tensor3) -> Vec<f64> {
    x.as_slice().to_vec()
}

/// Inverse of [`vec`].
pub fn unvec(values: &[f64], dims: Dims) -> Result<Tensor3> {
    Tensor3::from_vec(dims, values.to_vec())
}

fn col_to_vec(c: faer::Col<f64>) -> Vec<f64> {
    (0..c.nrows()).map(|i| c[i]).collect()
}

/// Linear map `X -> A vec(X)` with an `m x (n1 n2 n3)` matrix `A`.
#[derive(Debug, Clone)]
pub struct GaussianMap {
    dims: Dims,
    seed: Option<u64>,
    a: Matrix2,
}

/// Draws `A` with i.i.d. `N(0, 1/m)` entries. Entries are generated in
/// column-major order of `A` from the Box-Muller stream of
/// `(seed, GAUSSIAN_MAP)`.
pub fn make_gaussian_map(m: usize, dims: Dims, seed: u64) -> Result<GaussianMap> {
    if m == 0 {
        return Err(Error::ZeroMeasurements);
    }
    dims.validate()?;
    let d = dims.len();
    if m.saturating_mul(d) > MAX_MAP_ENTRIES {
        return Err(Error::TooLarge(format!(
            "dense {m}x{d} measurement matrix exceeds {MAX_MAP_ENTRIES} entries"
        )));
    }
    let mut data = vec![0.0; m * d];
    Normals::new(rng::stream(seed, &[purpose::GAUSSIAN_MAP])).fill(&mut data, 1.0 / (m as f64).sqrt());
    Ok(GaussianMap {
        dims,
        seed: Some(seed),
        a: Matrix2::from_col_major(m, d, data)?,
    })
}

impl GaussianMap {
    /// Wraps an explicit matrix; its column count must be `n1 n2 n3`.
    pub fn from_matrix(dims: Dims, a: Matrix2) -> Result<Self> {
        dims.validate()?;
        if a.rows() == 0 {
            return Err(Error::ZeroMeasurements);
        }
        if a.cols() != dims.len() {
            return Err(Error::DimMismatch(format!(
                "matrix has {} columns, tensor {dims} has {} entries",
                a.cols(),
                dims.len()
            )));
        }
        Ok(GaussianMap { dims, seed: None, a })
    }

    /// Number of measurements.
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Seed the matrix was drawn from; `None` for explicit matrices.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.a
    }

    pub(crate) fn view(&self) -> faer::MatRef<'_, f64> {
        self.a.view()
    }

    /// `A vec(x)`.
    pub fn apply(&self, x: &Tensor3) -> Result<Vec<f64>> {
        if x.dims() != self.dims {
            return Err(Error::dims(x.dims(), self.dims));
        }
        Ok(self.apply_raw(x.as_slice()))
    }

    pub(crate) fn apply_raw(&self, x: &[f64]) -> Vec<f64> {
        col_to_vec(self.view() * ColRef::from_slice(x))
    }

    /// `unvec(A^T y)`.
    pub fn adjoint(&self, y: &[f64]) -> Result<Tensor3> {
        if y.len() != self.m() {
            return Err(Error::LengthMismatch {
                expected: self.m(),
                got: y.len(),
            });
        }
        Ok(Tensor3::from_raw(self.dims, self.adjoint_raw(y)))
    }

    pub(crate) fn adjoint_raw(&self, y: &[f64]) -> Vec<f64> {
        col_to_vec(self.view().transpose() * ColRef::from_slice(y))
    }
}

/// Observation pattern `Omega` of a tensor, drawn entrywise with probability `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMask {
    dims: Dims,
    p: f64,
    seed: u64,
    observed: Vec<bool>,
    count: usize,
}

fn check_rate(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidRate(p))
    }
}

/// Bernoulli mask: entry `t` (storage order) is observed iff the `t`-th
/// uniform draw of the `(seed, MASK)` stream is below `p`.
pub fn make_bernoulli_mask(dims: Dims, p: f64, seed: u64) -> Result<SampleMask> {
    check_rate(p)?;
    dims.validate()?;
    let mut stream = rng::stream(seed, &[purpose::MASK]);
    let observed: Vec<bool> = (0..dims.len())
        .map(|_| rng::uniform(&mut stream) < p)
        .collect();
    Ok(SampleMask::assemble(dims, p, seed, observed))
}

impl SampleMask {
    /// Rebuilds a mask from stored flags (storage order).
    pub fn from_flags(dims: Dims, p: f64, seed: u64, observed: Vec<bool>) -> Result<Self> {
        check_rate(p)?;
        dims.validate()?;
        if observed.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                got: observed.len(),
            });
        }
        Ok(SampleMask::assemble(dims, p, seed, observed))
    }

    fn assemble(dims: Dims, p: f64, seed: u64, observed: Vec<bool>) -> Self {
        let count = observed.iter().filter(|&&b| b).count();
        SampleMask {
            dims,
            p,
            seed,
            observed,
            count,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Target sampling rate.
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `|Omega|`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn flags(&self) -> &[bool] {
        &self.observed
    }

    pub fn is_observed(&self, i: usize, j: usize, k: usize) -> bool {
        self.observed[self.dims.offset(i, j, k)]
    }

    fn check(&self, x: &Tensor3) -> Result<()> {
        if x.dims() != self.dims {
            return Err(Error::dims(x.dims(), self.dims));
        }
        Ok(())
    }

    fn keep(&self, x: &Tensor3, keep_observed: bool) -> Result<Tensor3> {
        self.check(x)?;
        let data = x
            .as_slice()
            .iter()
            .zip(&self.observed)
            .map(|(&v, &o)| if o == keep_observed { v } else { 0.0 })
            .collect();
        Ok(Tensor3::from_raw(self.dims, data))
    }

    /// `P_Omega(x)`: zeroes the unobserved entries.
    pub fn proj_omega(&self, x: &Tensor3) -> Result<Tensor3> {
        self.keep(x, true)
    }

    /// `P_{Omega^c}(x)`: zeroes the observed entries.
    pub fn proj_omega_c(&self, x: &Tensor3) -> Result<Tensor3> {
        self.keep(x, false)
    }

    /// `R_Omega(x) = P_Omega(x) / p`.
    pub fn r_omega(&self, x: &Tensor3) -> Result<Tensor3> {
        Ok(self.proj_omega(x)?.scaled(1.0 / self.p))
    }
}
