//! Dense real third-order tensors and the small dense matrix type used by the
//! reference (block-circulant) paths.
//!
//! Storage order is fixed: the first index varies fastest, then the second,
//! then the third. A frontal slice `A(:, :, k)` is therefore a contiguous
//! column-major `n1 x n2` block. All indices in the API are 0-based; the
//! documentation uses the usual 1-based mathematical notation `A(i, j, k)`
//! when talking about formulas.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{DimsDisplay, Error, Result};

/// Shape of a third-order tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl Dims {
    /// Validated constructor; every dimension must be positive.
    pub fn new(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        let dims = Dims { n1, n2, n3 };
        dims.validate()?;
        Ok(dims)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n2 == 0 || self.n3 == 0 {
            return Err(Error::InvalidDims(DimsDisplay(self.n1, self.n2, self.n3)));
        }
        self.n1
            .checked_mul(self.n2)
            .and_then(|v| v.checked_mul(self.n3))
            .ok_or_else(|| Error::TooLarge(format!("{self} overflows usize")))?;
        Ok(())
    }

    /// Number of entries `n1 * n2 * n3`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries per frontal slice.
    #[inline]
    pub fn slice_len(&self) -> usize {
        self.n1 * self.n2
    }

    /// Storage offset of entry `(i, j, k)`: `k * n1 * n2 + j * n1 + i`.
    #[inline]
    pub fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.n1 && j < self.n2 && k < self.n3);
        (k * self.n2 + j) * self.n1 + i
    }

    /// Number of frequency slices that must be computed explicitly; the
    /// rest follow from conjugate symmetry. Equals `ceil((n3 + 1) / 2)`.
    #[inline]
    pub fn half_slices(&self) -> usize {
        self.n3 / 2 + 1
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.n1, self.n2, self.n3)
    }
}

/// A real `n1 x n2 x n3` tensor.
#[derive(Clone, PartialEq)]
pub struct Tensor3 {
    dims: Dims,
    data: Vec<f64>,
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tensor3")
            .field("dims", &self.dims)
            .field("data", &self.data)
            .finish()
    }
}

/// The four entrywise norms reported by [`Tensor3::norms`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub fro: f64,
    pub l1: f64,
    pub linf: f64,
    /// Largest Frobenius norm over horizontal slices `A(i,:,:)` and lateral
    /// slices `A(:,j,:)`.
    pub linf2: f64,
}

impl Tensor3 {
    /// All-zero tensor.
    ///
    /// # Panics
    /// If any dimension is zero.
    pub fn zeros(dims: Dims) -> Self {
        dims.validate().expect("tensor dimensions must be positive");
        Tensor3 {
            dims,
            data: vec![0.0; dims.len()],
        }
    }

    /// Wraps a storage-order vector, checking length and finiteness.
    pub fn from_vec(dims: Dims, data: Vec<f64>) -> Result<Self> {
        dims.validate()?;
        if data.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Tensor3 { dims, data })
    }

    /// Builds a tensor from `f(i, j, k)` (0-based indices).
    ///
    /// # Panics
    /// If any dimension is zero or `f` returns a non-finite value.
    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Tensor3::zeros(dims);
        for k in 0..dims.n3 {
            for j in 0..dims.n2 {
                for i in 0..dims.n1 {
                    let v = f(i, j, k);
                    assert!(v.is_finite(), "non-finite entry at ({i}, {j}, {k})");
                    t.data[dims.offset(i, j, k)] = v;
                }
            }
        }
        t
    }

    /// Builds a tensor from its frontal slices, each given row by row.
    /// Handy in tests: `from_slices(&[&[&[1.0, 2.0], &[3.0, 4.0]]])` is the
    /// 2x2x1 tensor with first row `(1, 2)`.
    pub fn from_slices(slices: &[&[&[f64]]]) -> Result<Self> {
        let n3 = slices.len();
        let n1 = slices.first().map_or(0, |s| s.len());
        let n2 = slices.first().and_then(|s| s.first()).map_or(0, |r| r.len());
        let dims = Dims::new(n1, n2, n3)?;
        let mut data = vec![0.0; dims.len()];
        for (k, slice) in slices.iter().enumerate() {
            if slice.len() != n1 || slice.iter().any(|row| row.len() != n2) {
                return Err(Error::Format(format!("frontal slice {k} is not {n1}x{n2}")));
            }
            for (i, row) in slice.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    data[dims.offset(i, j, k)] = v;
                }
            }
        }
        Tensor3::from_vec(dims, data)
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn n1(&self) -> usize {
        self.dims.n1
    }

    #[inline]
    pub fn n2(&self) -> usize {
        self.dims.n2
    }

    #[inline]
    pub fn n3(&self) -> usize {
        self.dims.n3
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.dims.offset(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let off = self.dims.offset(i, j, k);
        self.data[off] = value;
    }

    /// Storage-order view of the entries.
    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Frontal slice `k` as a column-major `n1 x n2` block.
    pub fn frontal(&self, k: usize) -> &[f64] {
        let len = self.dims.slice_len();
        &self.data[k * len..(k + 1) * len]
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn norms(&self) -> Norms {
        let Dims { n1, n2, n3 } = self.dims;
        let mut rows = vec![0.0; n1];
        let mut cols = vec![0.0; n2];
        let mut l1 = 0.0;
        let mut linf = 0.0_f64;
        let mut sq = 0.0;
        for k in 0..n3 {
            for j in 0..n2 {
                for i in 0..n1 {
                    let v = self.get(i, j, k);
                    let v2 = v * v;
                    rows[i] += v2;
                    cols[j] += v2;
                    sq += v2;
                    l1 += v.abs();
                    linf = linf.max(v.abs());
                }
            }
        }
        let linf2 = rows
            .iter()
            .chain(cols.iter())
            .fold(0.0_f64, |acc, &v| acc.max(v))
            .sqrt();
        Norms {
            fro: sq.sqrt(),
            l1,
            linf,
            linf2,
        }
    }

    /// Entrywise `self - other`, max absolute value. Used for the solvers'
    /// stopping tests.
    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        debug_assert_eq!(self.dims, other.dims);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn scaled(&self, alpha: f64) -> Tensor3 {
        self.map(|v| alpha * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor3 {
        Tensor3 {
            dims: self.dims,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Tensor3) {
        debug_assert_eq!(self.dims, other.dims);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub(crate) fn from_raw(dims: Dims, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dims.len());
        Tensor3 { dims, data }
    }

    fn zip_with(&self, other: &Tensor3, f: impl Fn(f64, f64) -> f64) -> Tensor3 {
        assert_eq!(
            self.dims, other.dims,
            "elementwise operation on tensors of different shape"
        );
        Tensor3 {
            dims: self.dims,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

impl Add for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &Tensor3 {
    type Output = Tensor3;
    fn neg(self) -> Tensor3 {
        self.map(|v| -v)
    }
}

impl Mul<&Tensor3> for f64 {
    type Output = Tensor3;
    fn mul(self, rhs: &Tensor3) -> Tensor3 {
        rhs.scaled(self)
    }
}

/// Frobenius inner product `<A, B> = sum_ijk a_ijk b_ijk`.
pub fn inner(a: &Tensor3, b: &Tensor3) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::dims(a.dims, b.dims));
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum())
}

/// Conjugate transpose `A^*`: transpose every frontal slice, then reverse
/// the order of slices 2 through n3.
pub fn ctranspose(a: &Tensor3) -> Tensor3 {
    let Dims { n1, n2, n3 } = a.dims;
    let out_dims = Dims { n1: n2, n2: n1, n3 };
    let mut out = Tensor3::zeros(out_dims);
    for k in 0..n3 {
        let src = if k == 0 { 0 } else { n3 - k };
        for j in 0..n2 {
            for i in 0..n1 {
                out.set(j, i, k, a.get(i, j, src));
            }
        }
    }
    out
}

/// Identity tensor: first frontal slice is `I_n`, the others are zero.
pub fn identity(n: usize, n3: usize) -> Result<Tensor3> {
    let dims = Dims::new(n, n, n3)?;
    let mut t = Tensor3::zeros(dims);
    for i in 0..n {
        t.set(i, i, 0, 1.0);
    }
    Ok(t)
}

fn check_index(index: usize, bound: usize) -> Result<()> {
    if index >= bound {
        Err(Error::IndexOutOfRange { index, bound })
    } else {
        Ok(())
    }
}

/// Tensor column basis: `n x 1 x n3` with a single one at `(i, 0, 0)`.
pub fn column_basis(n: usize, n3: usize, i: usize) -> Result<Tensor3> {
    let dims = Dims::new(n, 1, n3)?;
    check_index(i, n)?;
    let mut t = Tensor3::zeros(dims);
    t.set(i, 0, 0, 1.0);
    Ok(t)
}

/// Tensor tube basis: `1 x 1 x n3` with a single one at `(0, 0, k)`.
pub fn tube_basis(n3: usize, k: usize) -> Result<Tensor3> {
    let dims = Dims::new(1, 1, n3)?;
    check_index(k, n3)?;
    let mut t = Tensor3::zeros(dims);
    t.set(0, 0, k, 1.0);
    Ok(t)
}

/// Unit tensor with a single one at `(i, j, k)`; equal to
/// `column(i) * tube(k) * column(j)^*`.
pub fn unit_tensor(dims: Dims, i: usize, j: usize, k: usize) -> Result<Tensor3> {
    dims.validate()?;
    check_index(i, dims.n1)?;
    check_index(j, dims.n2)?;
    check_index(k, dims.n3)?;
    let mut t = Tensor3::zeros(dims);
    t.set(i, j, k, 1.0);
    Ok(t)
}

/// Dense real matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix2 {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix2 {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Matrix2 { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                data.push(f(r, c));
            }
        }
        Matrix2 { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Matrix2::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[c * self.rows + r]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[c * self.rows + r] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn view(&self) -> faer::MatRef<'_, f64> {
        faer::MatRef::from_column_major_slice(&self.data, self.rows, self.cols)
    }
}
