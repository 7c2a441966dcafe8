//! The t-product and its literal block-circulant reference.

use faer::c64;

use crate::error::{Error, Result};
use crate::fft::{fft_dim3, ifft_mirrored, FreqTensor3};
use crate::linalg::{cview, extend_col_major};
use crate::tensor::{Dims, Matrix2, Tensor3};

/// Largest matrix (in entries) the reference paths will materialize.
pub const ORACLE_MAX_ENTRIES: usize = 1 << 22;

fn check_tprod_dims(a: &Tensor3, b: &Tensor3) -> Result<Dims> {
    if a.n2() != b.n1() || a.n3() != b.n3() {
        return Err(Error::DimMismatch(format!(
            "t-product of {} and {}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(Dims {
        n1: a.n1(),
        n2: b.n2(),
        n3: a.n3(),
    })
}

/// t-product `A * B` of an `n1 x n2 x n3` and an `n2 x l x n3` tensor.
///
/// Multiplies matching frequency slices; only the first `ceil((n3+1)/2)`
/// products are formed, the rest are their conjugates.
pub fn tprod(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let out = check_tprod_dims(a, b)?;
    let fa = fft_dim3(a);
    let fb = fft_dim3(b);
    Ok(ifft_mirrored(&freq_product(&fa, &fb, out)))
}

pub(crate) fn freq_product(fa: &FreqTensor3, fb: &FreqTensor3, out: Dims) -> FreqTensor3 {
    let (n1, n2) = (fa.dims().n1, fa.dims().n2);
    let mut half: Vec<c64> = Vec::with_capacity(out.half_slices() * out.slice_len());
    for k in 0..out.half_slices() {
        let prod = cview(fa.slice(k), n1, n2) * cview(fb.slice(k), n2, out.n2);
        extend_col_major(&mut half, prod.as_ref());
    }
    FreqTensor3::from_half(out, half)
}

/// Block-circulant matrix of `A`: block `(r, c)` is frontal slice
/// `(r - c) mod n3`.
pub fn bcirc(a: &Tensor3) -> Result<Matrix2> {
    let Dims { n1, n2, n3 } = a.dims();
    let (rows, cols) = (n1 * n3, n2 * n3);
    guard(rows, cols)?;
    let mut m = Matrix2::zeros(rows, cols);
    for br in 0..n3 {
        for bc in 0..n3 {
            let k = (br + n3 - bc) % n3;
            for j in 0..n2 {
                for i in 0..n1 {
                    m.set(br * n1 + i, bc * n2 + j, a.get(i, j, k));
                }
            }
        }
    }
    Ok(m)
}

fn guard(rows: usize, cols: usize) -> Result<()> {
    if rows.saturating_mul(cols) > ORACLE_MAX_ENTRIES {
        return Err(Error::TooLarge(format!(
            "reference path would materialize a {rows}x{cols} matrix"
        )));
    }
    Ok(())
}

/// `fold(bcirc(A) . unfold(B))`, evaluated literally with plain loops.
/// Slow; kept as the reference the FFT path is tested against.
pub fn tprod_oracle(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let out = check_tprod_dims(a, b)?;
    let circ = bcirc(a)?;
    let unfolded = unfold(b);
    guard(circ.rows(), unfolded.cols())?;
    let mut prod = Matrix2::zeros(circ.rows(), unfolded.cols());
    for c in 0..unfolded.cols() {
        for r in 0..circ.rows() {
            let mut acc = 0.0;
            for t in 0..circ.cols() {
                acc += circ.get(r, t) * unfolded.get(t, c);
            }
            prod.set(r, c, acc);
        }
    }
    Ok(fold(&prod, out))
}

/// Stacks the frontal slices of `B` vertically: `(n2*n3) x l`.
fn unfold(b: &Tensor3) -> Matrix2 {
    let Dims { n1, n2, n3 } = b.dims();
    Matrix2::from_fn(n1 * n3, n2, |r, c| b.get(r % n1, c, r / n1))
}

fn fold(m: &Matrix2, dims: Dims) -> Tensor3 {
    Tensor3::from_fn(dims, |i, j, k| m.get(k * dims.n1 + i, j))
}
