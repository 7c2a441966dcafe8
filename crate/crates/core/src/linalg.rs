//! Thin adapters between the crate's storage and the dense kernels in faer.

use faer::{c64, Mat, MatRef};

pub(crate) fn cview(data: &[c64], rows: usize, cols: usize) -> MatRef<'_, c64> {
    MatRef::from_column_major_slice(data, rows, cols)
}

pub(crate) fn rview(data: &[f64], rows: usize, cols: usize) -> MatRef<'_, f64> {
    MatRef::from_column_major_slice(data, rows, cols)
}

/// Appends `m` to `out` in column-major order.
pub(crate) fn extend_col_major<T: Copy>(out: &mut Vec<T>, m: MatRef<'_, T>) {
    out.reserve(m.nrows() * m.ncols());
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out.push(m[(i, j)]);
        }
    }
}

/// Thin SVD of one frequency slice, `A = U diag(s) V^H`, singular values in
/// non-increasing order.
pub(crate) struct SliceSvd {
    pub u: Mat<c64>,
    pub s: Vec<f64>,
    pub v: Mat<c64>,
}

/// Self-conjugate slices (DC, and Nyquist for even `n3`) are real; they go
/// through the real SVD so that the factors stay real, which is what keeps
/// the inverse transform of mirrored factors real.
pub(crate) fn slice_svd(slice: &[c64], rows: usize, cols: usize, real: bool) -> SliceSvd {
    if real {
        let re: Vec<f64> = slice.iter().map(|z| z.re).collect();
        let svd = rview(&re, rows, cols)
            .thin_svd()
            .expect("SVD of a finite real matrix converges");
        let lift = |m: MatRef<'_, f64>| Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)], 0.0));
        SliceSvd {
            u: lift(svd.U()),
            s: svd.S().column_vector().iter().copied().collect(),
            v: lift(svd.V()),
        }
    } else {
        let svd = cview(slice, rows, cols)
            .thin_svd()
            .expect("SVD of a finite complex matrix converges");
        SliceSvd {
            u: svd.U().to_owned(),
            s: svd.S().column_vector().iter().map(|z| z.re).collect(),
            v: svd.V().to_owned(),
        }
    }
}

pub(crate) fn slice_singular_values(slice: &[c64], rows: usize, cols: usize, real: bool) -> Vec<f64> {
    if real {
        let re: Vec<f64> = slice.iter().map(|z| z.re).collect();
        rview(&re, rows, cols)
            .singular_values()
            .expect("SVD of a finite real matrix converges")
    } else {
        cview(slice, rows, cols)
            .singular_values()
            .expect("SVD of a finite complex matrix converges")
    }
}

/// `U[:, :r] diag(s[:r]) V[:, :r]^H` where `r = s.len()`.
pub(crate) fn low_rank_product(u: MatRef<'_, c64>, s: &[f64], v: MatRef<'_, c64>) -> Mat<c64> {
    let r = s.len();
    if r == 0 {
        return Mat::zeros(u.nrows(), v.nrows());
    }
    let us = Mat::from_fn(u.nrows(), r, |i, j| u[(i, j)] * s[j]);
    us * v.get(.., ..r).adjoint()
}

/// Whether frequency slice `k` of an `n3`-long transform is self-conjugate.
#[inline]
pub(crate) fn is_real_slice(k: usize, n3: usize) -> bool {
    k == 0 || 2 * k == n3
}

/// Multiplicity of frequency slice `k` (among the first half) in the full
/// spectrum: self-conjugate slices count once, the others also stand for
/// their mirror.
#[inline]
pub(crate) fn slice_weight(k: usize, n3: usize) -> f64 {
    if is_real_slice(k, n3) {
        1.0
    } else {
        2.0
    }
}
