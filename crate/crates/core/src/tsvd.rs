//! t-SVD and the spectral quantities built on it: tubal rank, average rank,
//! tensor nuclear norm (TNN), tensor spectral norm, and the TNN proximal
//! operator.
//!
//! Everything is computed on frequency slices. Only the first
//! `ceil((n3+1)/2)` slices are decomposed; the remaining ones are complex
//! conjugates and either mirrored or counted twice.

use faer::c64;

use crate::error::{Error, Result};
use crate::fft::{fft_dim3, ifft_mirrored, FreqTensor3};
use crate::linalg::{
    extend_col_major, is_real_slice, low_rank_product, slice_singular_values, slice_svd,
    slice_weight,
};
use crate::tensor::{Dims, Tensor3};

/// Default relative tolerance for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-6;

/// Width of the factors returned by [`tsvd`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TSvdMode {
    /// `k = min(n1, n2)`.
    Full,
    /// `k = rank`, or the tubal rank at [`DEFAULT_RANK_TOL`] when `None`.
    /// Always at least 1.
    Skinny(Option<usize>),
}

/// `A = U * S * V^*` with `U: n1 x k x n3`, `S: k x k x n3` f-diagonal and
/// `V: n2 x k x n3`.
#[derive(Debug, Clone)]
pub struct TSvdFactors {
    pub u: Tensor3,
    pub s: Tensor3,
    pub v: Tensor3,
    pub mode: TSvdMode,
}

impl TSvdFactors {
    /// Factor width `k`.
    pub fn width(&self) -> usize {
        self.s.n1()
    }

    /// The tensor singular values `S(i, i, 1)`.
    pub fn singular_values(&self) -> Vec<f64> {
        (0..self.width()).map(|i| self.s.get(i, i, 0)).collect()
    }

    /// `U * S * V^*`.
    pub fn reconstruct(&self) -> Tensor3 {
        let us = crate::tproduct::tprod(&self.u, &self.s).expect("factor shapes agree");
        crate::tproduct::tprod(&us, &crate::tensor::ctranspose(&self.v)).expect("factor shapes agree")
    }
}

fn check_tol(rel_tol: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rel_tol) {
        return Err(Error::InvalidTolerance(rel_tol));
    }
    Ok(())
}

/// Singular values of the first `ceil((n3+1)/2)` frequency slices.
fn half_spectrum(fa: &FreqTensor3) -> Vec<Vec<f64>> {
    let Dims { n1, n2, n3 } = fa.dims();
    (0..fa.dims().half_slices())
        .map(|k| slice_singular_values(fa.slice(k), n1, n2, is_real_slice(k, n3)))
        .collect()
}

/// `S(i, i, 1) = (1/n3) sum_k sigma_i(fft(A)^(k))`, for `i < min(n1, n2)`.
fn singular_values_from_spectrum(spectrum: &[Vec<f64>], n3: usize) -> Vec<f64> {
    let width = spectrum.first().map_or(0, Vec::len);
    let mut out = vec![0.0; width];
    for (k, sv) in spectrum.iter().enumerate() {
        let w = slice_weight(k, n3);
        for (acc, s) in out.iter_mut().zip(sv) {
            *acc += w * s;
        }
    }
    out.iter_mut().for_each(|v| *v /= n3 as f64);
    out
}

/// Tensor singular values `S(i, i, 1)`, non-increasing, length `min(n1, n2)`.
pub fn tensor_singular_values(a: &Tensor3) -> Vec<f64> {
    singular_values_from_spectrum(&half_spectrum(&fft_dim3(a)), a.n3())
}

fn rank_of(values: &[f64], rel_tol: f64) -> usize {
    let top = values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > rel_tol * top).count()
}

/// t-SVD following the half-spectrum scheme: decompose slices
/// `1..=ceil((n3+1)/2)`, mirror `U` and `V` by conjugation, copy `S`,
/// transform back.
pub fn tsvd(a: &Tensor3, mode: TSvdMode) -> TSvdFactors {
    let Dims { n1, n2, n3 } = a.dims();
    let fa = fft_dim3(a);
    let full_width = n1.min(n2);
    let svds: Vec<_> = (0..fa.dims().half_slices())
        .map(|k| slice_svd(fa.slice(k), n1, n2, is_real_slice(k, n3)))
        .collect();

    let width = match mode {
        TSvdMode::Full => full_width,
        TSvdMode::Skinny(Some(r)) => r.clamp(1, full_width),
        TSvdMode::Skinny(None) => {
            let spectrum: Vec<Vec<f64>> = svds.iter().map(|s| s.s.clone()).collect();
            let values = singular_values_from_spectrum(&spectrum, n3);
            rank_of(&values, DEFAULT_RANK_TOL).max(1)
        }
    };

    let u_dims = Dims { n1, n2: width, n3 };
    let s_dims = Dims { n1: width, n2: width, n3 };
    let v_dims = Dims { n1: n2, n2: width, n3 };
    let mut u_half = Vec::with_capacity(u_dims.half_slices() * u_dims.slice_len());
    let mut s_half = Vec::with_capacity(s_dims.half_slices() * s_dims.slice_len());
    let mut v_half = Vec::with_capacity(v_dims.half_slices() * v_dims.slice_len());
    for svd in &svds {
        extend_col_major(&mut u_half, svd.u.get(.., ..width));
        extend_col_major(&mut v_half, svd.v.get(.., ..width));
        for j in 0..width {
            for i in 0..width {
                let v = if i == j { svd.s[i] } else { 0.0 };
                s_half.push(c64::new(v, 0.0));
            }
        }
    }
    TSvdFactors {
        u: ifft_mirrored(&FreqTensor3::from_half(u_dims, u_half)),
        s: ifft_mirrored(&FreqTensor3::from_half(s_dims, s_half)),
        v: ifft_mirrored(&FreqTensor3::from_half(v_dims, v_half)),
        mode,
    }
}

/// Decomposes every frequency slice (not just the first half) and reports
/// the largest disagreement between the mirrored and the recomputed slices,
/// measured on singular values and on the slice reconstructions
/// `U diag(s) V^H`. Zero up to round-off for real input.
pub fn mirror_deviation(a: &Tensor3) -> f64 {
    let Dims { n1, n2, n3 } = a.dims();
    let fa = fft_dim3(a);
    let mut worst = 0.0_f64;
    for k in fa.dims().half_slices()..n3 {
        let direct = slice_svd(fa.slice(k), n1, n2, false);
        let src = slice_svd(fa.slice(n3 - k), n1, n2, is_real_slice(n3 - k, n3));
        for (x, y) in direct.s.iter().zip(&src.s) {
            worst = worst.max((x - y).abs());
        }
        let direct_rec = low_rank_product(direct.u.as_ref(), &direct.s, direct.v.as_ref());
        let mirrored_rec = low_rank_product(src.u.as_ref(), &src.s, src.v.as_ref());
        for j in 0..n2 {
            for i in 0..n1 {
                worst = worst.max((direct_rec[(i, j)] - mirrored_rec[(i, j)].conj()).norm());
            }
        }
    }
    worst
}

/// Tubal rank: number of `S(i, i, 1)` above `rel_tol * S(1, 1, 1)`.
pub fn tubal_rank(a: &Tensor3, rel_tol: f64) -> Result<usize> {
    check_tol(rel_tol)?;
    Ok(rank_of(&tensor_singular_values(a), rel_tol))
}

/// Tensor nuclear norm, `sum_i S(i, i, 1) = (1/n3) sum_k ||fft(A)^(k)||_*`.
pub fn tnn(a: &Tensor3) -> f64 {
    tensor_singular_values(a).iter().sum()
}

/// Tensor spectral norm `||bcirc(A)||`, the largest singular value over all
/// frequency slices.
pub fn spectral_norm(a: &Tensor3) -> f64 {
    half_spectrum(&fft_dim3(a))
        .iter()
        .filter_map(|sv| sv.first().copied())
        .fold(0.0, f64::max)
}

/// Tensor average rank `rank(bcirc(A)) / n3`, kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AverageRank {
    /// `rank(bcirc(A))`, the summed rank of all frequency slices.
    pub bcirc_rank: usize,
    pub n3: usize,
}

impl AverageRank {
    pub fn value(&self) -> f64 {
        self.bcirc_rank as f64 / self.n3 as f64
    }
}

/// Average rank; a slice singular value counts when it exceeds
/// `rel_tol * ||A||`, which is the same cut the rank of `bcirc(A)` would use.
pub fn avg_rank(a: &Tensor3, rel_tol: f64) -> Result<AverageRank> {
    check_tol(rel_tol)?;
    let n3 = a.n3();
    let spectrum = half_spectrum(&fft_dim3(a));
    let top = spectrum
        .iter()
        .filter_map(|sv| sv.first().copied())
        .fold(0.0, f64::max);
    let mut total = 0;
    if top > 0.0 {
        for (k, sv) in spectrum.iter().enumerate() {
            let count = sv.iter().filter(|&&s| s > rel_tol * top).count();
            total += if is_real_slice(k, n3) { count } else { 2 * count };
        }
    }
    Ok(AverageRank { bcirc_rank: total, n3 })
}

/// Proximal operator of the tensor nuclear norm:
/// `argmin_X tau ||X||_* + 1/2 ||X - Y||_F^2`.
///
/// Each frequency slice has its singular values soft-thresholded by `tau`.
pub fn svt(y: &Tensor3, tau: f64) -> Result<Tensor3> {
    if !(tau >= 0.0) {
        return Err(Error::NegativeThreshold(tau));
    }
    Ok(svt_with_tnn(y, tau).0)
}

/// [`svt`] that also returns the TNN of its output, which falls out of the
/// thresholded spectrum at no extra cost.
pub(crate) fn svt_with_tnn(y: &Tensor3, tau: f64) -> (Tensor3, f64) {
    let dims = y.dims();
    let Dims { n1, n2, n3 } = dims;
    let fy = fft_dim3(y);
    let mut half = Vec::with_capacity(dims.half_slices() * dims.slice_len());
    let mut nuclear = 0.0;
    for k in 0..dims.half_slices() {
        let svd = slice_svd(fy.slice(k), n1, n2, is_real_slice(k, n3));
        let shrunk: Vec<f64> = svd
            .s
            .iter()
            .map(|s| s - tau)
            .take_while(|&s| s > 0.0)
            .collect();
        nuclear += slice_weight(k, n3) * shrunk.iter().sum::<f64>();
        let rec = low_rank_product(svd.u.as_ref(), &shrunk, svd.v.as_ref());
        if is_real_slice(k, n3) {
            for j in 0..n2 {
                for i in 0..n1 {
                    half.push(c64::new(rec[(i, j)].re, 0.0));
                }
            }
        } else {
            extend_col_major(&mut half, rec.as_ref());
        }
    }
    let x = ifft_mirrored(&FreqTensor3::from_half(dims, half));
    (x, nuclear / n3 as f64)
}
