//! Discrete Fourier transform along the third (tube) dimension.
//!
//! The forward transform is unnormalized and the inverse carries the `1/n3`
//! factor, so `||A||_F = ||fft(A)||_F / sqrt(n3)` and the tensor nuclear norm
//! is `(1/n3) * sum_k ||fft(A)^(k)||_*`.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::tensor::{Dims, Tensor3};

/// Relative tolerance for conjugate-symmetry checks and for the imaginary
/// residue discarded by [`ifft_dim3`].
pub const SYM_TOL: f64 = 1e-8;

/// Frequency-domain image of a real tensor. Slice `k` is the DFT coefficient
/// `k` of every tube. Conjugate symmetry
/// `conj(slice k) == slice (n3 - k)` holds for `k = 1..n3-1` (0-based), and
/// slice 0 is real.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqTensor3 {
    dims: Dims,
    data: Vec<Complex64>,
}

impl FreqTensor3 {
    /// Wraps frequency data, rejecting anything that is not the transform of
    /// a real tensor (up to [`SYM_TOL`] relative to the largest magnitude).
    pub fn from_vec(dims: Dims, data: Vec<Complex64>) -> Result<Self> {
        dims.validate()?;
        if data.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let f = FreqTensor3 { dims, data };
        let residue = f.symmetry_residue();
        let limit = SYM_TOL * f.max_abs();
        if residue > limit {
            return Err(Error::SymmetryViolation { residue, limit });
        }
        Ok(f)
    }

    /// Assembles a frequency tensor from its first `ceil((n3+1)/2)` slices,
    /// filling the rest by conjugate mirroring. `half` must hold exactly
    /// `dims.half_slices() * n1 * n2` values.
    pub(crate) fn from_half(dims: Dims, mut half: Vec<Complex64>) -> Self {
        let len = dims.slice_len();
        debug_assert_eq!(half.len(), dims.half_slices() * len);
        half.resize(dims.len(), Complex64::new(0.0, 0.0));
        for k in dims.half_slices()..dims.n3 {
            let src = dims.n3 - k;
            let (head, tail) = half.split_at_mut(k * len);
            for (dst, s) in tail[..len].iter_mut().zip(&head[src * len..(src + 1) * len]) {
                *dst = s.conj();
            }
        }
        FreqTensor3 { dims, data: half }
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Frequency slice `k` as a column-major `n1 x n2` block.
    pub fn slice(&self, k: usize) -> &[Complex64] {
        let len = self.dims.slice_len();
        &self.data[k * len..(k + 1) * len]
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.data[self.dims.offset(i, j, k)]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation from conjugate symmetry: imaginary parts of slice 0
    /// and `|conj(slice k) - slice (n3-k)|` for the mirrored pairs.
    pub fn symmetry_residue(&self) -> f64 {
        let n3 = self.dims.n3;
        let mut worst = self.slice(0).iter().fold(0.0_f64, |acc, z| acc.max(z.im.abs()));
        for k in 1..n3 {
            let mirror = self.slice(n3 - k);
            for (a, b) in self.slice(k).iter().zip(mirror) {
                worst = worst.max((a.conj() - b).norm());
            }
        }
        worst
    }
}

/// Runs a length-`n3` FFT over every tube of `data`, in place.
fn transform_tubes(dims: Dims, data: &mut [Complex64], direction: FftDirection) {
    let n3 = dims.n3;
    if n3 == 1 {
        return;
    }
    let stride = dims.slice_len();
    let fft = FftPlanner::new().plan_fft(n3, direction);

    // Gather tubes contiguously so one batched call transforms all of them.
    let mut tubes = vec![Complex64::new(0.0, 0.0); data.len()];
    for p in 0..stride {
        for k in 0..n3 {
            tubes[p * n3 + k] = data[k * stride + p];
        }
    }
    fft.process(&mut tubes);
    for p in 0..stride {
        for k in 0..n3 {
            data[k * stride + p] = tubes[p * n3 + k];
        }
    }
}

/// Forward DFT of every tube `A(i, j, :)`.
pub fn fft_dim3(a: &Tensor3) -> FreqTensor3 {
    let dims = a.dims();
    let mut data: Vec<Complex64> = a.as_slice().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_tubes(dims, &mut data, FftDirection::Forward);
    FreqTensor3 { dims, data }
}

/// Inverse DFT (with `1/n3`) of every tube. The imaginary residue must stay
/// below [`SYM_TOL`] relative to the largest output magnitude; it is then
/// dropped.
pub fn ifft_dim3(f: &FreqTensor3) -> Result<Tensor3> {
    let (t, residue, scale) = inverse_parts(f);
    let limit = SYM_TOL * scale;
    if residue > limit {
        return Err(Error::SymmetryViolation { residue, limit });
    }
    Ok(t)
}

/// Inverse transform for frequency tensors that were assembled by conjugate
/// mirroring, where the residue is round-off by construction.
pub(crate) fn ifft_mirrored(f: &FreqTensor3) -> Tensor3 {
    inverse_parts(f).0
}

fn inverse_parts(f: &FreqTensor3) -> (Tensor3, f64, f64) {
    let dims = f.dims;
    let mut data = f.data.clone();
    transform_tubes(dims, &mut data, FftDirection::Inverse);
    let inv = 1.0 / dims.n3 as f64;
    let mut residue = 0.0_f64;
    let mut scale = 0.0_f64;
    let real = data
        .iter()
        .map(|z| {
            let z = z * inv;
            residue = residue.max(z.im.abs());
            scale = scale.max(z.norm());
            z.re
        })
        .collect();
    (Tensor3::from_raw(dims, real), residue, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::identity;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample(d: Dims) -> Tensor3 {
        Tensor3::from_fn(d, |i, j, k| ((i * 31 + j * 17 + k * 7) % 13) as f64 / 3.0 - 2.0)
    }

    #[test]
    fn length_one_tube_is_identity() {
        let d = Dims::new(2, 3, 1).unwrap();
        let a = sample(d);
        let f = fft_dim3(&a);
        assert_eq!(f.get(0, 1, 0), c(a.get(0, 1, 0), 0.0));
    }

    #[test]
    fn constant_tube_transforms_to_impulse() {
        let d = Dims::new(3, 1, 2).unwrap();
        let ones = Tensor3::from_fn(d, |_, _, _| 1.0);
        let f = fft_dim3(&ones);
        assert_eq!(f.get(2, 0, 0), c(2.0, 0.0));
        assert_eq!(f.get(2, 0, 1), c(0.0, 0.0));
    }

    #[test]
    fn inverse_of_impulse_is_constant() {
        let d = Dims::new(1, 1, 2).unwrap();
        let f = FreqTensor3::from_vec(d, vec![c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(ifft_dim3(&f).unwrap().as_slice(), &[1.0, 1.0]);

        let z = FreqTensor3::from_vec(Dims::new(2, 2, 3).unwrap(), vec![c(0.0, 0.0); 12]).unwrap();
        assert_eq!(ifft_dim3(&z).unwrap().fro_norm(), 0.0);
    }

    #[test]
    fn round_trip_all_small_shapes() {
        for n3 in [1, 2, 3, 4, 5, 8] {
            for n1 in 1..=8 {
                for n2 in [1, 3, 8] {
                    let d = Dims::new(n1, n2, n3).unwrap();
                    let a = sample(d);
                    let back = ifft_dim3(&fft_dim3(&a)).unwrap();
                    let err = (&back - &a).fro_norm();
                    assert!(err <= 1e-12 * a.fro_norm().max(1.0), "{d}: {err}");
                }
            }
        }
    }

    #[test]
    fn forward_output_is_conjugate_symmetric() {
        for n3 in [2, 3, 4, 7] {
            let a = sample(Dims::new(3, 2, n3).unwrap());
            let f = fft_dim3(&a);
            assert!(f.symmetry_residue() <= 1e-13 * f.max_abs());
        }
    }

    #[test]
    fn identity_transforms_to_identity_in_every_slice() {
        let f = fft_dim3(&identity(3, 4).unwrap());
        for k in 0..4 {
            for j in 0..3 {
                for i in 0..3 {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_eq!(f.get(i, j, k), c(expect, 0.0));
                }
            }
        }
    }

    #[test]
    fn asymmetric_frequency_data_is_rejected() {
        let d = Dims::new(1, 1, 3).unwrap();
        let err = FreqTensor3::from_vec(d, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0)]);
        assert!(matches!(err, Err(Error::SymmetryViolation { .. })));
        let err = FreqTensor3::from_vec(Dims::new(1, 1, 1).unwrap(), vec![c(1.0, 0.5)]);
        assert!(matches!(err, Err(Error::SymmetryViolation { .. })));
    }

    #[test]
    fn mirrored_assembly_matches_full_transform() {
        let a = sample(Dims::new(2, 3, 6).unwrap());
        let f = fft_dim3(&a);
        let d = f.dims();
        let half = f.as_slice()[..d.half_slices() * d.slice_len()].to_vec();
        let g = FreqTensor3::from_half(d, half);
        for (x, y) in f.as_slice().iter().zip(g.as_slice()) {
            assert!((x - y).norm() <= 1e-12);
        }
    }
}
