//! Reference implementations built on nalgebra with naive DFTs and
//! materialized block-circulant matrices. They share no code path with the
//! library beyond the `Tensor3` container.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use tubal::{Dims, Tensor3};

/// Small deterministic generator for test inputs.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed ^ 0x5DEE_CE66_D1CE_4E5B)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[-1, 1)`.
    pub fn sym(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 - 1.0
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn dims(&mut self, max12: usize, max3: usize) -> Dims {
        Dims::new(1 + self.below(max12), 1 + self.below(max12), 1 + self.below(max3)).unwrap()
    }

    pub fn tensor(&mut self, dims: Dims) -> Tensor3 {
        Tensor3::from_fn(dims, |_, _, _| self.sym())
    }

    /// Random shape, then random entries.
    pub fn any_tensor(&mut self, max12: usize, max3: usize) -> Tensor3 {
        let d = self.dims(max12, max3);
        self.tensor(d)
    }
}

pub fn slice_matrix(a: &Tensor3, k: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(a.n1(), a.n2(), a.frontal(k))
}

/// Frequency slices by the defining sum `sum_t a_t w^{kt}`, `w = e^{-2 pi i / n3}`.
pub fn dft_slices(a: &Tensor3) -> Vec<DMatrix<Complex64>> {
    let n3 = a.n3();
    (0..n3)
        .map(|k| {
            DMatrix::from_fn(a.n1(), a.n2(), |i, j| {
                (0..n3)
                    .map(|t| {
                        let ang = -2.0 * std::f64::consts::PI * (k * t % n3) as f64 / n3 as f64;
                        Complex64::from_polar(a.get(i, j, t), ang)
                    })
                    .sum()
            })
        })
        .collect()
}

/// Inverse of [`dft_slices`], keeping the real part.
pub fn idft_real(slices: &[DMatrix<Complex64>]) -> Tensor3 {
    let n3 = slices.len();
    let (n1, n2) = slices[0].shape();
    Tensor3::from_fn(Dims::new(n1, n2, n3).unwrap(), |i, j, t| {
        let s: Complex64 = (0..n3)
            .map(|k| {
                let ang = 2.0 * std::f64::consts::PI * (k * t % n3) as f64 / n3 as f64;
                slices[k][(i, j)] * Complex64::from_polar(1.0, ang)
            })
            .sum();
        s.re / n3 as f64
    })
}

/// Block `(r, c)` is frontal slice `(r - c) mod n3`.
pub fn bcirc_dense(a: &Tensor3) -> DMatrix<f64> {
    let (n1, n2, n3) = (a.n1(), a.n2(), a.n3());
    DMatrix::from_fn(n1 * n3, n2 * n3, |row, col| {
        let (br, i) = (row / n1, row % n1);
        let (bc, j) = (col / n2, col % n2);
        a.get(i, j, (br + n3 - bc) % n3)
    })
}

/// `C(:, :, k) = sum_l A(:, :, l) B(:, :, k - l mod n3)`.
pub fn conv_product(a: &Tensor3, b: &Tensor3) -> Tensor3 {
    let n3 = a.n3();
    let mut out = Tensor3::zeros(Dims::new(a.n1(), b.n2(), n3).unwrap());
    for k in 0..n3 {
        let mut acc = DMatrix::<f64>::zeros(a.n1(), b.n2());
        for l in 0..n3 {
            acc += slice_matrix(a, l) * slice_matrix(b, (k + n3 - l) % n3);
        }
        for j in 0..b.n2() {
            for i in 0..a.n1() {
                out.set(i, j, k, acc[(i, j)]);
            }
        }
    }
    out
}

pub fn singular_values(m: &DMatrix<Complex64>) -> DVector<f64> {
    m.clone().svd(false, false).singular_values
}

pub fn real_singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    m.clone().svd(false, false).singular_values
}

/// `(1/n3) ||bdiag(fft(A))||_*`.
pub fn tnn_oracle(a: &Tensor3) -> f64 {
    dft_slices(a).iter().map(|s| singular_values(s).sum()).sum::<f64>() / a.n3() as f64
}

/// `||bcirc(A)||_2`.
pub fn spectral_oracle(a: &Tensor3) -> f64 {
    real_singular_values(&bcirc_dense(a)).max()
}

/// Soft-thresholds the singular values of every DFT slice independently.
pub fn svt_oracle(a: &Tensor3, tau: f64) -> Tensor3 {
    let slices: Vec<_> = dft_slices(a)
        .into_iter()
        .map(|s| {
            let mut svd = s.svd(true, true);
            for v in svd.singular_values.iter_mut() {
                *v = (*v - tau).max(0.0);
            }
            svd.recompose().unwrap()
        })
        .collect();
    idft_real(&slices)
}

pub fn rank_oracle(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let s = real_singular_values(m);
    let top = s.max();
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * top).count()
}

/// `M V diag((1 - tau/sigma)_+) V^T` from the eigenvectors of `M^T M`. The
/// thin SVD route is avoided because nalgebra's `U` and `V` do not always
/// reconstruct exactly rank-deficient matrices.
pub fn matrix_svt(m: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let eig = (m.transpose() * m).symmetric_eigen();
    let v = &eig.eigenvectors;
    let w = DVector::from_iterator(
        v.ncols(),
        eig.eigenvalues.iter().map(|&l| {
            let sigma = l.max(0.0).sqrt();
            if sigma > tau {
                1.0 - tau / sigma
            } else {
                0.0
            }
        }),
    );
    m * v * DMatrix::from_diagonal(&w) * v.transpose()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
