use crate::error::{Error, Result};
use crate::rng::{self, purpose, Normals};
use crate::tensor::{Dims, Tensor3};
use crate::tproduct::tprod;

/// Entry distribution of the random factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorScale {
    /// `N(0, 1)`.
    Unit,
    /// `N(0, 1/n)` with `n = max(n1, n2)`.
    InvN,
}

/// `P * Q` with `P: n1 x r x n3`, `Q: r x n2 x n3` drawn i.i.d. from the
/// `(seed, FACTORS)` stream: all of `P` in storage order, then all of `Q`.
pub fn rand_low_tubal(dims: Dims, r: usize, seed: u64, scale: FactorScale) -> Result<Tensor3> {
    dims.validate()?;
    let max = dims.n1.min(dims.n2);
    if r == 0 || r > max {
        return Err(Error::InvalidRank { rank: r, max });
    }
    let std = match scale {
        FactorScale::Unit => 1.0,
        FactorScale::InvN => 1.0 / (max_side(dims) as f64).sqrt(),
    };
    let mut normals = Normals::new(rng::stream(seed, &[purpose::FACTORS]));
    let p_dims = Dims { n2: r, ..dims };
    let q_dims = Dims { n1: r, ..dims };
    let mut p = vec![0.0; p_dims.len()];
    let mut q = vec![0.0; q_dims.len()];
    normals.fill(&mut p, std);
    normals.fill(&mut q, std);
    tprod(&Tensor3::from_vec(p_dims, p)?, &Tensor3::from_vec(q_dims, q)?)
}

fn max_side(dims: Dims) -> usize {
    dims.n1.max(dims.n2)
}
