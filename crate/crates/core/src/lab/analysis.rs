//! Incoherence of skinny t-SVD factors and projections onto the tangent
//! space `T = { U * Y^* + W * V^* }`.

use crate::error::{Error, Result};
use crate::tensor::{ctranspose, Tensor3};
use crate::tproduct::tprod;
use crate::tsvd::TSvdFactors;

/// Largest squared Frobenius norm of a horizontal slice `A(i, :, :)`.
/// Equals `max_i ||A^* * e_i||_F^2` for the column basis `e_i`.
fn max_row_energy(a: &Tensor3) -> f64 {
    let d = a.dims();
    let mut rows = vec![0.0; d.n1];
    for k in 0..d.n3 {
        for j in 0..d.n2 {
            for (i, r) in rows.iter_mut().enumerate() {
                let v = a.get(i, j, k);
                *r += v * v;
            }
        }
    }
    rows.into_iter().fold(0.0, f64::max)
}

/// Tensor incoherence `mu` of `U: n1 x r x n3`, `V: n2 x r x n3`:
/// the larger of `(n1 n3 / r) max_i ||U^* * e_i||_F^2` and
/// `(n2 n3 / r) max_j ||V^* * e_j||_F^2`.
pub fn incoherence(f: &TSvdFactors) -> f64 {
    let r = f.width() as f64;
    let (n1, n3) = (f.u.n1() as f64, f.u.n3() as f64);
    let n2 = f.v.n1() as f64;
    let mu_u = n1 * n3 / r * max_row_energy(&f.u);
    let mu_v = n2 * n3 / r * max_row_energy(&f.v);
    mu_u.max(mu_v)
}

fn checked(f: &TSvdFactors, z: &Tensor3) -> Result<()> {
    let d = z.dims();
    if d.n1 != f.u.n1() || d.n2 != f.v.n1() || d.n3 != f.u.n3() {
        return Err(Error::DimMismatch(format!(
            "tensor {d} does not match factors {} and {}",
            f.u.dims(),
            f.v.dims()
        )));
    }
    Ok(())
}

/// `P_T(Z) = U U^* Z + Z V V^* - U U^* Z V V^*`.
pub fn proj_t(f: &TSvdFactors, z: &Tensor3) -> Result<Tensor3> {
    checked(f, z)?;
    let uu = tprod(&f.u, &ctranspose(&f.u))?;
    let vv = tprod(&f.v, &ctranspose(&f.v))?;
    let uz = tprod(&uu, z)?;
    let zv = tprod(z, &vv)?;
    let uzv = tprod(&uz, &vv)?;
    Ok(&(&uz + &zv) - &uzv)
}

/// `P_{T^perp}(Z) = Z - P_T(Z)`.
pub fn proj_t_perp(f: &TSvdFactors, z: &Tensor3) -> Result<Tensor3> {
    Ok(z - &proj_t(f, z)?)
}
