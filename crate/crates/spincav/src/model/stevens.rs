//! Extended Stevens operators for the rank-2 crystal-field terms.
//!
//! Built-in support covers `k = 2`, `q = -2..=2`:
//!
//! ```text
//! O_2^0  = 3 Sz^2 - s(s+1)
//! O_2^1  = (Sx Sz + Sz Sx) / 2
//! O_2^2  = Sx^2 - Sy^2
//! O_2^-1 = (Sy Sz + Sz Sy) / 2
//! O_2^-2 = (Sx Sy + Sy Sx) / 2
//! ```
//!
//! Rank 4 and 6 operators are accepted only as caller-supplied raw Hermitian
//! matrices (see [`super::giant::GiantSpinConfig::raw_anisotropy`]); their
//! normalization conventions vary between tabulations and are not guessed here.

use crate::error::{Error, Result};
use crate::matrix::OperatorMatrix;
use crate::model::spin::{spin_matrices, Spin};

/// Stevens operator `O_k^q` for spin `s`.
pub fn stevens_operator(k: u32, q: i32, s: Spin) -> Result<OperatorMatrix> {
    if q.unsigned_abs() > k {
        return Err(Error::invalid(format!("|q| = {} exceeds k = {}", q.unsigned_abs(), k)));
    }
    if k > s.twice() {
        return Err(Error::invalid(format!(
            "rank k = {k} exceeds 2s = {} (operator vanishes identically)",
            s.twice()
        )));
    }
    match k {
        2 => Ok(rank_two(q, s)),
        4 | 6 => Err(Error::UnsupportedOperator { k, q }),
        _ => Err(Error::invalid(format!("unsupported Stevens rank k = {k}"))),
    }
}

fn rank_two(q: i32, s: Spin) -> OperatorMatrix {
    let ops = spin_matrices(s);
    match q {
        0 => {
            let sz2 = ops.sz.matmul(&ops.sz).scale_re(3.0);
            sz2.sub(&OperatorMatrix::identity(s.dim()).scale_re(s.casimir()))
        }
        1 => ops.sx.sym_product(&ops.sz),
        2 => ops.sx.matmul(&ops.sx).sub(&ops.sy.matmul(&ops.sy)),
        -1 => ops.sy.sym_product(&ops.sz),
        -2 => ops.sx.sym_product(&ops.sy),
        _ => unreachable!("|q| <= k checked by caller"),
    }
}
