use super::field::{Field, Tolerance};
use super::matrix::{rank_dense, Matrix};
use super::subspace::Subspace;
use crate::error::{Error, Result};

/// Ranks entering the Sylvester-type inequality for `M in A (x) B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SylvesterRanks {
    pub full: usize,
    /// Rank of `M` restricted to `U^perp x B^*`.
    pub rows_restricted: usize,
    /// Rank of `M` restricted to `A^* x V^perp`.
    pub cols_restricted: usize,
    /// Rank of `M` restricted to `U^perp x V^perp`.
    pub both_restricted: usize,
}

impl SylvesterRanks {
    /// `rank(M) - (r_U + r_V - r_UV)`.
    pub fn defect(&self) -> i64 {
        self.full as i64
            - (self.rows_restricted as i64 + self.cols_restricted as i64
                - self.both_restricted as i64)
    }
}

/// Computes the four ranks. `u` lives in `A = F^rows`, `v` in `B = F^cols`.
pub fn sylvester_ranks<F: Field>(
    m: &Matrix<F>,
    u: &Subspace<F>,
    v: &Subspace<F>,
    tol: Tolerance,
) -> Result<SylvesterRanks> {
    if u.ambient() != m.rows() || v.ambient() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "M is {}x{} but U lives in F^{} and V in F^{}",
            m.rows(),
            m.cols(),
            u.ambient(),
            v.ambient()
        )));
    }
    let u_perp = u.annihilator(tol);
    let v_perp = v.annihilator(tol);

    // P M with the rows of P spanning U^perp.
    let left: Vec<Vec<F>> = u_perp
        .basis()
        .iter()
        .map(|x| m.transpose_apply(x))
        .collect::<Result<_>>()?;
    // (M Q^T)^T with the rows of Q spanning V^perp.
    let mt = m.transpose();
    let right: Vec<Vec<F>> = v_perp
        .basis()
        .iter()
        .map(|y| mt.transpose_apply(y))
        .collect::<Result<_>>()?;
    // P M Q^T
    let both: Vec<F> = left
        .iter()
        .flat_map(|row| {
            v_perp
                .basis()
                .iter()
                .map(move |y| super::subspace::pair(row, y))
        })
        .collect();

    Ok(SylvesterRanks {
        full: m.rank(tol),
        rows_restricted: rank_dense(left.len(), m.cols(), &left.concat(), tol),
        cols_restricted: rank_dense(right.len(), m.rows(), &right.concat(), tol),
        both_restricted: rank_dense(u_perp.dim(), v_perp.dim(), &both, tol),
    })
}

/// `rank(M) - [rank(M|U^perp x B^*) + rank(M|A^* x V^perp) - rank(M|U^perp x V^perp)]`.
///
/// Nonnegative for every input over an exact field.
pub fn sylvester_defect<F: Field>(
    m: &Matrix<F>,
    u: &Subspace<F>,
    v: &Subspace<F>,
    tol: Tolerance,
) -> Result<i64> {
    Ok(sylvester_ranks(m, u, v, tol)?.defect())
}
