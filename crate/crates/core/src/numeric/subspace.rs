use super::field::{Field, Tolerance};
use super::matrix::{rank_dense, Echelon};
use crate::error::{Error, Result};

/// A linear subspace of `F^n`, stored as a list of independent vectors.
///
/// Projective subspaces of `P(F^n)` are represented by their linear cones, so a
/// projective hyperplane is a subspace of dimension `n - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Vec<Vec<F>>,
}

impl<F: Field> Subspace<F> {
    /// Wraps `basis`, verifying lengths and linear independence.
    pub fn new(ambient: usize, basis: Vec<Vec<F>>, tol: Tolerance) -> Result<Self> {
        check_lengths(ambient, &basis)?;
        let rank = rank_dense(basis.len(), ambient, &basis.concat(), tol);
        if rank != basis.len() {
            return Err(Error::InvalidArgument(format!(
                "basis of {} vectors has rank {rank}",
                basis.len()
            )));
        }
        Ok(Self { ambient, basis })
    }

    pub(crate) fn from_independent(ambient: usize, basis: Vec<Vec<F>>) -> Self {
        Self { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut e = vec![F::zero(); ambient];
                e[i] = F::one();
                e
            })
            .collect();
        Self { ambient, basis }
    }

    /// Span of arbitrary (possibly dependent, possibly zero) vectors, with a
    /// reduced echelon basis. For the exact backend this basis is canonical:
    /// two spans are equal iff their bases are equal.
    pub fn span(ambient: usize, vectors: &[Vec<F>], tol: Tolerance) -> Result<Self> {
        check_lengths(ambient, vectors)?;
        if vectors.is_empty() {
            return Ok(Self::zero(ambient));
        }
        let ech = Echelon::reduce(vectors.len(), ambient, vectors.concat(), tol);
        Ok(Self {
            ambient,
            basis: ech.row_basis(),
        })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    /// Same subspace with its reduced echelon basis.
    pub fn canonical(&self, tol: Tolerance) -> Self {
        Self::span(self.ambient, &self.basis, tol).expect("lengths already checked")
    }

    pub fn contains(&self, v: &[F], tol: Tolerance) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} tested against subspace of F^{}",
                v.len(),
                self.ambient
            )));
        }
        let mut rows = self.basis.concat();
        rows.extend_from_slice(v);
        Ok(rank_dense(self.dim() + 1, self.ambient, &rows, tol) == self.dim())
    }

    /// True iff `other` is a subspace of `self`.
    pub fn includes(&self, other: &Self, tol: Tolerance) -> Result<bool> {
        for v in other.basis() {
            if !self.contains(v, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Basis of the annihilator `{x in (F^n)^* : x(v) = 0 for v in self}`, with
    /// covectors written in the dual coordinates.
    pub fn annihilator(&self, tol: Tolerance) -> Self {
        if self.basis.is_empty() {
            return Self::full(self.ambient);
        }
        let ech = Echelon::reduce(self.dim(), self.ambient, self.basis.concat(), tol);
        Self::from_independent(self.ambient, ech.kernel_basis())
    }

    /// Smallest subspace containing both.
    pub fn join(&self, other: &Self, tol: Tolerance) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch(
                "subspaces of different spaces".into(),
            ));
        }
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Self::span(self.ambient, &all, tol)
    }
}

fn check_lengths<F>(ambient: usize, vectors: &[Vec<F>]) -> Result<()> {
    if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} in F^{ambient}",
            v.len()
        )));
    }
    Ok(())
}

/// `x(v) = sum_i x_i v_i`; covectors pair bilinearly, without conjugation.
pub fn pair<F: Field>(x: &[F], v: &[F]) -> F {
    x.iter()
        .zip(v)
        .fold(F::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::GaussRat;

    fn e(n: usize, i: usize) -> Vec<GaussRat> {
        let mut v = vec![GaussRat::zero(); n];
        v[i] = GaussRat::one();
        v
    }

    #[test]
    fn membership_examples() {
        let tol = Tolerance::default();
        let s = Subspace::new(2, vec![e(2, 0)], tol).unwrap();
        assert!(s.contains(&e(2, 0), tol).unwrap());
        assert!(!s.contains(&e(2, 1), tol).unwrap());
        let z = Subspace::<GaussRat>::zero(2);
        assert!(z
            .contains(&[GaussRat::zero(), GaussRat::zero()], tol)
            .unwrap());
        assert!(s.contains(&e(3, 0), tol).is_err());
    }

    #[test]
    fn dependent_basis_rejected() {
        let tol = Tolerance::default();
        assert!(Subspace::new(2, vec![e(2, 0), e(2, 0)], tol).is_err());
    }

    #[test]
    fn span_is_canonical() {
        let tol = Tolerance::default();
        let a = Subspace::span(3, &[e(3, 0), e(3, 1)], tol).unwrap();
        let sum: Vec<GaussRat> = e(3, 0).iter().zip(e(3, 1)).map(|(x, y)| x + &y).collect();
        let b = Subspace::span(3, &[sum, e(3, 1), vec![GaussRat::zero(); 3]], tol).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn annihilator_pairs_to_zero() {
        let tol = Tolerance::default();
        let s: Subspace<GaussRat> =
            Subspace::span(3, &[vec![1.into(), 2.into(), 3.into()]], tol).unwrap();
        let ann = s.annihilator(tol);
        assert_eq!(ann.dim(), 2);
        for x in ann.basis() {
            assert!(pair(x, &s.basis()[0]).is_zero());
        }
        assert_eq!(Subspace::<GaussRat>::full(3).annihilator(tol).dim(), 0);
    }
}
