//! Kruskal rank and general linear position.
//!
//! A finite set of points in `P(W)` is in *r-general linear position* when no `r`
//! of them lie in a projective `(r-2)`-plane, i.e. every `r` representative vectors
//! are linearly independent. The Kruskal rank is the largest such `r`.
//!
//! Two independent routes are implemented: [`is_r_general_position`] grows spans
//! one point at a time and tests membership, while [`kruskal_rank`] ranks column
//! submatrices directly. Tests cross-check them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{rank_of_vectors, Backend, Field, Subspace, Tolerance};
use crate::subsets::Combinations;

/// Nonzero vectors standing for points of `P(F^n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet<F> {
    dim: usize,
    points: Vec<Vec<F>>,
}

impl<F: Field> PointSet<F> {
    pub fn new(dim: usize, points: Vec<Vec<F>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument(
                "ambient dimension must be positive".into(),
            ));
        }
        if points.is_empty() {
            return Err(Error::InvalidArgument("point set is empty".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().all(F::is_exact_zero) {
                return Err(Error::Degenerate(format!("point {i} is the zero vector")));
            }
        }
        Ok(Self { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<F>] {
        &self.points
    }

    pub fn backend(&self) -> Backend {
        F::BACKEND
    }

    pub fn into_points(self) -> Vec<Vec<F>> {
        self.points
    }
}

/// Whether every `r` of the points are linearly independent.
///
/// Each `r`-subset is walked in order, and a point falling into the span of the
/// points before it witnesses that the subset lies in a projective `(r-2)`-plane.
pub fn is_r_general_position<F: Field>(s: &PointSet<F>, r: usize, tol: Tolerance) -> Result<bool> {
    if r == 0 || r > s.len() {
        return Err(Error::InvalidArgument(format!(
            "r = {r} outside 1..={} for a set of {} points",
            s.len(),
            s.len()
        )));
    }
    if r > s.dim() {
        return Ok(false);
    }
    for subset in Combinations::new(s.len(), r) {
        let mut span = Subspace::zero(s.dim());
        for &i in &subset {
            let p = &s.points()[i];
            if span.contains(p, tol)? {
                return Ok(false);
            }
            span = span.join(&Subspace::span(s.dim(), std::slice::from_ref(p), tol)?, tol)?;
        }
    }
    Ok(true)
}

/// Kruskal rank together with the subset that bounded it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KruskalReport {
    pub rank: usize,
    /// First dependent subset (lexicographic order) of size `rank + 1`, if the
    /// rank is limited by a dependency rather than by `min(n, #vectors)`.
    pub dependent_subset: Option<Vec<usize>>,
}

/// Largest `r` such that every `r` of the vectors are linearly independent.
///
/// Returns 0 if some vector is zero and 1 if two vectors are proportional.
pub fn kruskal_rank<F: Field>(vectors: &[Vec<F>], tol: Tolerance) -> Result<usize> {
    Ok(kruskal_report(vectors, tol)?.rank)
}

pub fn kruskal_report<F: Field>(vectors: &[Vec<F>], tol: Tolerance) -> Result<KruskalReport> {
    let Some(first) = vectors.first() else {
        return Err(Error::InvalidArgument(
            "Kruskal rank of an empty list".into(),
        ));
    };
    let n = first.len();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::DimensionMismatch("vectors of unequal length".into()));
    }
    let cap = n.min(vectors.len());
    for r in 1..=cap {
        for subset in Combinations::new(vectors.len(), r) {
            let cols: Vec<&[F]> = subset.iter().map(|&i| vectors[i].as_slice()).collect();
            if rank_of_vectors(n, &cols, tol) < r {
                return Ok(KruskalReport {
                    rank: r - 1,
                    dependent_subset: Some(subset),
                });
            }
        }
    }
    Ok(KruskalReport {
        rank: cap,
        dependent_subset: None,
    })
}
