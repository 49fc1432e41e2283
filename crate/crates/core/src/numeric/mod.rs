//! Scalar backends and the linear algebra the rest of the crate is built on.
//!
//! Two backends are provided: [`GaussRat`] (exact Gaussian rationals, rank by
//! fraction-free elimination) and [`num_complex::Complex64`] (complex doubles,
//! rank decided against a relative [`Tolerance`]).

mod field;
mod functional;
mod gauss;
mod matrix;
mod subspace;
mod sylvester;

pub use field::{Backend, Field, Scalar, Tolerance};
pub use functional::separating_functional;
pub use gauss::GaussRat;
pub use matrix::Matrix;
pub use subspace::{pair, Subspace};
pub use sylvester::{sylvester_defect, sylvester_ranks, SylvesterRanks};

pub(crate) use matrix::rank_dense;

pub use num_complex::Complex64;

/// Rank of the matrix whose columns are `vectors` (all of length `n`).
pub fn rank_of_vectors<F: Field>(n: usize, vectors: &[&[F]], tol: Tolerance) -> usize {
    let data: Vec<F> = vectors.iter().flat_map(|v| v.iter().cloned()).collect();
    // Rows of `data` are the vectors; rank is transpose invariant.
    rank_dense(vectors.len(), n, &data, tol)
}

/// Scales `v` so that it is a canonical representative of its projective point:
/// first nonzero coordinate 1 for the exact backend; unit norm with the first
/// significant coordinate real and positive for the float backend. Returns the
/// scale `c` with `v = c * canonical`, or `None` for a (numerically) zero vector.
pub fn projective_normalize<F: Field>(v: &[F], tol: Tolerance) -> Option<(Vec<F>, F)> {
    let scale = v.iter().map(F::magnitude).fold(0.0, f64::max);
    let threshold = tol.value() * scale;
    let lead = match F::BACKEND {
        Backend::Exact => v.iter().find(|c| !c.is_exact_zero())?.clone(),
        Backend::Float => {
            if scale == 0.0 {
                return None;
            }
            let first = v.iter().find(|c| !c.negligible(threshold))?;
            let norm = v.iter().map(|c| c.magnitude().powi(2)).sum::<f64>().sqrt();
            // phase(first) * norm
            first
                .div(&F::from_f64(first.magnitude()))
                .mul(&F::from_f64(norm))
        }
    };
    let canonical = v.iter().map(|c| c.div(&lead)).collect();
    Some((canonical, lead))
}
