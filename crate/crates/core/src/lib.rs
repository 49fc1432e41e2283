//! Uniqueness certificates for CP (canonical polyadic) tensor decompositions.
//!
//! The crate computes Kruskal ranks of the factor matrices of a decomposition
//! `T = sum_j u_j^(1) (x) ... (x) u_j^(d)` and certifies that the expression is
//! essentially unique (unique up to reordering terms and rescaling factors
//! within a term) whenever `k_1 + ... + k_d >= 2r + d - 1`. Around the
//! certificate it provides:
//!
//! * [`numeric`]: exact Gaussian-rational and tolerant complex linear algebra;
//! * [`kruskal`]: Kruskal rank and general linear position of point sets;
//! * [`cp`]: tensors, decompositions, flattenings and the certificate itself;
//! * [`equivalence`]: deciding whether two decompositions agree term by term;
//! * [`lemma`]: an executable form of the permutation lemma behind Kruskal's theorem;
//! * [`io`] and [`gen`]: the JSON instance format and seeded instance generators.

pub mod cp;
pub mod equivalence;
pub mod error;
pub mod gen;
pub mod io;
pub mod kruskal;
pub mod lemma;
pub mod numeric;

mod subsets;

pub use cp::{
    certify_uniqueness, compose, flattening, multilinear_ranks, rank_lower_bound,
    support_containment_check, Decomposition, SupportReport, Tensor, UniquenessCertificate,
    Verdict,
};
pub use equivalence::{
    canonical_term, match_decompositions, scramble, verify_witness, CanonicalTerm,
    EquivalenceWitness,
};
pub use error::{Error, Result};
pub use kruskal::{is_r_general_position, kruskal_rank, KruskalReport, PointSet};
pub use lemma::LemmaInstance;
pub use numeric::{Backend, Complex64, Field, GaussRat, Matrix, Scalar, Subspace, Tolerance};
