//! Inputs shared by the benchmarks.

use krusk_core::gen::{gen_decomposition, gen_lemma_instance};
use krusk_core::{Complex64, Decomposition, GaussRat, LemmaInstance};

/// Generic 4x4x4 decomposition of length 5, exact and as doubles.
pub fn generic_444(seed: u64) -> (Decomposition<GaussRat>, Decomposition<Complex64>) {
    let exact = gen_decomposition::<GaussRat>(&[4, 4, 4], 5, seed, -9..=9).expect("valid shape");
    let float = gen_decomposition::<Complex64>(&[4, 4, 4], 5, seed, -9..=9).expect("valid shape");
    (exact, float)
}

/// Columns of a `rows x cols` integer matrix.
pub fn columns<F: krusk_core::Field>(rows: usize, cols: usize, seed: u64) -> Vec<Vec<F>> {
    krusk_core::gen::gen_matrix::<F>(rows, cols, seed, -5..=5)
        .expect("valid shape")
        .columns()
}

pub fn lemma_instance(n: usize, r: usize, seed: u64) -> LemmaInstance<GaussRat> {
    gen_lemma_instance(n, r, seed).expect("admissible draw")
}
