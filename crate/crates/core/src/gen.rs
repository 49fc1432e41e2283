//! Seeded instance generators.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rand::seq::SliceRandom;

use crate::cp::Decomposition;
use crate::equivalence::EquivalenceWitness;
use crate::error::{Error, Result};
use crate::kruskal::PointSet;
use crate::lemma::LemmaInstance;
use crate::numeric::{Field, GaussRat, Matrix};

/// Default coefficient range for generated entries.
pub const DEFAULT_COEFFS: RangeInclusive<i64> = -3..=3;

fn check_range(coeffs: &RangeInclusive<i64>) -> Result<()> {
    if coeffs.is_empty() || (*coeffs.start() == 0 && *coeffs.end() == 0) {
        return Err(Error::InvalidArgument(format!(
            "coefficient range {coeffs:?} cannot produce a nonzero vector"
        )));
    }
    Ok(())
}

fn nonzero_vector<F: Field>(
    rng: &mut ChaCha8Rng,
    n: usize,
    coeffs: &RangeInclusive<i64>,
) -> Vec<F> {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(coeffs.clone())).collect();
        if v.iter().any(|&c| c != 0) {
            return v.into_iter().map(F::from_i64).collect();
        }
    }
}

/// Decomposition with integer entries drawn uniformly from `coeffs`; zero columns
/// are redrawn. Deterministic in `(dims, r, seed, coeffs)`.
pub fn gen_decomposition<F: Field>(
    dims: &[usize],
    r: usize,
    seed: u64,
    coeffs: RangeInclusive<i64>,
) -> Result<Decomposition<F>> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidArgument(format!("invalid dims {dims:?}")));
    }
    check_range(&coeffs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors = dims
        .iter()
        .map(|&n| {
            let cols: Vec<Vec<F>> = (0..r)
                .map(|_| nonzero_vector(&mut rng, n, &coeffs))
                .collect();
            Matrix::from_columns(&cols)
        })
        .collect::<Result<Vec<_>>>()?;
    Decomposition::new(factors)
}

/// `count` nonzero integer points in `F^dim`.
pub fn gen_pointset<F: Field>(
    dim: usize,
    count: usize,
    seed: u64,
    coeffs: RangeInclusive<i64>,
) -> Result<PointSet<F>> {
    check_range(&coeffs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..count)
        .map(|_| nonzero_vector(&mut rng, dim, &coeffs))
        .collect();
    PointSet::new(dim, points)
}

/// Integer matrix (zero entries allowed).
pub fn gen_matrix<F: Field>(
    rows: usize,
    cols: usize,
    seed: u64,
    coeffs: RangeInclusive<i64>,
) -> Result<Matrix<F>> {
    if coeffs.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "empty coefficient range {coeffs:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..rows * cols)
        .map(|_| F::from_i64(rng.gen_range(coeffs.clone())))
        .collect();
    Matrix::new(rows, cols, data)
}

/// Random term permutation with nonzero integer scalings, the last mode chosen so
/// that each term's scalings multiply to one.
pub fn gen_witness<F: Field>(order: usize, r: usize, seed: u64) -> EquivalenceWitness<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut permutation: Vec<usize> = (0..r).collect();
    permutation.shuffle(&mut rng);
    let mut scalings = vec![vec![F::one(); r]; order];
    for j in 0..r {
        let mut product = F::one();
        for row in scalings.iter_mut().take(order - 1) {
            let mut c = 0;
            while c == 0 {
                c = rng.gen_range(-3..=3);
            }
            row[j] = F::from_i64(c);
            product = product.mul(&row[j]);
        }
        scalings[order - 1][j] = F::one().div(&product);
    }
    EquivalenceWitness {
        permutation,
        scalings,
        threshold: None,
    }
}

/// Exact permutation-lemma instance in `F^n` with `r` points per set, `S` pairwise
/// distinct and `S~` spanning.
///
/// The seed selects one of four families: `S` a rescaled permutation of `S~`;
/// `S~` with one point replaced; an unrelated random `S`; and `S~` with forced
/// repetitions and collinearities against a random `S`.
pub fn gen_lemma_instance(n: usize, r: usize, seed: u64) -> Result<LemmaInstance<GaussRat>> {
    if n == 0 || r < n {
        return Err(Error::InvalidArgument(format!(
            "need r >= n >= 1 for a spanning S~, got n = {n}, r = {r}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = seed % 4;
    for _ in 0..10_000 {
        let mut tilde: Vec<Vec<GaussRat>> = (0..r)
            .map(|_| nonzero_vector(&mut rng, n, &(-2..=2)))
            .collect();
        if family == 3 && r > n {
            // repeat a point projectively and put another on the line of two points
            let i = rng.gen_range(0..r);
            let j = (i + 1) % r;
            let c = GaussRat::from_integer(rng.gen_range(1..=3));
            tilde[j] = tilde[i].iter().map(|x| x * &c).collect();
            if r >= 4 && r > n + 1 {
                let k = (i + 2) % r;
                let (a, b) = (&tilde[i], &tilde[(i + 3) % r]);
                let sum: Vec<GaussRat> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if sum.iter().any(|x| !x.is_zero()) {
                    tilde[k] = sum;
                }
            }
        }
        let s: Vec<Vec<GaussRat>> = match family {
            0 => {
                let mut s: Vec<Vec<GaussRat>> = tilde
                    .iter()
                    .map(|p| {
                        let mut c = 0;
                        while c == 0 {
                            c = rng.gen_range(-4..=4);
                        }
                        p.iter().map(|x| x * &GaussRat::from_integer(c)).collect()
                    })
                    .collect();
                s.shuffle(&mut rng);
                s
            }
            1 => {
                let mut s = tilde.clone();
                let i = rng.gen_range(0..r);
                s[i] = nonzero_vector(&mut rng, n, &(-2..=2));
                s.shuffle(&mut rng);
                s
            }
            _ => (0..r)
                .map(|_| nonzero_vector(&mut rng, n, &(-2..=2)))
                .collect(),
        };
        let inst = LemmaInstance::new(PointSet::new(n, s)?, PointSet::new(n, tilde)?)?;
        let tol = crate::numeric::Tolerance::default();
        if inst.s_distinct(tol) && inst.s_tilde_spans(tol) {
            return Ok(inst);
        }
    }
    Err(Error::InvalidArgument(format!(
        "could not draw an admissible instance for n = {n}, r = {r}"
    )))
}
