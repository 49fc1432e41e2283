//! Essential equivalence of decompositions: same rank-one terms up to order and
//! per-term rescaling of factors.

mod assignment;

use std::cmp::Ordering;

use crate::cp::Decomposition;
use crate::error::{Error, Result};
use crate::numeric::{projective_normalize, Backend, Field, Matrix, Tolerance};

/// A rank-one term in normal form: `term = residual * v_1 (x) ... (x) v_d` with
/// each `v_s` a canonical projective representative.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalTerm<F> {
    pub vectors: Vec<Vec<F>>,
    pub residual: F,
    /// `original_s = scales[s] * vectors[s]`; the residual is their product.
    pub scales: Vec<F>,
}

pub fn canonical_term<F: Field>(vectors: &[Vec<F>], tol: Tolerance) -> Result<CanonicalTerm<F>> {
    let mut out = Vec::with_capacity(vectors.len());
    let mut scales = Vec::with_capacity(vectors.len());
    for (s, v) in vectors.iter().enumerate() {
        let (canon, scale) = projective_normalize(v, tol)
            .ok_or_else(|| Error::Degenerate(format!("zero vector in mode {s}")))?;
        out.push(canon);
        scales.push(scale);
    }
    let residual = scales.iter().fold(F::one(), |acc, c| acc.mul(c));
    Ok(CanonicalTerm {
        vectors: out,
        residual,
        scales,
    })
}

/// Term permutation and per-mode scalings taking one decomposition to another.
///
/// Term `j` of the first decomposition, with its mode-`s` vector multiplied by
/// `scalings[s][j]`, equals term `permutation[j]` of the second. The scalings of
/// each term multiply to one.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceWitness<F> {
    pub permutation: Vec<usize>,
    pub scalings: Vec<Vec<F>>,
    /// Relative acceptance threshold used by the float backend, `10 * tau`.
    pub threshold: Option<f64>,
}

impl<F: Field> EquivalenceWitness<F> {
    pub fn identity(order: usize, len: usize) -> Self {
        Self {
            permutation: (0..len).collect(),
            scalings: vec![vec![F::one(); len]; order],
            threshold: None,
        }
    }
}

/// Rebuilds `d` with its terms rescaled and reordered by `w` (no admissibility check
/// on the scalings).
pub fn scramble<F: Field>(
    d: &Decomposition<F>,
    w: &EquivalenceWitness<F>,
) -> Result<Decomposition<F>> {
    let r = d.len();
    if !is_permutation(&w.permutation, r) || w.scalings.len() != d.order() {
        return Err(Error::InvalidArgument(
            "witness does not fit the decomposition".into(),
        ));
    }
    let mut terms: Vec<Vec<Vec<F>>> = vec![Vec::new(); r];
    for j in 0..r {
        terms[w.permutation[j]] = d
            .term(j)
            .iter()
            .enumerate()
            .map(|(s, v)| v.iter().map(|c| c.mul(&w.scalings[s][j])).collect())
            .collect();
    }
    let factors = (0..d.order())
        .map(|s| Matrix::from_columns(&terms.iter().map(|t| t[s].clone()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    Decomposition::new_allow_degenerate(factors)
}

fn is_permutation(p: &[usize], r: usize) -> bool {
    let mut seen = vec![false; r];
    p.len() == r
        && p.iter().all(|&i| {
            if i >= r || seen[i] {
                return false;
            }
            seen[i] = true;
            true
        })
}

fn lex_vectors<F: Field>(a: &[Vec<F>], b: &[Vec<F>]) -> Ordering {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| x.lex_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn norm<F: Field>(v: &[F]) -> f64 {
    v.iter().map(|c| c.magnitude().powi(2)).sum::<f64>().sqrt()
}

/// Distance between two canonical float terms and the magnitude it is judged against.
fn term_distance<F: Field>(a: &CanonicalTerm<F>, b: &CanonicalTerm<F>) -> (f64, f64) {
    let shape = a
        .vectors
        .iter()
        .zip(&b.vectors)
        .map(|(x, y)| {
            x.iter()
                .zip(y)
                .map(|(p, q)| p.sub(q).magnitude().powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    let magnitude = a.residual.magnitude().max(b.residual.magnitude());
    (
        magnitude * shape + a.residual.sub(&b.residual).magnitude(),
        magnitude,
    )
}

/// Decides whether two decompositions have the same multiset of rank-one terms and
/// returns a witness if so.
///
/// The exact backend sorts canonical terms and compares them one to one (equal
/// terms keep their original index order). The float backend assigns each term to
/// its nearest unused counterpart and falls back to an optimal assignment on the
/// distance matrix; pairs are accepted at distance `<= 10 * tau * magnitude`.
pub fn match_decompositions<F: Field>(
    d1: &Decomposition<F>,
    d2: &Decomposition<F>,
    tol: Tolerance,
) -> Result<Option<EquivalenceWitness<F>>> {
    if d1.dims() != d2.dims() {
        return Err(Error::DimensionMismatch(format!(
            "shapes {:?} and {:?} differ",
            d1.dims(),
            d2.dims()
        )));
    }
    if d1.len() != d2.len() {
        return Err(Error::DimensionMismatch(format!(
            "lengths {} and {} differ",
            d1.len(),
            d2.len()
        )));
    }
    let c1 = canonical_terms(d1, tol)?;
    let c2 = canonical_terms(d2, tol)?;
    let r = d1.len();

    let (permutation, threshold) = match F::BACKEND {
        Backend::Exact => {
            let order = |c: &[CanonicalTerm<F>]| {
                let mut idx: Vec<usize> = (0..r).collect();
                idx.sort_by(|&i, &j| {
                    lex_vectors(&c[i].vectors, &c[j].vectors)
                        .then_with(|| c[i].residual.lex_cmp(&c[j].residual))
                });
                idx
            };
            let (o1, o2) = (order(&c1), order(&c2));
            let mut perm = vec![0; r];
            for (&i, &j) in o1.iter().zip(&o2) {
                if c1[i].vectors != c2[j].vectors || c1[i].residual != c2[j].residual {
                    return Ok(None);
                }
                perm[i] = j;
            }
            (perm, None)
        }
        Backend::Float => {
            let threshold = 10.0 * tol.value();
            let dist: Vec<Vec<(f64, f64)>> = c1
                .iter()
                .map(|a| c2.iter().map(|b| term_distance(a, b)).collect())
                .collect();
            let accept = |i: usize, j: usize| {
                let (d, m) = dist[i][j];
                d <= threshold * m
            };
            let mut used = vec![false; r];
            let mut greedy = Vec::with_capacity(r);
            for row in &dist {
                let best = (0..r)
                    .filter(|&j| !used[j])
                    .min_by(|&a, &b| row[a].0.total_cmp(&row[b].0));
                match best {
                    Some(j) => {
                        used[j] = true;
                        greedy.push(j);
                    }
                    None => break,
                }
            }
            let perm = if greedy.iter().enumerate().all(|(i, &j)| accept(i, j)) {
                greedy
            } else {
                let cost: Vec<Vec<f64>> = dist
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|&(d, m)| if m > 0.0 { d / m } else { d })
                            .collect()
                    })
                    .collect();
                assignment::min_cost_assignment(&cost)
            };
            if !perm.iter().enumerate().all(|(i, &j)| accept(i, j)) {
                return Ok(None);
            }
            (perm, Some(threshold))
        }
    };

    let order = d1.order();
    let mut scalings = vec![vec![F::one(); r]; order];
    for (i, &j) in permutation.iter().enumerate() {
        let mut product = F::one();
        for (s, row) in scalings.iter_mut().enumerate() {
            let lambda = if s + 1 < order || F::BACKEND == Backend::Exact {
                c2[j].scales[s].div(&c1[i].scales[s])
            } else {
                F::one().div(&product)
            };
            product = product.mul(&lambda);
            row[i] = lambda;
        }
    }
    let witness = EquivalenceWitness {
        permutation,
        scalings,
        threshold,
    };
    Ok(verify_witness(d1, d2, &witness).then_some(witness))
}

fn canonical_terms<F: Field>(
    d: &Decomposition<F>,
    tol: Tolerance,
) -> Result<Vec<CanonicalTerm<F>>> {
    (0..d.len())
        .map(|j| canonical_term(&d.term(j), tol))
        .collect()
}

/// Checks a witness term by term: `scalings[s][j] * d1[s][:, j] == d2[s][:, permutation[j]]`
/// and `prod_s scalings[s][j] == 1`, exactly or within the witness threshold.
pub fn verify_witness<F: Field>(
    d1: &Decomposition<F>,
    d2: &Decomposition<F>,
    w: &EquivalenceWitness<F>,
) -> bool {
    let r = d1.len();
    if d1.dims() != d2.dims()
        || d2.len() != r
        || !is_permutation(&w.permutation, r)
        || w.scalings.len() != d1.order()
        || w.scalings.iter().any(|s| s.len() != r)
    {
        return false;
    }
    let threshold = w.threshold.unwrap_or(10.0 * Tolerance::DEFAULT);
    let order = d1.order() as f64;
    let close = |a: &[F], b: &[F]| match F::BACKEND {
        Backend::Exact => a == b,
        Backend::Float => {
            let diff: Vec<F> = a.iter().zip(b).map(|(x, y)| x.sub(y)).collect();
            norm(&diff) <= order * threshold * norm(b).max(norm(a))
        }
    };
    for (j, &k) in w.permutation.iter().enumerate() {
        let mut product = F::one();
        for s in 0..d1.order() {
            let lambda = &w.scalings[s][j];
            product = product.mul(lambda);
            let scaled: Vec<F> = d1.factors()[s]
                .column(j)
                .iter()
                .map(|c| c.mul(lambda))
                .collect();
            if !close(&scaled, &d2.factors()[s].column(k)) {
                return false;
            }
        }
        let one_ok = match F::BACKEND {
            Backend::Exact => product == F::one(),
            Backend::Float => product.sub(&F::one()).magnitude() <= order * threshold,
        };
        if !one_ok {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{Complex64, GaussRat};

    fn v(xs: &[i64]) -> Vec<GaussRat> {
        xs.iter().map(|&x| GaussRat::from_integer(x)).collect()
    }

    fn sample() -> Decomposition<GaussRat> {
        Decomposition::from_terms(&[
            vec![v(&[1, 2]), v(&[0, 1]), v(&[3, 1])],
            vec![v(&[1, -1]), v(&[2, 5]), v(&[1, 1])],
            vec![v(&[4, 0]), v(&[1, 1]), v(&[0, 2])],
        ])
        .unwrap()
    }

    #[test]
    fn canonical_term_examples() {
        let tol = Tolerance::default();
        let sixth: Vec<GaussRat> = vec![GaussRat::ratio(1, 6), GaussRat::zero()];
        let t = canonical_term(&[v(&[2, 0]), v(&[0, 3]), sixth], tol).unwrap();
        assert_eq!(t.vectors, vec![v(&[1, 0]), v(&[0, 1]), v(&[1, 0])]);
        assert_eq!(t.residual, GaussRat::one());

        let t = canonical_term(&[v(&[1, 0]), v(&[1, 0]), v(&[1, 0])], tol).unwrap();
        assert_eq!(t.vectors, vec![v(&[1, 0]); 3]);
        assert_eq!(t.residual, GaussRat::one());

        let t = canonical_term(&[v(&[0, 4]), v(&[1, 1]), v(&[1, 0])], tol).unwrap();
        assert_eq!(t.vectors, vec![v(&[0, 1]), v(&[1, 1]), v(&[1, 0])]);
        assert_eq!(t.residual, GaussRat::from_integer(4));

        assert!(canonical_term(&[v(&[0, 0]), v(&[1, 0])], tol).is_err());
    }

    #[test]
    fn reversed_terms_match_with_unit_scalings() {
        let tol = Tolerance::default();
        let d1 = sample();
        let rev = EquivalenceWitness {
            permutation: vec![2, 1, 0],
            scalings: vec![vec![GaussRat::one(); 3]; 3],
            threshold: None,
        };
        let d2 = scramble(&d1, &rev).unwrap();
        let w = match_decompositions(&d1, &d2, tol).unwrap().unwrap();
        assert_eq!(w.permutation, vec![2, 1, 0]);
        assert!(w.scalings.iter().flatten().all(|c| *c == GaussRat::one()));
        assert!(verify_witness(&d1, &d2, &w));
    }

    #[test]
    fn rescaled_term_matches() {
        let tol = Tolerance::default();
        let d1 = sample();
        let mut w = EquivalenceWitness::identity(3, 3);
        w.scalings[0][0] = GaussRat::from_integer(2);
        w.scalings[1][0] = GaussRat::from_integer(3);
        w.scalings[2][0] = GaussRat::ratio(1, 6);
        let d2 = scramble(&d1, &w).unwrap();
        let found = match_decompositions(&d1, &d2, tol).unwrap().unwrap();
        assert_eq!(found.permutation, vec![0, 1, 2]);
        assert_eq!(found.scalings[0][0], GaussRat::from_integer(2));
        assert_eq!(found.scalings[1][0], GaussRat::from_integer(3));
        assert_eq!(found.scalings[2][0], GaussRat::ratio(1, 6));
    }

    #[test]
    fn different_terms_do_not_match() {
        let tol = Tolerance::default();
        let a = Decomposition::from_terms(&[vec![v(&[1, 0]); 3]]).unwrap();
        let b = Decomposition::from_terms(&[vec![v(&[0, 1]); 3]]).unwrap();
        assert!(match_decompositions(&a, &b, tol).unwrap().is_none());
        assert!(match_decompositions(&a, &sample(), tol).is_err());
    }

    #[test]
    fn bad_witnesses_fail_verification() {
        let tol = Tolerance::default();
        let d1 = sample();
        let w = match_decompositions(&d1, &d1, tol).unwrap().unwrap();
        assert!(verify_witness(&d1, &d1, &w));

        let mut doubled = w.clone();
        doubled.scalings[0][1] = GaussRat::from_integer(2);
        let d2 = scramble(&d1, &doubled).unwrap();
        // d2 differs from d1 by a term scaled by 2 overall
        assert!(!verify_witness(&d1, &d2, &doubled));
        assert!(match_decompositions(&d1, &d2, tol).unwrap().is_none());

        let mut swapped = w;
        swapped.permutation = vec![1, 0, 2];
        assert!(!verify_witness(&d1, &d1, &swapped));
    }

    #[test]
    fn float_matching_tolerates_roundoff() {
        let tol = Tolerance::default();
        let to_f = |d: &Decomposition<GaussRat>| {
            let factors = d
                .factors()
                .iter()
                .map(|m| {
                    Matrix::new(
                        m.rows(),
                        m.cols(),
                        m.entries().iter().map(GaussRat::to_complex64).collect(),
                    )
                    .unwrap()
                })
                .collect();
            Decomposition::new(factors).unwrap()
        };
        let d1 = to_f(&sample());
        let w = EquivalenceWitness {
            permutation: vec![1, 2, 0],
            scalings: vec![
                vec![
                    Complex64::new(0.3, 0.1),
                    Complex64::new(-2.0, 0.0),
                    Complex64::new(0.0, 1.0),
                ],
                vec![
                    Complex64::new(7.0, 0.0),
                    Complex64::new(1.0, 1.0),
                    Complex64::new(3.0, 0.0),
                ],
                vec![
                    Complex64::new(1.0, 0.0) / (Complex64::new(0.3, 0.1) * 7.0),
                    Complex64::new(1.0, 0.0)
                        / (Complex64::new(-2.0, 0.0) * Complex64::new(1.0, 1.0)),
                    Complex64::new(1.0, 0.0) / (Complex64::new(0.0, 3.0)),
                ],
            ],
            threshold: None,
        };
        let d2 = scramble(&d1, &w).unwrap();
        let found = match_decompositions(&d1, &d2, tol).unwrap().unwrap();
        assert_eq!(found.permutation, vec![1, 2, 0]);
        assert!(verify_witness(&d1, &d2, &found));
    }
}
