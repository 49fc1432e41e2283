//! Tensors, CP decompositions and the Kruskal uniqueness certificate.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kruskal::kruskal_report;
use crate::numeric::{Backend, Field, Matrix, Subspace, Tolerance};

/// Dense `n_1 x ... x n_d` tensor, row-major (last index fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<F> {
    dims: Vec<usize>,
    data: Vec<F>,
}

impl<F: Field> Tensor<F> {
    pub fn new(dims: Vec<usize>, data: Vec<F>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::DimensionMismatch(format!(
                "a tensor needs at least 2 modes, got {}",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!(
                "every mode must have positive size, got {dims:?}"
            )));
        }
        let expected: usize = dims.iter().product();
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "tensor of shape {dims:?} needs {expected} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let len = dims.iter().product();
        Self::new(dims, vec![F::zero(); len])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn backend(&self) -> Backend {
        F::BACKEND
    }

    fn offset(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn get(&self, index: &[usize]) -> &F {
        &self.data[self.offset(index)]
    }

    /// Entrywise equality; exact for the exact backend, otherwise within
    /// `tol * max(1, max |entry|)`.
    pub fn approx_eq(&self, other: &Self, tol: Tolerance) -> bool {
        if self.dims != other.dims {
            return false;
        }
        match F::BACKEND {
            Backend::Exact => self.data == other.data,
            Backend::Float => {
                let scale = self
                    .data
                    .iter()
                    .chain(&other.data)
                    .map(F::magnitude)
                    .fold(1.0, f64::max);
                self.data
                    .iter()
                    .zip(&other.data)
                    .all(|(a, b)| a.sub(b).magnitude() <= tol.value() * scale)
            }
        }
    }
}

/// `r` rank-one terms given by `d` factor matrices; column `j` of factor `s` is
/// the mode-`s` vector of term `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<F> {
    dims: Vec<usize>,
    factors: Vec<Matrix<F>>,
}

impl<F: Field> Decomposition<F> {
    /// Rejects zero columns (degenerate terms).
    pub fn new(factors: Vec<Matrix<F>>) -> Result<Self> {
        let d = Self::new_allow_degenerate(factors)?;
        for (s, f) in d.factors.iter().enumerate() {
            for j in 0..f.cols() {
                if f.column(j).iter().all(F::is_exact_zero) {
                    return Err(Error::Degenerate(format!(
                        "term {j} has a zero vector in mode {}",
                        mode_name(s)
                    )));
                }
            }
        }
        Ok(d)
    }

    /// Like [`Decomposition::new`] but keeps zero columns.
    pub fn new_allow_degenerate(factors: Vec<Matrix<F>>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::DimensionMismatch(format!(
                "a decomposition needs at least 2 modes, got {}",
                factors.len()
            )));
        }
        let r = factors[0].cols();
        if let Some(s) = factors.iter().position(|f| f.cols() != r) {
            return Err(Error::DimensionMismatch(format!(
                "mode {} factor has {} columns, mode A has {r}",
                mode_name(s),
                factors[s].cols()
            )));
        }
        let dims = factors.iter().map(Matrix::rows).collect();
        Ok(Self { dims, factors })
    }

    /// Builds a decomposition from terms, each a list of one vector per mode.
    pub fn from_terms(terms: &[Vec<Vec<F>>]) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::InvalidArgument(
                "decomposition needs at least one term".into(),
            ));
        };
        let order = first.len();
        if terms.iter().any(|t| t.len() != order) {
            return Err(Error::DimensionMismatch(
                "terms with different numbers of modes".into(),
            ));
        }
        let factors = (0..order)
            .map(|s| {
                let cols: Vec<Vec<F>> = terms.iter().map(|t| t[s].clone()).collect();
                Matrix::from_columns(&cols)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Number of terms `r`.
    pub fn len(&self) -> usize {
        self.factors[0].cols()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn factors(&self) -> &[Matrix<F>] {
        &self.factors
    }

    pub fn backend(&self) -> Backend {
        F::BACKEND
    }

    /// The vectors of term `j`, one per mode.
    pub fn term(&self, j: usize) -> Vec<Vec<F>> {
        self.factors.iter().map(|f| f.column(j)).collect()
    }

    pub fn terms(&self) -> Vec<Vec<Vec<F>>> {
        (0..self.len()).map(|j| self.term(j)).collect()
    }
}

/// `A`, `B`, `C`, ... for the first 26 modes, then `mode27`, ...
pub fn mode_name(s: usize) -> String {
    if s < 26 {
        char::from(b'A' + s as u8).to_string()
    } else {
        format!("mode{}", s + 1)
    }
}

/// Sums the rank-one terms.
pub fn compose<F: Field>(d: &Decomposition<F>) -> Tensor<F> {
    let len: usize = d.dims().iter().product();
    let mut data = vec![F::zero(); len];
    for j in 0..d.len() {
        let mut outer = vec![F::one()];
        for f in d.factors() {
            let col = f.column(j);
            outer = outer
                .iter()
                .flat_map(|a| col.iter().map(move |b| a.mul(b)))
                .collect();
        }
        for (acc, v) in data.iter_mut().zip(&outer) {
            *acc = acc.add(v);
        }
    }
    Tensor {
        dims: d.dims().to_vec(),
        data,
    }
}

/// Matrix of `T` with rows indexed by the modes in `row_modes` (in the given
/// order, row-major) and columns by the remaining modes in increasing order.
pub fn flattening<F: Field>(t: &Tensor<F>, row_modes: &[usize]) -> Result<Matrix<F>> {
    let d = t.order();
    let mut seen = vec![false; d];
    for &m in row_modes {
        if m >= d || seen[m] {
            return Err(Error::InvalidArgument(format!(
                "invalid row modes {row_modes:?} for an order-{d} tensor"
            )));
        }
        seen[m] = true;
    }
    if row_modes.is_empty() || row_modes.len() == d {
        return Err(Error::InvalidArgument(
            "row modes must be a nonempty proper subset of the modes".into(),
        ));
    }
    let col_modes: Vec<usize> = (0..d).filter(|m| !seen[*m]).collect();
    let dims = t.dims();
    let rows: usize = row_modes.iter().map(|&m| dims[m]).product();
    let cols: usize = col_modes.iter().map(|&m| dims[m]).product();

    let mut out = vec![F::zero(); rows * cols];
    let mut index = vec![0usize; d];
    for v in t.entries() {
        let r = row_modes.iter().fold(0, |acc, &m| acc * dims[m] + index[m]);
        let c = col_modes.iter().fold(0, |acc, &m| acc * dims[m] + index[m]);
        out[r * cols + c] = v.clone();
        // advance the row-major multi-index
        for m in (0..d).rev() {
            index[m] += 1;
            if index[m] < dims[m] {
                break;
            }
            index[m] = 0;
        }
    }
    Matrix::new(rows, cols, out)
}

/// Ranks of the `d` single-mode flattenings.
pub fn multilinear_ranks<F: Field>(t: &Tensor<F>, tol: Tolerance) -> Vec<usize> {
    (0..t.order())
        .map(|s| {
            flattening(t, &[s])
                .expect("single mode is a proper subset")
                .rank(tol)
        })
        .collect()
}

/// Largest flattening rank; never exceeds the length of any expression of `T`.
pub fn rank_lower_bound<F: Field>(t: &Tensor<F>, tol: Tolerance) -> usize {
    multilinear_ranks(t, tol).into_iter().max().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Certified,
    NotCertified,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "CERTIFIED",
            Verdict::NotCertified => "NOT_CERTIFIED",
        })
    }
}

/// Outcome of the Kruskal test on one decomposition.
///
/// `CERTIFIED` means the composed tensor has rank exactly `r` and the expression
/// is essentially unique. `NOT_CERTIFIED` makes no claim either way.
#[derive(Clone, Debug, PartialEq)]
pub struct UniquenessCertificate {
    pub kruskal_ranks: Vec<usize>,
    pub rank: usize,
    pub order: usize,
    /// `(sum k_s - d + 1) / 2`; the verdict is `rank <= bound`.
    pub bound: BigRational,
    pub verdict: Verdict,
    pub backend: Backend,
    pub tolerance: f64,
    /// First dependent column subset per mode, when the mode's rank was limited by one.
    pub dependent_subsets: Vec<Option<Vec<usize>>>,
    pub diagnostics: Vec<String>,
}

impl UniquenessCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn kruskal_sum(&self) -> usize {
        self.kruskal_ranks.iter().sum()
    }

    /// `2r + d - 1`, the sum of Kruskal ranks the test asks for.
    pub fn required_sum(&self) -> usize {
        2 * self.rank + self.order - 1
    }
}

/// Kruskal bound `(k_1 + ... + k_d - d + 1) / 2` as an exact rational.
pub fn kruskal_bound(kruskal_ranks: &[usize]) -> BigRational {
    let sum: i64 = kruskal_ranks.iter().map(|&k| k as i64).sum();
    let d = kruskal_ranks.len() as i64;
    BigRational::new(BigInt::from(sum - d + 1), BigInt::from(2))
}

/// Applies the Kruskal test `sum_s k_s >= 2r + d - 1` to a decomposition with `d >= 3`.
pub fn certify_uniqueness<F: Field>(
    d: &Decomposition<F>,
    tol: Tolerance,
) -> Result<UniquenessCertificate> {
    if d.order() < 3 {
        return Err(Error::InvalidArgument(
            "two-factor expressions are never essentially unique unless r = 1; \
             certification needs at least 3 modes"
                .into(),
        ));
    }
    let r = d.len();
    let mut kruskal_ranks = Vec::with_capacity(d.order());
    let mut dependent_subsets = Vec::with_capacity(d.order());
    for f in d.factors() {
        let report = kruskal_report(&f.columns(), tol)?;
        kruskal_ranks.push(report.rank);
        dependent_subsets.push(report.dependent_subset);
    }
    let bound = kruskal_bound(&kruskal_ranks);
    let verdict = if BigRational::from_integer(BigInt::from(r)) <= bound {
        Verdict::Certified
    } else {
        Verdict::NotCertified
    };

    let mut diagnostics = Vec::new();
    if verdict == Verdict::NotCertified {
        let sum: usize = kruskal_ranks.iter().sum();
        diagnostics.push(format!(
            "sum of Kruskal ranks {sum} < 2r + d - 1 = {}",
            2 * r + d.order() - 1
        ));
        for (s, (&k, subset)) in kruskal_ranks.iter().zip(&dependent_subsets).enumerate() {
            let Some(subset) = subset else { continue };
            let what = match k {
                0 => "zero column".to_string(),
                1 => format!("proportional columns {subset:?}"),
                _ => format!("dependent columns {subset:?}"),
            };
            diagnostics.push(format!("mode {} Kruskal rank {k} ({what})", mode_name(s)));
        }
    }

    Ok(UniquenessCertificate {
        kruskal_ranks,
        rank: r,
        order: d.order(),
        bound,
        verdict,
        backend: F::BACKEND,
        tolerance: tol.value(),
        dependent_subsets,
        diagnostics,
    })
}

/// Which factor vectors of an expression lie in the supports `A'_s` of the tensor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportReport {
    /// `dim A'_s` per mode, where `A'_s` is the column span of the mode-`s` flattening.
    pub support_dims: Vec<usize>,
    /// `contained[j][s]`: the mode-`s` vector of term `j` lies in `A'_s`.
    pub contained: Vec<Vec<bool>>,
    /// `(term, mode)` pairs whose vector leaves the support.
    pub violations: Vec<(usize, usize)>,
}

impl SupportReport {
    pub fn all_contained(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks each factor vector of `d` against the mode supports of `t`.
///
/// An expression using a vector outside the smallest `A'_1 (x) ... (x) A'_d`
/// containing `T` is necessarily longer than the rank of `T`.
pub fn support_containment_check<F: Field>(
    d: &Decomposition<F>,
    t: &Tensor<F>,
    tol: Tolerance,
) -> Result<SupportReport> {
    if d.dims() != t.dims() {
        return Err(Error::DimensionMismatch(format!(
            "decomposition has shape {:?}, tensor has shape {:?}",
            d.dims(),
            t.dims()
        )));
    }
    if !compose(d).approx_eq(t, tol) {
        return Err(Error::InvalidArgument(
            "the decomposition does not compose to the tensor".into(),
        ));
    }
    let supports = (0..t.order())
        .map(|s| {
            let flat = flattening(t, &[s])?;
            Subspace::span(t.dims()[s], &flat.columns(), tol)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut contained = Vec::with_capacity(d.len());
    let mut violations = Vec::new();
    for j in 0..d.len() {
        let term = d.term(j);
        let row = term
            .iter()
            .zip(&supports)
            .map(|(v, sup)| sup.contains(v, tol))
            .collect::<Result<Vec<_>>>()?;
        violations.extend(
            row.iter()
                .enumerate()
                .filter(|(_, ok)| !**ok)
                .map(|(s, _)| (j, s)),
        );
        contained.push(row);
    }
    Ok(SupportReport {
        support_dims: supports.iter().map(Subspace::dim).collect(),
        contained,
        violations,
    })
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

    fn add(a: &[GaussRat], b: &[GaussRat]) -> Vec<GaussRat> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn neg(a: &[GaussRat]) -> Vec<GaussRat> {
        a.iter().map(|x| -x).collect()
    }

    pub(crate) fn diagonal(a: usize, order: usize) -> Decomposition<GaussRat> {
        let terms: Vec<Vec<Vec<GaussRat>>> = (0..a).map(|i| vec![e(a, i); order]).collect();
        Decomposition::from_terms(&terms).unwrap()
    }

    /// e1(x)e1(x)e2 + e1(x)e2(x)e1 + e2(x)e1(x)e1 in C^2 (x) C^2 (x) C^2.
    fn w_state() -> Tensor<GaussRat> {
        let (a, b) = (e(2, 0), e(2, 1));
        compose(
            &Decomposition::from_terms(&[
                vec![a.clone(), a.clone(), b.clone()],
                vec![a.clone(), b.clone(), a.clone()],
                vec![b, a.clone(), a],
            ])
            .unwrap(),
        )
    }

    #[test]
    fn compose_examples() {
        let single = Decomposition::from_terms(&[vec![e(2, 0), e(2, 0), e(2, 0)]]).unwrap();
        let t = compose(&single);
        assert_eq!(t.get(&[0, 0, 0]), &GaussRat::one());
        assert_eq!(t.entries().iter().filter(|v| !v.is_zero()).count(), 1);

        let t = compose(&diagonal(3, 3));
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let expected = if i == j && j == k { 1 } else { 0 };
                    assert_eq!(t.get(&[i, j, k]), &GaussRat::from_integer(expected));
                }
            }
        }

        let u: Vec<GaussRat> = vec![1.into(), 2.into()];
        let v: Vec<GaussRat> = vec![3.into(), GaussRat::gaussian(0, 1)];
        let w: Vec<GaussRat> = vec![GaussRat::ratio(1, 2), 5.into()];
        let cancel = Decomposition::from_terms(&[
            vec![u.clone(), v.clone(), w.clone()],
            vec![neg(&u), v, w],
        ])
        .unwrap();
        assert!(compose(&cancel).entries().iter().all(GaussRat::is_zero));
    }

    #[test]
    fn flattening_examples() {
        let tol = Tolerance::default();
        let rank_one: Tensor<GaussRat> = compose(
            &Decomposition::from_terms(&[vec![
                vec![1.into(), 2.into()],
                vec![3.into(), 1.into(), 1.into()],
                vec![1.into(), (-1).into()],
            ]])
            .unwrap(),
        );
        for modes in [vec![0], vec![1], vec![2], vec![0, 2], vec![2, 1]] {
            assert_eq!(flattening(&rank_one, &modes).unwrap().rank(tol), 1);
        }

        let diag = compose(&diagonal(3, 3));
        let flat = flattening(&diag, &[1]).unwrap();
        assert_eq!((flat.rows(), flat.cols()), (3, 9));
        assert_eq!(flat.rank(tol), 3);

        let zero = Tensor::<GaussRat>::zeros(vec![2, 3, 2]).unwrap();
        assert_eq!(flattening(&zero, &[0]).unwrap().rank(tol), 0);

        assert!(flattening(&zero, &[]).is_err());
        assert!(flattening(&zero, &[0, 1, 2]).is_err());
        assert!(flattening(&zero, &[0, 0]).is_err());
        assert!(flattening(&zero, &[3]).is_err());
    }

    #[test]
    fn flattening_layout() {
        // T[i,j,k] = 100 i + 10 j + k
        let dims = vec![2, 3, 2];
        let mut data = Vec::new();
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..2 {
                    data.push(GaussRat::from_integer(100 * i + 10 * j + k));
                }
            }
        }
        let t = Tensor::new(dims, data).unwrap();
        let m = flattening(&t, &[1]).unwrap();
        // row j, column (i, k) row-major
        assert_eq!(m.get(2, 3), &GaussRat::from_integer(121));
        let m = flattening(&t, &[2, 0]).unwrap();
        // row (k, i), column j
        assert_eq!(m.get(3, 1), &GaussRat::from_integer(111));
    }

    #[test]
    fn multilinear_ranks_and_lower_bound() {
        let tol = Tolerance::default();
        let diag = compose(&diagonal(3, 3));
        assert_eq!(multilinear_ranks(&diag, tol), vec![3, 3, 3]);
        assert_eq!(rank_lower_bound(&diag, tol), 3);

        let w = w_state();
        assert_eq!(multilinear_ranks(&w, tol), vec![2, 2, 2]);
        assert_eq!(rank_lower_bound(&w, tol), 2);

        let zero = Tensor::<GaussRat>::zeros(vec![2, 2, 2]).unwrap();
        assert_eq!(rank_lower_bound(&zero, tol), 0);
    }

    #[test]
    fn certificate_examples() {
        let tol = Tolerance::default();
        let cert = certify_uniqueness(&diagonal(3, 3), tol).unwrap();
        assert_eq!(cert.kruskal_ranks, vec![3, 3, 3]);
        assert_eq!(cert.bound, BigRational::new(7.into(), 2.into()));
        assert!(cert.is_certified());

        // a1 b1 c1 + a1 b2 c2 + a3 b3 c3
        let nonunique = Decomposition::from_terms(&[
            vec![e(3, 0), e(3, 0), e(3, 0)],
            vec![e(3, 0), e(3, 1), e(3, 1)],
            vec![e(3, 2), e(3, 2), e(3, 2)],
        ])
        .unwrap();
        let cert = certify_uniqueness(&nonunique, tol).unwrap();
        assert_eq!(cert.kruskal_ranks, vec![1, 3, 3]);
        assert_eq!(cert.verdict, Verdict::NotCertified);
        assert!(cert
            .diagnostics
            .iter()
            .any(|m| m.starts_with("mode A Kruskal rank 1")));

        let cols: [Vec<GaussRat>; 2] = [vec![1.into(), 0.into()], vec![1.into(), 1.into()]];
        let four = Decomposition::from_terms(&[vec![cols[0].clone(); 4], vec![cols[1].clone(); 4]])
            .unwrap();
        let cert = certify_uniqueness(&four, tol).unwrap();
        assert_eq!(cert.kruskal_ranks, vec![2, 2, 2, 2]);
        assert_eq!(cert.required_sum(), 7);
        assert!(cert.is_certified());
    }

    #[test]
    fn certificate_rejects_two_modes_and_flags_zero_columns() {
        let tol = Tolerance::default();
        assert!(certify_uniqueness(&diagonal(2, 2), tol).is_err());

        let zero = vec![GaussRat::zero(); 2];
        let factors = vec![
            Matrix::from_columns(&[e(2, 0), zero]).unwrap(),
            Matrix::from_columns(&[e(2, 0), e(2, 1)]).unwrap(),
            Matrix::from_columns(&[e(2, 0), e(2, 1)]).unwrap(),
        ];
        assert!(Decomposition::new(factors.clone()).is_err());
        let degenerate = Decomposition::new_allow_degenerate(factors).unwrap();
        let cert = certify_uniqueness(&degenerate, tol).unwrap();
        assert_eq!(cert.kruskal_ranks[0], 0);
        assert!(!cert.is_certified());
        assert!(cert.diagnostics.iter().any(|m| m.contains("zero column")));
    }

    #[test]
    fn d3_bound_matches_half_sum_minus_one() {
        for ka in 0..6usize {
            for kb in 0..6usize {
                for kc in 0..6usize {
                    let half = BigRational::new(BigInt::from(ka + kb + kc), BigInt::from(2))
                        - BigRational::from_integer(1.into());
                    assert_eq!(kruskal_bound(&[ka, kb, kc]), half);
                }
            }
        }
    }

    #[test]
    fn support_examples() {
        let tol = Tolerance::default();
        let diag = diagonal(3, 3);
        let report = support_containment_check(&diag, &compose(&diag), tol).unwrap();
        assert!(report.all_contained());
        assert_eq!(report.support_dims, vec![3, 3, 3]);

        // T = e1 (x) b (x) c, written with two terms using e3.
        let b: Vec<GaussRat> = vec![1.into(), 2.into()];
        let c: Vec<GaussRat> = vec![3.into(), (-1).into()];
        let t =
            compose(&Decomposition::from_terms(&[vec![e(3, 0), b.clone(), c.clone()]]).unwrap());
        let padded = Decomposition::from_terms(&[
            vec![add(&e(3, 0), &e(3, 2)), b.clone(), c.clone()],
            vec![e(3, 2), b, neg(&c)],
        ])
        .unwrap();
        let report = support_containment_check(&padded, &t, tol).unwrap();
        assert_eq!(report.support_dims, vec![1, 1, 1]);
        assert_eq!(report.violations, vec![(0, 0), (1, 0)]);

        assert!(support_containment_check(&diag, &t, tol).is_err());
        let other = compose(&diagonal(3, 3));
        let wrong = Decomposition::from_terms(&[vec![e(3, 0), e(3, 0), e(3, 0)]]).unwrap();
        assert!(support_containment_check(&wrong, &other, tol).is_err());
    }
}
