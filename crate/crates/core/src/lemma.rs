//! Executable form of the permutation lemma.
//!
//! Let `S = {p_1..p_r}` and `S~ = {q_1..q_r}` be points of `P(W)`, `dim W = n`, with
//! the points of `S` pairwise distinct and `S~` spanning `W`. If every hyperplane
//! `H` containing at least `n - 1` points of `S~` satisfies `#(S ∩ H) >= #(S~ ∩ H)`,
//! then `S = S~`.
//!
//! The hypothesis quantifies over infinitely many hyperplanes. [`LemmaInstance::hypothesis`]
//! decides it through finitely many subspaces: for a hyperplane `H`, put
//! `L = span(S~ ∩ H)`. Then `S~ ∩ H = S~ ∩ L` and `S ∩ L ⊆ S ∩ H`, so the
//! condition for every proper span `L` of points of `S~` implies it for every `H`.
//! Conversely a hyperplane through `L` chosen to miss the finitely many points
//! outside `L` meets `S` in `S ∩ L` and `S~` in `S~ ∩ L`, so a violating `L`
//! yields a violating hyperplane. Every such `L` is spanned by at most `n - 1`
//! independent points of `S~`, so only subsets of that size are enumerated.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kruskal::PointSet;
use crate::numeric::{
    pair, projective_normalize, rank_of_vectors, separating_functional, Backend, Field, Matrix,
    Subspace, Tolerance,
};
use crate::subsets::Combinations;

/// Two equally sized point sets `S` and `S~` in the same projective space.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaInstance<F> {
    s: PointSet<F>,
    s_tilde: PointSet<F>,
}

/// A hyperplane that violates the lemma's hypothesis, with the span it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisViolation<F> {
    /// Indices into `S~` whose span is `span`.
    pub generators: Vec<usize>,
    pub span: Subspace<F>,
    /// Covector whose kernel is `hyperplane`.
    pub covector: Vec<F>,
    pub hyperplane: Subspace<F>,
    pub count_s: usize,
    pub count_s_tilde: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport<F> {
    pub holds: bool,
    /// Distinct proper spans examined.
    pub spans_visited: usize,
    /// Spans with at least `n - 1` points of `S~`.
    pub spans_checked: usize,
    pub violation: Option<HypothesisViolation<F>>,
}

/// Both sides of the two incidence counts around a subspace `L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlagCounts {
    pub r: usize,
    /// `#(S~ ∩ L)`
    pub mu: usize,
    /// Number of planes `M_a = L + q` with `q` a point of `S~` off `L`.
    pub planes: usize,
    /// `sum_a #(S~ ∩ (M_a \ L))`
    pub s_tilde_off_l: usize,
    /// `#(S ∩ L)`
    pub s_in_l: usize,
    /// `sum_a #(S ∩ (M_a \ L))`
    pub s_off_l: usize,
}

impl FlagCounts {
    /// `#(S~ ∩ L) + sum_a #(S~ ∩ (M_a \ L))`, which equals `r`.
    pub fn tilde_total(&self) -> usize {
        self.mu + self.s_tilde_off_l
    }

    /// `#(S ∩ L) + sum_a #(S ∩ (M_a \ L))`, which is at most `r`.
    pub fn s_total(&self) -> usize {
        self.s_in_l + self.s_off_l
    }

    pub fn partition_holds(&self) -> bool {
        self.tilde_total() == self.r
    }

    pub fn covering_holds(&self) -> bool {
        self.s_total() <= self.r
    }
}

fn count_in<F: Field>(points: &[Vec<F>], l: &Subspace<F>, tol: Tolerance) -> Result<usize> {
    let mut n = 0;
    for p in points {
        if l.contains(p, tol)? {
            n += 1;
        }
    }
    Ok(n)
}

fn nonzeros<F: Field>(values: &[F], threshold: f64) -> usize {
    values.iter().filter(|v| !v.negligible(threshold)).count()
}

impl<F: Field> LemmaInstance<F> {
    pub fn new(s: PointSet<F>, s_tilde: PointSet<F>) -> Result<Self> {
        if s.dim() != s_tilde.dim() {
            return Err(Error::DimensionMismatch(format!(
                "S lives in P^{} and S~ in P^{}",
                s.dim() - 1,
                s_tilde.dim() - 1
            )));
        }
        if s.len() != s_tilde.len() {
            return Err(Error::DimensionMismatch(format!(
                "S has {} points and S~ has {}",
                s.len(),
                s_tilde.len()
            )));
        }
        Ok(Self { s, s_tilde })
    }

    /// `dim W`.
    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn s(&self) -> &PointSet<F> {
        &self.s
    }

    pub fn s_tilde(&self) -> &PointSet<F> {
        &self.s_tilde
    }

    /// No two points of `S` coincide.
    pub fn s_distinct(&self, tol: Tolerance) -> bool {
        let p = self.s.points();
        let n = self.dim();
        Combinations::new(p.len(), 2)
            .all(|ij| rank_of_vectors(n, &[&p[ij[0]], &p[ij[1]]], tol) == 2)
    }

    /// `S~` spans `W`.
    pub fn s_tilde_spans(&self, tol: Tolerance) -> bool {
        let cols: Vec<&[F]> = self.s_tilde.points().iter().map(Vec::as_slice).collect();
        rank_of_vectors(self.dim(), &cols, tol) == self.dim()
    }

    /// The hypothesis for one hyperplane `H`: if `H` contains at least `n - 1` points
    /// of `S~` then `#(S ∩ H) >= #(S~ ∩ H)`.
    pub fn hyperplane_ok(&self, h: &Subspace<F>, tol: Tolerance) -> Result<bool> {
        let n = self.dim();
        if h.ambient() != n || h.dim() + 1 != n {
            return Err(Error::InvalidArgument(format!(
                "expected a hyperplane of F^{n}, got a subspace of dimension {} in F^{}",
                h.dim(),
                h.ambient()
            )));
        }
        let t = count_in(self.s_tilde.points(), h, tol)?;
        if t + 1 < n {
            return Ok(true);
        }
        Ok(count_in(self.s.points(), h, tol)? >= t)
    }

    /// Decides the hypothesis over all hyperplanes (exact backend only).
    pub fn hypothesis(&self) -> Result<HypothesisReport<F>> {
        if F::BACKEND != Backend::Exact {
            return Err(Error::ExactOnly("lemma_hypothesis"));
        }
        let tol = Tolerance::default();
        if !self.s_tilde_spans(tol) {
            return Err(Error::Precondition(
                "S~ does not span W; the lemma assumes it does".into(),
            ));
        }
        let n = self.dim();
        let tilde = self.s_tilde.points();
        let mut seen: Vec<Subspace<F>> = Vec::new();
        let mut checked = 0;
        for k in 1..n {
            for subset in Combinations::new(tilde.len(), k) {
                let gens: Vec<Vec<F>> = subset.iter().map(|&i| tilde[i].clone()).collect();
                let l = Subspace::span(n, &gens, tol)?;
                if l.dim() != k || seen.contains(&l) {
                    continue;
                }
                seen.push(l.clone());
                let t = count_in(tilde, &l, tol)?;
                if t + 1 < n {
                    continue;
                }
                checked += 1;
                let s = count_in(self.s.points(), &l, tol)?;
                if s >= t {
                    continue;
                }
                let avoid: Vec<Vec<F>> = self
                    .s
                    .points()
                    .iter()
                    .chain(tilde)
                    .filter(|p| !l.contains(p, tol).unwrap_or(true))
                    .cloned()
                    .collect();
                let covector = separating_functional(&l, &avoid)?;
                let hyperplane = Matrix::new(1, n, covector.clone())?.null_space(tol);
                return Ok(HypothesisReport {
                    holds: false,
                    spans_visited: seen.len(),
                    spans_checked: checked,
                    violation: Some(HypothesisViolation {
                        generators: subset,
                        span: l,
                        covector,
                        hyperplane,
                        count_s: s,
                        count_s_tilde: t,
                    }),
                });
            }
        }
        Ok(HypothesisReport {
            holds: true,
            spans_visited: seen.len(),
            spans_checked: checked,
            violation: None,
        })
    }

    /// Coordinate form of the hypothesis for one covector `x`: with `M`, `M~` the
    /// matrices whose columns are the points, if `M~^T x` has at most
    /// `r - rank(M~) + 1` nonzero entries then `M^T x` has at most as many.
    pub fn matrix_form_ok(&self, x: &[F], tol: Tolerance) -> Result<bool> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "covector has length {}, expected {n}",
                x.len()
            )));
        }
        if x.iter().all(F::is_exact_zero) {
            return Err(Error::InvalidArgument("covector must be nonzero".into()));
        }
        let m = Matrix::from_columns(self.s.points())?;
        let mt = Matrix::from_columns(self.s_tilde.points())?;
        let scale = |pts: &[Vec<F>]| {
            let xn = x.iter().map(F::magnitude).fold(0.0, f64::max);
            let pn = pts.iter().flatten().map(F::magnitude).fold(0.0, f64::max);
            tol.value() * xn * pn * n as f64
        };
        let nz_tilde = nonzeros(&mt.transpose_apply(x)?, scale(self.s_tilde.points()));
        let nz = nonzeros(&m.transpose_apply(x)?, scale(self.s.points()));
        let r = self.len();
        if nz_tilde + mt.rank(tol) <= r + 1 {
            return Ok(nz <= nz_tilde);
        }
        Ok(true)
    }

    /// Whether `S` and `S~` are the same multiset of projective points.
    pub fn conclusion(&self, tol: Tolerance) -> bool {
        let canon = |ps: &PointSet<F>| -> Vec<Vec<F>> {
            ps.points()
                .iter()
                .filter_map(|p| projective_normalize(p, tol).map(|(c, _)| c))
                .collect()
        };
        let (mut a, mut b) = (canon(&self.s), canon(&self.s_tilde));
        if a.len() != b.len() {
            return false;
        }
        match F::BACKEND {
            Backend::Exact => {
                let key = |x: &Vec<F>, y: &Vec<F>| {
                    x.iter()
                        .zip(y)
                        .map(|(p, q)| p.lex_cmp(q))
                        .find(|o| o.is_ne())
                        .unwrap_or(std::cmp::Ordering::Equal)
                };
                a.sort_by(key);
                b.sort_by(key);
                a == b
            }
            Backend::Float => {
                let threshold = 10.0 * tol.value();
                let mut used = vec![false; b.len()];
                a.iter().all(|p| {
                    let hit = (0..b.len()).find(|&j| {
                        !used[j]
                            && p.iter()
                                .zip(&b[j])
                                .all(|(x, y)| x.sub(y).magnitude() <= threshold)
                    });
                    hit.map(|j| used[j] = true).is_some()
                })
            }
        }
    }

    /// Incidence counts of `S` and `S~` on the planes `M_a = L + q` through `L`.
    ///
    /// Requires `L` proper, spanned by the points of `S~` it contains, with
    /// `#(S~ ∩ L) >= dim L`. Every point of `S~` off `L` lies on exactly one
    /// `M_a`; every point of `S` off `L` lies on at most one.
    pub fn flag_counts(&self, l: &Subspace<F>) -> Result<FlagCounts> {
        if F::BACKEND != Backend::Exact {
            return Err(Error::ExactOnly("flag_partition_counts"));
        }
        let tol = Tolerance::default();
        let n = self.dim();
        if l.ambient() != n {
            return Err(Error::DimensionMismatch(format!(
                "L lives in F^{}, expected F^{n}",
                l.ambient()
            )));
        }
        if l.dim() >= n {
            return Err(Error::Precondition("L must be a proper subspace".into()));
        }
        let tilde = self.s_tilde.points();
        let inside: Vec<bool> = tilde
            .iter()
            .map(|q| l.contains(q, tol))
            .collect::<Result<_>>()?;
        let on_l: Vec<Vec<F>> = tilde
            .iter()
            .zip(&inside)
            .filter(|(_, &b)| b)
            .map(|(q, _)| q.clone())
            .collect();
        let mu = on_l.len();
        if Subspace::span(n, &on_l, tol)?.dim() != l.dim() {
            return Err(Error::Precondition(
                "L is not spanned by points of S~".into(),
            ));
        }
        if mu < l.dim() {
            return Err(Error::Precondition(format!(
                "L of projective dimension {} holds only {mu} points of S~",
                l.dim() as isize - 1
            )));
        }

        let mut planes: Vec<Subspace<F>> = Vec::new();
        for (q, _) in tilde.iter().zip(&inside).filter(|(_, &b)| !b) {
            let m = l.join(&Subspace::span(n, std::slice::from_ref(q), tol)?, tol)?;
            if !planes.contains(&m) {
                planes.push(m);
            }
        }
        let mut qualifying = Vec::new();
        for m in planes {
            if count_in(tilde, &m, tol)? > mu {
                qualifying.push(m);
            }
        }
        let off_l = |points: &[Vec<F>]| -> Result<usize> {
            let mut total = 0;
            for m in &qualifying {
                for p in points {
                    if m.contains(p, tol)? && !l.contains(p, tol)? {
                        total += 1;
                    }
                }
            }
            Ok(total)
        };
        Ok(FlagCounts {
            r: self.len(),
            mu,
            planes: qualifying.len(),
            s_tilde_off_l: off_l(tilde)?,
            s_in_l: count_in(self.s.points(), l, tol)?,
            s_off_l: off_l(self.s.points())?,
        })
    }
}

/// Evaluates a covector on each point.
pub fn evaluate<F: Field>(x: &[F], points: &[Vec<F>]) -> Vec<F> {
    points.iter().map(|p| pair(x, p)).collect()
}
