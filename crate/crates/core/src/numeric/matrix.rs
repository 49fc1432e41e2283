use num_bigint::BigInt;
use num_traits::One;

use super::field::{Backend, Field, Scalar, Tolerance};
use super::gauss::{GaussInt, GaussRat};
use super::subspace::Subspace;
use crate::error::{Error, Result};

/// Dense row-major matrix over one backend.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from backend-tagged scalars; all entries must share the backend `F`.
    pub fn from_scalars(rows: usize, cols: usize, entries: &[Scalar]) -> Result<Self> {
        let data = entries
            .iter()
            .map(F::from_scalar)
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = F::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<F>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("columns of unequal length".into()));
        }
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            data.extend(columns.iter().map(|c| c[i].clone()));
        }
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn backend(&self) -> Backend {
        F::BACKEND
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            data.extend((0..self.rows).map(|i| self.get(i, j).clone()));
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_exact_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j).add(&a.mul(rhs.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// `M^T x` for a vector `x` of length `rows`.
    pub fn transpose_apply(&self, x: &[F]) -> Result<Vec<F>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "covector has length {}, matrix has {} rows",
                x.len(),
                self.rows
            )));
        }
        Ok((0..self.cols)
            .map(|j| (0..self.rows).fold(F::zero(), |acc, i| acc.add(&x[i].mul(self.get(i, j)))))
            .collect())
    }

    pub fn rank(&self, tol: Tolerance) -> usize {
        rank_dense(self.rows, self.cols, &self.data, tol)
    }

    /// Basis of the right kernel `{x : M x = 0}`.
    pub fn null_space(&self, tol: Tolerance) -> Subspace<F> {
        let ech = Echelon::reduce(self.rows, self.cols, self.data.clone(), tol);
        Subspace::from_independent(self.cols, ech.kernel_basis())
    }
}

/// Rank of a dense row-major `rows x cols` block. Empty blocks have rank 0.
pub(crate) fn rank_dense<F: Field>(rows: usize, cols: usize, data: &[F], tol: Tolerance) -> usize {
    if rows == 0 || cols == 0 {
        return 0;
    }
    F::rank_block(rows, cols, data, tol)
}

/// Fraction-free elimination over `Z[i]` after clearing row denominators.
pub(crate) fn bareiss_rank(rows: usize, cols: usize, data: &[GaussRat]) -> usize {
    let mut a: Vec<Vec<GaussInt>> = (0..rows)
        .map(|i| {
            let row = &data[i * cols..(i + 1) * cols];
            let scale = row
                .iter()
                .fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom_lcm()));
            row.iter().map(|q| q.scaled_to_gauss_int(&scale)).collect()
        })
        .collect();

    let mut prev = GaussInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let pivot = (r..rows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].bits());
        let Some(p) = pivot else { continue };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let prow = &top[r];
        for row in rest.iter_mut() {
            for j in c + 1..cols {
                let v = prow[c].mul(&row[j]).sub(&row[c].mul(&prow[j]));
                row[j] = v.div_exact(&prev);
            }
            row[c] = GaussInt {
                re: 0.into(),
                im: 0.into(),
            };
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Complete-pivoting elimination; a pivot counts when it exceeds `tol * max|a_ij|`.
pub(crate) fn pivoted_rank<F: Field>(
    rows: usize,
    cols: usize,
    data: &[F],
    tol: Tolerance,
) -> usize {
    let mut a = data.to_vec();
    let scale = a.iter().map(F::magnitude).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let threshold = tol.value() * scale;
    let mut row_idx: Vec<usize> = (0..rows).collect();
    let mut col_idx: Vec<usize> = (0..cols).collect();
    let at = |a: &Vec<F>, i: usize, j: usize| a[i * cols + j].clone();
    let mut r = 0;
    while r < rows.min(cols) {
        let mut best = (r, r, -1.0);
        for (ii, &i) in row_idx.iter().enumerate().skip(r) {
            for (jj, &j) in col_idx.iter().enumerate().skip(r) {
                let m = a[i * cols + j].magnitude();
                if m > best.2 {
                    best = (ii, jj, m);
                }
            }
        }
        if best.2 <= threshold {
            break;
        }
        row_idx.swap(r, best.0);
        col_idx.swap(r, best.1);
        let (pi, pj) = (row_idx[r], col_idx[r]);
        let pivot = at(&a, pi, pj);
        for &i in &row_idx[r + 1..] {
            let f = at(&a, i, pj).div(&pivot);
            if f.is_exact_zero() {
                continue;
            }
            for &j in &col_idx[r..] {
                let v = at(&a, i, j).sub(&f.mul(&at(&a, pi, j)));
                a[i * cols + j] = v;
            }
        }
        r += 1;
    }
    r
}

/// Reduced row echelon form.
pub(crate) struct Echelon<F> {
    pub cols: usize,
    pub data: Vec<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Echelon<F> {
    pub fn reduce(rows: usize, cols: usize, mut data: Vec<F>, tol: Tolerance) -> Self {
        let scale = data.iter().map(F::magnitude).fold(0.0, f64::max);
        let threshold = tol.value() * scale;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let candidate = match F::BACKEND {
                Backend::Exact => (r..rows).find(|&i| !data[i * cols + c].is_exact_zero()),
                Backend::Float => (r..rows)
                    .filter(|&i| !data[i * cols + c].negligible(threshold))
                    .max_by(|&x, &y| {
                        data[x * cols + c]
                            .magnitude()
                            .total_cmp(&data[y * cols + c].magnitude())
                    }),
            };
            let Some(p) = candidate else {
                if F::BACKEND == Backend::Float {
                    for i in r..rows {
                        data[i * cols + c] = F::zero();
                    }
                }
                continue;
            };
            for j in 0..cols {
                data.swap(r * cols + j, p * cols + j);
            }
            let inv = F::one().div(&data[r * cols + c]);
            for j in c..cols {
                data[r * cols + j] = data[r * cols + j].mul(&inv);
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = data[i * cols + c].clone();
                if f.is_exact_zero() {
                    continue;
                }
                for j in c..cols {
                    let v = data[i * cols + j].sub(&f.mul(&data[r * cols + j]));
                    data[i * cols + j] = v;
                }
                data[i * cols + c] = F::zero();
            }
            pivots.push(c);
            r += 1;
        }
        Self { cols, data, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Nonzero rows of the reduced form.
    pub fn row_basis(&self) -> Vec<Vec<F>> {
        (0..self.rank())
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        let free = (0..self.cols).filter(|c| !self.pivots.contains(c));
        free.map(|f| {
            let mut v = vec![F::zero(); self.cols];
            v[f] = F::one();
            for (i, &p) in self.pivots.iter().enumerate() {
                v[p] = self.data[i * self.cols + f].neg();
            }
            v
        })
        .collect()
    }
}
