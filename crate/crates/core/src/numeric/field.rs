use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::gauss::GaussRat;
use crate::error::{Error, Result};

/// Which arithmetic a value lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(Error::InvalidArgument(format!(
                "unknown backend {other:?} (expected \"exact\" or \"float\")"
            ))),
        }
    }
}

/// Relative threshold for float rank decisions. Ignored by the exact backend.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: f64 = 1e-9;

    pub fn new(tau: f64) -> Result<Self> {
        if tau.is_nan() || tau < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be a nonnegative number, got {tau}"
            )));
        }
        Ok(Self(tau))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self(Self::DEFAULT)
    }
}

/// Scalar field operations shared by both backends.
///
/// Linear algebra in this crate is generic over `Field`; the backend is a
/// type-level choice, so values of different backends cannot meet inside one
/// computation.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Exact conversion of a finite double.
    fn from_f64(v: f64) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Panics when `rhs` is exactly zero.
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;

    /// Absolute value as a double (approximate for the exact backend).
    fn magnitude(&self) -> f64;
    fn is_exact_zero(&self) -> bool;
    /// A total order (real part first) used only for deterministic sorting.
    fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering;

    fn to_scalar(&self) -> Scalar;
    fn from_scalar(s: &Scalar) -> Result<Self>;

    /// Rank of a nonempty dense row-major block.
    fn rank_block(rows: usize, cols: usize, data: &[Self], tol: Tolerance) -> usize;

    /// True when `self` should be treated as zero given an absolute threshold.
    /// The exact backend ignores the threshold.
    fn negligible(&self, threshold: f64) -> bool {
        match Self::BACKEND {
            Backend::Exact => self.is_exact_zero(),
            Backend::Float => self.magnitude() <= threshold,
        }
    }
}

impl Field for GaussRat {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        GaussRat::zero()
    }
    fn one() -> Self {
        GaussRat::one()
    }
    fn from_i64(v: i64) -> Self {
        GaussRat::from_integer(v)
    }
    fn from_f64(v: f64) -> Self {
        GaussRat::real(num_rational::BigRational::from_float(v).expect("finite double"))
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        GaussRat::conj(self)
    }
    fn magnitude(&self) -> f64 {
        self.to_complex64().norm()
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.cmp(other)
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Exact(self.clone())
    }
    fn from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Exact(q) => Ok(q.clone()),
            Scalar::Float(_) => Err(Error::BackendMismatch {
                left: "exact",
                right: "float",
            }),
        }
    }
    fn rank_block(rows: usize, cols: usize, data: &[Self], _tol: Tolerance) -> usize {
        super::matrix::bareiss_rank(rows, cols, data)
    }
}

impl Field for Complex64 {
    const BACKEND: Backend = Backend::Float;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by exact zero");
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.re
            .total_cmp(&other.re)
            .then(self.im.total_cmp(&other.im))
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Float(*self)
    }
    fn from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Float(z) => Ok(*z),
            Scalar::Exact(_) => Err(Error::BackendMismatch {
                left: "float",
                right: "exact",
            }),
        }
    }
    fn rank_block(rows: usize, cols: usize, data: &[Self], tol: Tolerance) -> usize {
        super::matrix::pivoted_rank(rows, cols, data, tol)
    }
}

/// A backend-tagged field element.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(GaussRat),
    Float(Complex64),
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float(_) => Backend::Float,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(z) => z.is_zero(),
        }
    }

    fn binary(
        &self,
        rhs: &Scalar,
        exact: impl Fn(&GaussRat, &GaussRat) -> GaussRat,
        float: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(exact(a, b))),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(float(*a, *b))),
            (a, b) => Err(Error::BackendMismatch {
                left: a.backend().name(),
                right: b.backend().name(),
            }),
        }
    }

    pub fn checked_add(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binary(rhs, |a, b| a + b, |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binary(rhs, |a, b| a - b, |a, b| a - b)
    }

    pub fn checked_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binary(rhs, |a, b| a * b, |a, b| a * b)
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::InvalidArgument("division by zero".into()));
        }
        self.binary(rhs, |a, b| a / b, |a, b| a / b)
    }

    /// Converts an exact value to its nearest double; float values pass through.
    pub fn to_float(&self) -> Complex64 {
        match self {
            Scalar::Exact(q) => q.to_complex64(),
            Scalar::Float(z) => *z,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Float(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Scalar::Float(z) => write!(f, "{}{:+} i", z.re, z.im),
        }
    }
}
