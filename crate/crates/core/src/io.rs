//! JSON instance files.
//!
//! Every document carries a header
//! `{"format_version": "1", "backend": "exact"|"float", "kind": ...}` followed by
//! the payload for its kind:
//!
//! | kind            | payload                                                        |
//! |-----------------|----------------------------------------------------------------|
//! | `tensor`        | `dims: [n_1, ...]`, `entries: [...]` (row-major)               |
//! | `decomposition` | `dims`, `rank: r`, `factors: [[col_1, ..., col_r], ...]` per mode |
//! | `pointset`      | `dim: n`, `points: [[...], ...]`                               |
//! | `matrix`        | `rows`, `cols`, `entries: [...]` (row-major)                   |
//!
//! Exact scalars are strings `"a/b"`, `"a/b+c/d i"` or `"a/b-c/d i"`; float scalars
//! are `[re, im]` pairs written with shortest round-trip formatting.

use serde::Serialize;
use serde_json::{json, Value};

use crate::cp::{Decomposition, Tensor};
use crate::error::{Error, Result};
use crate::kruskal::PointSet;
use crate::numeric::{Backend, Complex64, Field, GaussRat, Matrix, Scalar};

pub const FORMAT_VERSION: &str = "1";

/// A parsed document for one backend.
#[derive(Clone, Debug, PartialEq)]
pub enum Object<F> {
    Tensor(Tensor<F>),
    Decomposition(Decomposition<F>),
    PointSet(PointSet<F>),
    Matrix(Matrix<F>),
}

impl<F> Object<F> {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Tensor(_) => "tensor",
            Object::Decomposition(_) => "decomposition",
            Object::PointSet(_) => "pointset",
            Object::Matrix(_) => "matrix",
        }
    }
}

/// A parsed document of either backend.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Exact(Object<GaussRat>),
    Float(Object<Complex64>),
}

impl Instance {
    pub fn backend(&self) -> Backend {
        match self {
            Instance::Exact(_) => Backend::Exact,
            Instance::Float(_) => Backend::Float,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Exact(o) => o.kind(),
            Instance::Float(o) => o.kind(),
        }
    }

    /// Converts exact values to the nearest doubles; float instances are returned as is.
    pub fn into_float(self) -> Instance {
        match self {
            Instance::Exact(o) => Instance::Float(to_float(&o)),
            f => f,
        }
    }

    pub fn to_document(&self) -> String {
        match self {
            Instance::Exact(o) => to_document(o),
            Instance::Float(o) => to_document(o),
        }
    }
}

fn err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.into(),
        message: message.into(),
    }
}

fn field<'a>(doc: &'a Value, name: &str) -> Result<&'a Value> {
    doc.get(name).ok_or_else(|| err(name, "missing field"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| err(path, "expected a string"))
}

fn as_count(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| err(path, "expected a nonnegative integer"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn counts(v: &Value, path: &str) -> Result<Vec<usize>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_count(x, &format!("{path}[{i}]")))
        .collect()
}

fn scalar(v: &Value, backend: Backend, path: &str) -> Result<Scalar> {
    match backend {
        Backend::Exact => {
            let text = v
                .as_str()
                .ok_or_else(|| err(path, "exact scalars are strings like \"1/2+3/4 i\""))?;
            let q: GaussRat = text.parse().map_err(|e: Error| err(path, e.to_string()))?;
            Ok(Scalar::Exact(q))
        }
        Backend::Float => {
            let pair = v
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| err(path, "float scalars are [re, im] pairs"))?;
            let part = |i: usize| {
                pair[i]
                    .as_f64()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| err(format!("{path}[{i}]"), "expected a finite number"))
            };
            Ok(Scalar::Float(Complex64::new(part(0)?, part(1)?)))
        }
    }
}

fn scalars<F: Field>(v: &Value, path: &str) -> Result<Vec<F>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let p = format!("{path}[{i}]");
            F::from_scalar(&scalar(x, F::BACKEND, &p)?)
        })
        .collect()
}

fn vectors<F: Field>(v: &Value, path: &str, len: usize) -> Result<Vec<Vec<F>>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let p = format!("{path}[{i}]");
            let vec = scalars::<F>(x, &p)?;
            if vec.len() != len {
                return Err(err(p, format!("expected {len} entries, got {}", vec.len())));
            }
            Ok(vec)
        })
        .collect()
}

fn wrap<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Format { .. } => e,
        other => err(path, other.to_string()),
    })
}

fn parse_object<F: Field>(doc: &Value, kind: &str) -> Result<Object<F>> {
    match kind {
        "tensor" => {
            let dims = counts(field(doc, "dims")?, "dims")?;
            let entries = scalars::<F>(field(doc, "entries")?, "entries")?;
            let expected: usize = dims.iter().product();
            if entries.len() != expected {
                return Err(err(
                    "entries",
                    format!(
                        "tensor of dims {dims:?} needs {expected} entries, got {}",
                        entries.len()
                    ),
                ));
            }
            Ok(Object::Tensor(wrap("dims", Tensor::new(dims, entries))?))
        }
        "decomposition" => {
            let dims = counts(field(doc, "dims")?, "dims")?;
            let rank = as_count(field(doc, "rank")?, "rank")?;
            let factors = as_array(field(doc, "factors")?, "factors")?;
            if factors.len() != dims.len() {
                return Err(err(
                    "factors",
                    format!("{} factors for {} modes", factors.len(), dims.len()),
                ));
            }
            let mut mats = Vec::with_capacity(dims.len());
            for (s, (f, &n)) in factors.iter().zip(&dims).enumerate() {
                let path = format!("factors[{s}]");
                let cols = vectors::<F>(f, &path, n)?;
                if cols.len() != rank {
                    return Err(err(
                        path,
                        format!("expected {rank} columns, got {}", cols.len()),
                    ));
                }
                mats.push(wrap(&path, Matrix::from_columns(&cols))?);
            }
            Ok(Object::Decomposition(wrap(
                "factors",
                Decomposition::new(mats),
            )?))
        }
        "pointset" => {
            let dim = as_count(field(doc, "dim")?, "dim")?;
            let points = vectors::<F>(field(doc, "points")?, "points", dim)?;
            Ok(Object::PointSet(wrap(
                "points",
                PointSet::new(dim, points),
            )?))
        }
        "matrix" => {
            let rows = as_count(field(doc, "rows")?, "rows")?;
            let cols = as_count(field(doc, "cols")?, "cols")?;
            let entries = scalars::<F>(field(doc, "entries")?, "entries")?;
            Ok(Object::Matrix(wrap(
                "entries",
                Matrix::new(rows, cols, entries),
            )?))
        }
        other => Err(err("kind", format!("unknown kind {other:?}"))),
    }
}

/// Parses and validates a document.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: Value = serde_json::from_str(text).map_err(|e| {
        err(
            format!("line {} column {}", e.line(), e.column()),
            format!("invalid JSON: {e}"),
        )
    })?;
    if !doc.is_object() {
        return Err(err("$", "expected a JSON object"));
    }
    let version = as_str(field(&doc, "format_version")?, "format_version")?;
    if version != FORMAT_VERSION {
        return Err(err(
            "format_version",
            format!("unsupported format version {version:?} (expected \"{FORMAT_VERSION}\")"),
        ));
    }
    let backend: Backend = as_str(field(&doc, "backend")?, "backend")?
        .parse()
        .map_err(|e: Error| err("backend", e.to_string()))?;
    let kind = as_str(field(&doc, "kind")?, "kind")?;
    match backend {
        Backend::Exact => Ok(Instance::Exact(parse_object(&doc, kind)?)),
        Backend::Float => Ok(Instance::Float(parse_object(&doc, kind)?)),
    }
}

/// A scalar in document form.
pub fn encode<F: Field>(v: &F) -> Value {
    match v.to_scalar() {
        Scalar::Exact(q) => Value::String(q.to_string()),
        Scalar::Float(z) => json!([z.re, z.im]),
    }
}

pub fn encode_all<F: Field>(vs: &[F]) -> Vec<Value> {
    vs.iter().map(encode).collect()
}

#[derive(Serialize)]
struct Header {
    format_version: &'static str,
    backend: Backend,
    kind: &'static str,
}

/// Serializes to a pretty-printed document (trailing newline included).
pub fn to_document<F: Field>(obj: &Object<F>) -> String {
    let header = Header {
        format_version: FORMAT_VERSION,
        backend: F::BACKEND,
        kind: obj.kind(),
    };
    let value = match obj {
        Object::Tensor(t) => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(flatten)]
                header: Header,
                dims: &'a [usize],
                entries: Vec<Value>,
            }
            serde_json::to_value(Doc {
                header,
                dims: t.dims(),
                entries: encode_all(t.entries()),
            })
        }
        Object::Decomposition(d) => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(flatten)]
                header: Header,
                dims: &'a [usize],
                rank: usize,
                factors: Vec<Vec<Vec<Value>>>,
            }
            serde_json::to_value(Doc {
                header,
                dims: d.dims(),
                rank: d.len(),
                factors: d
                    .factors()
                    .iter()
                    .map(|f| f.columns().iter().map(|c| encode_all(c)).collect())
                    .collect(),
            })
        }
        Object::PointSet(p) => {
            #[derive(Serialize)]
            struct Doc {
                #[serde(flatten)]
                header: Header,
                dim: usize,
                points: Vec<Vec<Value>>,
            }
            serde_json::to_value(Doc {
                header,
                dim: p.dim(),
                points: p.points().iter().map(|v| encode_all(v)).collect(),
            })
        }
        Object::Matrix(m) => {
            #[derive(Serialize)]
            struct Doc {
                #[serde(flatten)]
                header: Header,
                rows: usize,
                cols: usize,
                entries: Vec<Value>,
            }
            serde_json::to_value(Doc {
                header,
                rows: m.rows(),
                cols: m.cols(),
                entries: encode_all(m.entries()),
            })
        }
    }
    .expect("documents serialize");
    let mut out = compact_leaves(&value);
    out.push('\n');
    out
}

/// Pretty-prints objects and outer arrays but keeps arrays of scalars on one line.
fn compact_leaves(v: &Value) -> String {
    fn is_leaf_array(v: &Value) -> bool {
        v.as_array().is_some_and(|a| {
            a.iter().all(|x| {
                !x.is_object()
                    && x.as_array()
                        .is_none_or(|inner| inner.iter().all(Value::is_number))
            })
        })
    }
    fn go(v: &Value, indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent + 1);
        match v {
            Value::Object(map) => {
                out.push_str("{\n");
                for (i, (k, x)) in map.iter().enumerate() {
                    out.push_str(&pad);
                    out.push_str(&Value::String(k.clone()).to_string());
                    out.push_str(": ");
                    go(x, indent + 1, out);
                    if i + 1 < map.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
            Value::Array(items) if !is_leaf_array(v) => {
                out.push_str("[\n");
                for (i, x) in items.iter().enumerate() {
                    out.push_str(&pad);
                    go(x, indent + 1, out);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            }
            other => {
                let text = serde_json::to_string(other).expect("values serialize");
                out.push_str(&text.replace(",", ", "));
            }
        }
    }
    let mut out = String::new();
    go(v, 0, &mut out);
    out
}

/// Converts an exact object to doubles.
pub fn to_float(obj: &Object<GaussRat>) -> Object<Complex64> {
    let conv = |xs: &[GaussRat]| xs.iter().map(GaussRat::to_complex64).collect::<Vec<_>>();
    let mat = |m: &Matrix<GaussRat>| {
        Matrix::new(m.rows(), m.cols(), conv(m.entries())).expect("same shape")
    };
    match obj {
        Object::Tensor(t) => {
            Object::Tensor(Tensor::new(t.dims().to_vec(), conv(t.entries())).expect("same shape"))
        }
        Object::Decomposition(d) => Object::Decomposition(
            Decomposition::new_allow_degenerate(d.factors().iter().map(mat).collect())
                .expect("same shape"),
        ),
        Object::PointSet(p) => Object::PointSet(
            PointSet::new(p.dim(), p.points().iter().map(|v| conv(v)).collect())
                .expect("nonzero points stay nonzero"),
        ),
        Object::Matrix(m) => Object::Matrix(mat(m)),
    }
}
