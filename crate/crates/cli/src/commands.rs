use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use krusk_core::gen;
use krusk_core::io::{self, Instance, Object};
use krusk_core::kruskal::kruskal_report;
use krusk_core::numeric::sylvester_ranks;
use krusk_core::{
    certify_uniqueness, compose, flattening, match_decompositions, scramble, Backend,
    Decomposition, EquivalenceWitness, Field, LemmaInstance, Matrix, PointSet, Subspace, Tensor,
    Tolerance, UniquenessCertificate,
};

use crate::report::{tuple, Outcome};

/// Settings shared by every subcommand.
pub struct Settings {
    pub backend: Option<Backend>,
    pub tol: Tolerance,
    pub seed: u64,
}

macro_rules! on_backend {
    ($inst:expr, $obj:ident => $body:expr) => {
        match $inst {
            Instance::Exact($obj) => $body,
            Instance::Float($obj) => $body,
        }
    };
}

macro_rules! on_pair {
    ($a:expr, $b:expr, ($x:ident, $y:ident) => $body:expr) => {
        match ($a, $b) {
            (Instance::Exact($x), Instance::Exact($y)) => $body,
            (Instance::Float($x), Instance::Float($y)) => $body,
            _ => unreachable!("backends were unified on load"),
        }
    };
}

pub fn read(path: &Path) -> Result<Instance> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    io::parse_instance(&text).with_context(|| format!("{}", path.display()))
}

fn load(path: &Path, settings: &Settings) -> Result<Instance> {
    let inst = read(path)?;
    match (settings.backend, inst.backend()) {
        (None, _) => Ok(inst),
        (Some(Backend::Float), _) => Ok(inst.into_float()),
        (Some(Backend::Exact), Backend::Exact) => Ok(inst),
        (Some(Backend::Exact), Backend::Float) => bail!(
            "{}: a float document cannot be read with the exact backend",
            path.display()
        ),
    }
}

/// Loads several files onto one backend. Without `--backend` they must agree.
fn load_all(paths: &[&Path], settings: &Settings) -> Result<Vec<Instance>> {
    let insts = paths
        .iter()
        .map(|p| load(p, settings))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = insts.iter().position(|x| x.backend() != insts[0].backend()) {
        bail!(
            "{} is {} but {} is {}; pass --backend float to compare them",
            paths[0].display(),
            insts[0].backend(),
            paths[i].display(),
            insts[i].backend()
        );
    }
    Ok(insts)
}

fn wrong_kind(path: &Path, want: &str, got: &str) -> anyhow::Error {
    anyhow!("{}: expected a {want} document, got {got}", path.display())
}

fn decomposition<F>(obj: Object<F>, path: &Path) -> Result<Decomposition<F>> {
    match obj {
        Object::Decomposition(d) => Ok(d),
        other => Err(wrong_kind(path, "decomposition", other.kind())),
    }
}

fn tensor<F>(obj: Object<F>, path: &Path) -> Result<Tensor<F>> {
    match obj {
        Object::Tensor(t) => Ok(t),
        other => Err(wrong_kind(path, "tensor", other.kind())),
    }
}

fn pointset<F>(obj: Object<F>, path: &Path) -> Result<PointSet<F>> {
    match obj {
        Object::PointSet(p) => Ok(p),
        other => Err(wrong_kind(path, "pointset", other.kind())),
    }
}

fn matrix<F>(obj: Object<F>, path: &Path) -> Result<Matrix<F>> {
    match obj {
        Object::Matrix(m) => Ok(m),
        other => Err(wrong_kind(path, "matrix", other.kind())),
    }
}

fn vectors_json<F: Field>(vs: &[Vec<F>]) -> Value {
    vs.iter().map(|v| io::encode_all(v)).collect()
}

/// Writes a document to `output`, or prints it when no path is given.
fn emit<F: Field>(obj: &Object<F>, output: Option<&Path>) -> Result<Outcome> {
    let doc = io::to_document(obj);
    match output {
        Some(path) => {
            fs::write(path, &doc).with_context(|| format!("cannot write {}", path.display()))?;
            Ok(Outcome::new(
                true,
                json!({ "output": path.display().to_string(), "kind": obj.kind(), "backend": F::BACKEND }),
                format!("wrote {} ({} {})", path.display(), F::BACKEND, obj.kind()),
            ))
        }
        None => Ok(Outcome::document(doc)),
    }
}

pub fn krank(path: &Path, settings: &Settings) -> Result<Outcome> {
    on_backend!(load(path, settings)?, obj => {
        let ps = pointset(obj, path)?;
        let rep = kruskal_report(ps.points(), settings.tol)?;
        let mut text = format!("Kruskal rank {} ({} points in dimension {})", rep.rank, ps.len(), ps.dim());
        if let Some(sub) = &rep.dependent_subset {
            text.push_str(&format!("\ndependent subset {sub:?}"));
        }
        Ok(Outcome::new(
            true,
            json!({
                "backend": ps.backend(),
                "tolerance": settings.tol.value(),
                "dim": ps.dim(),
                "count": ps.len(),
                "kruskal_rank": rep.rank,
                "dependent_subset": rep.dependent_subset,
            }),
            text,
        ))
    })
}

pub fn certificate_report(cert: &UniquenessCertificate) -> Value {
    json!({
        "backend": cert.backend,
        "tolerance": cert.tolerance,
        "kruskal_ranks": cert.kruskal_ranks,
        "rank": cert.rank,
        "order": cert.order,
        "bound": cert.bound.to_string(),
        "kruskal_sum": cert.kruskal_sum(),
        "required_sum": cert.required_sum(),
        "verdict": cert.verdict,
        "dependent_subsets": cert.dependent_subsets,
        "diagnostics": cert.diagnostics,
    })
}

pub fn certificate_text(cert: &UniquenessCertificate) -> String {
    let mut lines = vec![
        format!("k = {}", tuple(&cert.kruskal_ranks)),
        format!("r = {}, d = {}", cert.rank, cert.order),
        format!("bound = {}", cert.bound),
        cert.verdict.to_string(),
    ];
    lines.extend(cert.diagnostics.iter().cloned());
    lines.join("\n")
}

pub fn certify(path: &Path, settings: &Settings) -> Result<Outcome> {
    on_backend!(load(path, settings)?, obj => {
        let d = decomposition(obj, path)?;
        let cert = certify_uniqueness(&d, settings.tol)?;
        Ok(Outcome::new(cert.is_certified(), certificate_report(&cert), certificate_text(&cert)))
    })
}

pub fn compose_cmd(path: &Path, output: Option<&Path>, settings: &Settings) -> Result<Outcome> {
    on_backend!(load(path, settings)?, obj => {
        let d = decomposition(obj, path)?;
        emit(&Object::Tensor(compose(&d)), output)
    })
}

fn witness_json<F: Field>(w: &EquivalenceWitness<F>) -> Value {
    json!({
        "permutation": w.permutation,
        "scalings": vectors_json(&w.scalings),
        "threshold": w.threshold,
    })
}

pub fn compare(first: &Path, second: &Path, settings: &Settings) -> Result<Outcome> {
    let mut insts = load_all(&[first, second], settings)?;
    let b = insts.pop().expect("two files");
    let a = insts.pop().expect("two files");
    on_pair!(a, b, (x, y) => {
        let (d1, d2) = (decomposition(x, first)?, decomposition(y, second)?);
        let found = match_decompositions(&d1, &d2, settings.tol)?;
        let text = match &found {
            Some(w) => format!("EQUIVALENT\npermutation {:?}", w.permutation),
            None => "NOT_EQUIVALENT".to_string(),
        };
        Ok(Outcome::new(
            found.is_some(),
            json!({
                "backend": d1.backend(),
                "tolerance": settings.tol.value(),
                "equivalent": found.is_some(),
                "witness": found.as_ref().map(witness_json),
            }),
            text,
        ))
    })
}

pub fn flatten(
    path: &Path,
    modes: &[usize],
    output: Option<&Path>,
    settings: &Settings,
) -> Result<Outcome> {
    on_backend!(load(path, settings)?, obj => {
        let t = tensor(obj, path)?;
        let m = flattening(&t, modes)?;
        if output.is_none() {
            let rank = m.rank(settings.tol);
            return Ok(Outcome::new(
                true,
                json!({
                    "backend": t.backend(),
                    "tolerance": settings.tol.value(),
                    "row_modes": modes,
                    "rows": m.rows(),
                    "cols": m.cols(),
                    "rank": rank,
                }),
                format!("{} x {} flattening of rank {rank}", m.rows(), m.cols()),
            ));
        }
        emit(&Object::Matrix(m), output)
    })
}

pub fn lemma_check(s: &Path, s_tilde: &Path, settings: &Settings) -> Result<Outcome> {
    let mut insts = load_all(&[s, s_tilde], settings)?;
    let b = insts.pop().expect("two files");
    let a = insts.pop().expect("two files");
    on_pair!(a, b, (x, y) => {
        let inst = LemmaInstance::new(pointset(x, s)?, pointset(y, s_tilde)?)?;
        let report = inst.hypothesis()?;
        let conclusion = inst.conclusion(settings.tol);
        let violation = report.violation.as_ref().map(|v| {
            json!({
                "generators": v.generators,
                "span": vectors_json(v.span.basis()),
                "covector": io::encode_all(&v.covector),
                "hyperplane": vectors_json(v.hyperplane.basis()),
                "count_s": v.count_s,
                "count_s_tilde": v.count_s_tilde,
            })
        });
        let mut lines = vec![
            format!("hypothesis {}", if report.holds { "holds" } else { "fails" }),
            format!("S and S~ {}", if conclusion { "coincide" } else { "differ" }),
            format!("{} spans visited, {} checked", report.spans_visited, report.spans_checked),
        ];
        if let Some(v) = &report.violation {
            lines.push(format!(
                "hyperplane from S~ points {:?} holds {} points of S~ but {} of S",
                v.generators, v.count_s_tilde, v.count_s
            ));
        }
        if report.holds && !conclusion {
            lines.push("COUNTEREXAMPLE: hypothesis holds but the sets differ".into());
        }
        Ok(Outcome::new(
            report.holds && conclusion,
            json!({
                "backend": inst.s().backend(),
                "tolerance": settings.tol.value(),
                "hypothesis_holds": report.holds,
                "conclusion_holds": conclusion,
                "spans_visited": report.spans_visited,
                "spans_checked": report.spans_checked,
                "violation": violation,
            }),
            lines.join("\n"),
        ))
    })
}

pub fn sylvester(
    m_path: &Path,
    u_path: &Path,
    v_path: &Path,
    settings: &Settings,
) -> Result<Outcome> {
    let mut insts = load_all(&[m_path, u_path, v_path], settings)?;
    let v_inst = insts.pop().expect("three files");
    let u_inst = insts.pop().expect("three files");
    let m_inst = insts.pop().expect("three files");
    macro_rules! run {
        ($m:ident, $u:ident, $v:ident) => {{
            let m = matrix($m, m_path)?;
            let u = pointset($u, u_path)?;
            let v = pointset($v, v_path)?;
            let u = Subspace::span(u.dim(), u.points(), settings.tol)?;
            let v = Subspace::span(v.dim(), v.points(), settings.tol)?;
            let ranks = sylvester_ranks(&m, &u, &v, settings.tol)?;
            let defect = ranks.defect();
            Ok(Outcome::new(
                defect >= 0,
                json!({
                    "backend": m.backend(),
                    "tolerance": settings.tol.value(),
                    "rank": ranks.full,
                    "rank_rows_restricted": ranks.rows_restricted,
                    "rank_cols_restricted": ranks.cols_restricted,
                    "rank_both_restricted": ranks.both_restricted,
                    "defect": defect,
                }),
                format!(
                    "rank {} >= {} + {} - {}\ndefect {defect}",
                    ranks.full, ranks.rows_restricted, ranks.cols_restricted, ranks.both_restricted
                ),
            ))
        }};
    }
    match (m_inst, u_inst, v_inst) {
        (Instance::Exact(m), Instance::Exact(u), Instance::Exact(v)) => run!(m, u, v),
        (Instance::Float(m), Instance::Float(u), Instance::Float(v)) => run!(m, u, v),
        _ => unreachable!("backends were unified on load"),
    }
}

/// Parses `lo..hi` (inclusive), e.g. `-3..3`.
pub fn parse_range(text: &str) -> std::result::Result<RangeInclusive<i64>, String> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| format!("expected lo..hi, got {text:?}"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower end {lo:?}: {e}"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper end {hi:?}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(lo..=hi)
}

pub enum GenRequest {
    Decomposition {
        dims: Vec<usize>,
        rank: usize,
        coeffs: RangeInclusive<i64>,
    },
    Tensor {
        dims: Vec<usize>,
        rank: usize,
        coeffs: RangeInclusive<i64>,
    },
    PointSet {
        dim: usize,
        count: usize,
        coeffs: RangeInclusive<i64>,
    },
    Matrix {
        rows: usize,
        cols: usize,
        coeffs: RangeInclusive<i64>,
    },
    Scramble {
        decomposition: PathBuf,
    },
}

fn generate<F: Field>(req: &GenRequest, seed: u64) -> Result<Object<F>> {
    Ok(match req {
        GenRequest::Decomposition { dims, rank, coeffs } => {
            Object::Decomposition(gen::gen_decomposition(dims, *rank, seed, coeffs.clone())?)
        }
        GenRequest::Tensor { dims, rank, coeffs } => Object::Tensor(compose(
            &gen::gen_decomposition::<F>(dims, *rank, seed, coeffs.clone())?,
        )),
        GenRequest::PointSet { dim, count, coeffs } => {
            Object::PointSet(gen::gen_pointset(*dim, *count, seed, coeffs.clone())?)
        }
        GenRequest::Matrix { rows, cols, coeffs } => {
            Object::Matrix(gen::gen_matrix(*rows, *cols, seed, coeffs.clone())?)
        }
        GenRequest::Scramble { .. } => unreachable!("handled by the caller"),
    })
}

pub fn gen_cmd(req: &GenRequest, output: Option<&Path>, settings: &Settings) -> Result<Outcome> {
    if let GenRequest::Scramble {
        decomposition: path,
    } = req
    {
        return on_backend!(load(path, settings)?, obj => {
            let d = decomposition(obj, path)?;
            let w = gen::gen_witness(d.order(), d.len(), settings.seed);
            emit(&Object::Decomposition(scramble(&d, &w)?), output)
        });
    }
    match settings.backend.unwrap_or(Backend::Exact) {
        Backend::Exact => emit(
            &generate::<krusk_core::GaussRat>(req, settings.seed)?,
            output,
        ),
        Backend::Float => emit(
            &generate::<krusk_core::Complex64>(req, settings.seed)?,
            output,
        ),
    }
}
