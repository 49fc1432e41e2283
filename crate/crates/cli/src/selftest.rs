use num_rational::BigRational;
use serde_json::json;

use krusk_core::io::{parse_instance, Instance, Object};
use krusk_core::numeric::sylvester_ranks;
use krusk_core::{
    certify_uniqueness, compose, match_decompositions, scramble, support_containment_check,
    verify_witness, Decomposition, EquivalenceWitness, GaussRat, LemmaInstance, Subspace,
    Tolerance, Verdict,
};

use crate::report::Outcome;

const DIAG3: &str = include_str!("../fixtures/diag3.json");
const NONUNIQUE: &str = include_str!("../fixtures/nonunique.json");
const FOUR_MODES: &str = include_str!("../fixtures/four_modes.json");
const PADDED: &str = include_str!("../fixtures/padded.json");
const LEMMA_S: &str = include_str!("../fixtures/lemma_s.json");
const LEMMA_S_TILDE: &str = include_str!("../fixtures/lemma_s_tilde.json");
const LEMMA_BAD_S: &str = include_str!("../fixtures/lemma_bad_s.json");
const LEMMA_BAD_S_TILDE: &str = include_str!("../fixtures/lemma_bad_s_tilde.json");
const SYLVESTER_M: &str = include_str!("../fixtures/sylvester_m.json");
const SYLVESTER_U: &str = include_str!("../fixtures/sylvester_u.json");
const SYLVESTER_V: &str = include_str!("../fixtures/sylvester_v.json");

type Check = Result<(), String>;
type Case = (&'static str, fn(Tolerance) -> Check);

fn exact(text: &str) -> Result<Object<GaussRat>, String> {
    match parse_instance(text).map_err(|e| e.to_string())? {
        Instance::Exact(o) => Ok(o),
        Instance::Float(_) => Err("fixture is not exact".into()),
    }
}

fn dec(text: &str) -> Result<Decomposition<GaussRat>, String> {
    match exact(text)? {
        Object::Decomposition(d) => Ok(d),
        o => Err(format!("expected a decomposition, got {}", o.kind())),
    }
}

fn lemma(s: &str, t: &str) -> Result<LemmaInstance<GaussRat>, String> {
    match (exact(s)?, exact(t)?) {
        (Object::PointSet(s), Object::PointSet(t)) => {
            LemmaInstance::new(s, t).map_err(|e| e.to_string())
        }
        _ => Err("expected two pointsets".into()),
    }
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn diagonal(a: usize) -> Decomposition<GaussRat> {
    let unit = |i: usize| -> Vec<GaussRat> {
        (0..a)
            .map(|k| {
                if k == i {
                    GaussRat::one()
                } else {
                    GaussRat::zero()
                }
            })
            .collect()
    };
    let terms: Vec<Vec<Vec<GaussRat>>> = (0..a).map(|i| vec![unit(i); 3]).collect();
    Decomposition::from_terms(&terms).expect("diagonal terms are nonzero")
}

fn non_unique(tol: Tolerance) -> Check {
    let cert = certify_uniqueness(&dec(NONUNIQUE)?, tol).map_err(|e| e.to_string())?;
    ensure(cert.verdict == Verdict::NotCertified, || "certified".into())?;
    ensure(cert.kruskal_ranks == [1, 3, 3], || {
        format!("Kruskal ranks {:?}", cert.kruskal_ranks)
    })?;
    ensure(
        cert.diagnostics
            .iter()
            .any(|d| d.starts_with("mode A Kruskal rank 1")),
        || format!("diagnostics {:?}", cert.diagnostics),
    )
}

fn diag3_document(tol: Tolerance) -> Check {
    let cert = certify_uniqueness(&dec(DIAG3)?, tol).map_err(|e| e.to_string())?;
    ensure(cert.is_certified(), || "not certified".into())?;
    ensure(cert.kruskal_ranks == [3, 3, 3], || {
        format!("{:?}", cert.kruskal_ranks)
    })?;
    ensure(cert.bound.to_string() == "7/2", || {
        format!("bound {}", cert.bound)
    })
}

fn diagonal_family(tol: Tolerance) -> Check {
    for a in 2..=6usize {
        let cert = certify_uniqueness(&diagonal(a), tol).map_err(|e| e.to_string())?;
        let want = BigRational::new((3 * a as i64 - 2).into(), 2.into());
        ensure(cert.is_certified() && cert.bound == want, || {
            format!("a = {a}: {} with bound {}", cert.verdict, cert.bound)
        })?;
        let r = BigRational::from_integer((a as i64).into());
        ensure(r <= cert.bound, || format!("a = {a}: rank above bound"))?;
    }
    Ok(())
}

fn four_modes(tol: Tolerance) -> Check {
    let cert = certify_uniqueness(&dec(FOUR_MODES)?, tol).map_err(|e| e.to_string())?;
    ensure(
        cert.kruskal_ranks == [2, 2, 2, 2] && cert.required_sum() == 7,
        || format!("{:?}, required {}", cert.kruskal_ranks, cert.required_sum()),
    )?;
    ensure(cert.is_certified(), || "not certified".into())
}

fn padded_support(tol: Tolerance) -> Check {
    let d = dec(PADDED)?;
    let t = compose(&d);
    let report = support_containment_check(&d, &t, tol).map_err(|e| e.to_string())?;
    ensure(report.support_dims == [1, 1, 1], || {
        format!("supports {:?}", report.support_dims)
    })?;
    ensure(report.violations == [(0, 0), (1, 0)], || {
        format!("violations {:?}", report.violations)
    })
}

fn scramble_round_trip(tol: Tolerance) -> Check {
    let d = dec(DIAG3)?;
    let two = GaussRat::from_integer(2);
    let half = GaussRat::ratio(1, 2);
    let w = EquivalenceWitness {
        permutation: vec![2, 0, 1],
        scalings: vec![
            vec![two.clone(), GaussRat::one(), GaussRat::gaussian(0, 1)],
            vec![half.clone(), GaussRat::one(), GaussRat::gaussian(0, 1)],
            vec![GaussRat::one(), GaussRat::one(), GaussRat::from_integer(-1)],
        ],
        threshold: None,
    };
    let moved = scramble(&d, &w).map_err(|e| e.to_string())?;
    let found = match_decompositions(&d, &moved, tol)
        .map_err(|e| e.to_string())?
        .ok_or("no witness")?;
    ensure(verify_witness(&d, &moved, &found), || {
        "witness does not verify".into()
    })?;
    ensure(found.permutation == w.permutation, || {
        format!("permutation {:?}", found.permutation)
    })
}

fn lemma_equal_sets(tol: Tolerance) -> Check {
    let inst = lemma(LEMMA_S, LEMMA_S_TILDE)?;
    let report = inst.hypothesis().map_err(|e| e.to_string())?;
    ensure(report.holds, || "hypothesis fails".into())?;
    ensure(inst.conclusion(tol), || "sets differ".into())
}

fn lemma_violation(tol: Tolerance) -> Check {
    let inst = lemma(LEMMA_BAD_S, LEMMA_BAD_S_TILDE)?;
    let report = inst.hypothesis().map_err(|e| e.to_string())?;
    let v = report.violation.ok_or("no violation found")?;
    ensure((v.count_s, v.count_s_tilde) == (1, 2), || {
        format!("counts {} and {}", v.count_s, v.count_s_tilde)
    })?;
    let hyperplane_ok = inst
        .hyperplane_ok(&v.hyperplane, tol)
        .map_err(|e| e.to_string())?;
    let matrix_ok = inst
        .matrix_form_ok(&v.covector, tol)
        .map_err(|e| e.to_string())?;
    ensure(!hyperplane_ok && !matrix_ok, || {
        "witness passes a check".into()
    })?;
    ensure(!inst.conclusion(tol), || "sets coincide".into())
}

fn sylvester(tol: Tolerance) -> Check {
    let (m, u, v) = match (
        exact(SYLVESTER_M)?,
        exact(SYLVESTER_U)?,
        exact(SYLVESTER_V)?,
    ) {
        (Object::Matrix(m), Object::PointSet(u), Object::PointSet(v)) => (m, u, v),
        _ => return Err("unexpected fixture kinds".into()),
    };
    let span = |p: &krusk_core::PointSet<GaussRat>| Subspace::span(p.dim(), p.points(), tol);
    let (u, v) = (
        span(&u).map_err(|e| e.to_string())?,
        span(&v).map_err(|e| e.to_string())?,
    );
    let ranks = sylvester_ranks(&m, &u, &v, tol).map_err(|e| e.to_string())?;
    let got = (
        ranks.full,
        ranks.rows_restricted,
        ranks.cols_restricted,
        ranks.both_restricted,
    );
    ensure(got == (2, 2, 1, 1) && ranks.defect() == 0, || {
        format!("ranks {got:?}")
    })
}

const CASES: &[Case] = &[
    ("non-unique example", non_unique),
    ("diagonal 3x3x3 document", diag3_document),
    ("diagonal family a = 2..6", diagonal_family),
    ("four-mode certificate", four_modes),
    ("padded rank-1 support violation", padded_support),
    ("scramble and match", scramble_round_trip),
    ("lemma: equal point sets", lemma_equal_sets),
    ("lemma: hypothesis violation", lemma_violation),
    ("sylvester ranks", sylvester),
];

pub fn run() -> Outcome {
    let tol = Tolerance::default();
    let mut cases = Vec::new();
    let mut lines = Vec::new();
    let mut all = true;
    for (name, check) in CASES {
        let result = check(tol);
        all &= result.is_ok();
        match &result {
            Ok(()) => lines.push(format!("PASS  {name}")),
            Err(e) => lines.push(format!("FAIL  {name}: {e}")),
        }
        cases.push(json!({ "name": name, "passed": result.is_ok(), "detail": result.err() }));
    }
    let passed = cases.len() - lines.iter().filter(|l| l.starts_with("FAIL")).count();
    lines.push(format!("{passed}/{} passed", CASES.len()));
    Outcome::new(
        all,
        json!({ "cases": cases, "passed": all }),
        lines.join("\n"),
    )
}
