use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use krusk_core::gen::{gen_decomposition, gen_lemma_instance, gen_matrix, gen_witness};
use krusk_core::io::{parse_instance, Instance, Object};
use krusk_core::numeric::sylvester_defect;
use krusk_core::{
    certify_uniqueness, compose, kruskal_rank, match_decompositions, rank_lower_bound, scramble,
    support_containment_check, verify_witness, Complex64, Decomposition, GaussRat, LemmaInstance,
    Matrix, Subspace, Tolerance, Verdict,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn tol() -> Tolerance {
    Tolerance::default()
}

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn exact_decomposition(path: &Path) -> Decomposition<GaussRat> {
    let text = fs::read_to_string(path).expect("fixture readable");
    match parse_instance(&text).expect("fixture parses") {
        Instance::Exact(Object::Decomposition(d)) => d,
        _ => panic!("{} is not an exact decomposition", path.display()),
    }
}

fn unit(n: usize, i: usize) -> Vec<GaussRat> {
    (0..n)
        .map(|k| {
            if k == i {
                GaussRat::one()
            } else {
                GaussRat::zero()
            }
        })
        .collect()
}

fn kruskal_consistency() -> Outcome {
    const DRAWS: u64 = 200;
    // entries in -3..3 leave too many singular 4-subsets for a generic sample
    let coeffs = -9..=9;
    let mut certified = 0;
    for seed in 0..DRAWS {
        let d = gen_decomposition::<GaussRat>(&[4, 4, 4], 5, seed, coeffs.clone())
            .map_err(|e| e.to_string())?;
        let cert = certify_uniqueness(&d, tol()).map_err(|e| e.to_string())?;
        if !cert.is_certified() {
            continue;
        }
        certified += 1;
        let t = compose(&d);
        let lb = rank_lower_bound(&t, tol());
        check(lb <= 5, || {
            format!("seed {seed}: flattening bound {lb} > 5")
        })?;
        let support = support_containment_check(&d, &t, tol()).map_err(|e| e.to_string())?;
        check(support.all_contained(), || {
            format!("seed {seed}: {:?}", support.violations)
        })?;
        let moved = scramble(&d, &gen_witness(3, 5, seed)).map_err(|e| e.to_string())?;
        let w = match_decompositions(&d, &moved, tol()).map_err(|e| e.to_string())?;
        check(w.is_some_and(|w| verify_witness(&d, &moved, &w)), || {
            format!("seed {seed}: scrambled copy not matched")
        })?;
    }
    let rate = certified as f64 / DRAWS as f64;
    check(rate >= 0.95, || {
        format!("only {certified}/{DRAWS} certified")
    })?;
    Ok(format!("{certified}/{DRAWS} certified"))
}

fn permutation_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut holds, mut fails) = (0, 0);
    for seed in 0..500 {
        let n = rng.gen_range(2..=4);
        let r = rng.gen_range(n..=n + 3);
        let inst = gen_lemma_instance(n, r, seed).map_err(|e| e.to_string())?;
        let report = inst.hypothesis().map_err(|e| e.to_string())?;
        if report.holds {
            holds += 1;
            check(inst.conclusion(tol()), || {
                format!("seed {seed}: hypothesis holds, sets differ")
            })?;
            continue;
        }
        fails += 1;
        let v = report
            .violation
            .ok_or(format!("seed {seed}: failure without witness"))?;
        let h_ok = inst
            .hyperplane_ok(&v.hyperplane, tol())
            .map_err(|e| e.to_string())?;
        let m_ok = inst
            .matrix_form_ok(&v.covector, tol())
            .map_err(|e| e.to_string())?;
        check(!h_ok && !m_ok, || {
            format!("seed {seed}: witness passes a check")
        })?;
    }
    Ok(format!("{holds} hold, {fails} fail with witnesses"))
}

fn random_subspace(rng: &mut ChaCha8Rng, n: usize) -> Result<Subspace<GaussRat>, String> {
    let k = rng.gen_range(0..=n);
    let vs: Vec<Vec<GaussRat>> = (0..k)
        .map(|_| {
            (0..n)
                .map(|_| GaussRat::from_integer(rng.gen_range(-2..=2)))
                .collect()
        })
        .collect();
    Subspace::span(n, &vs, tol()).map_err(|e| e.to_string())
}

fn sylvester() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut tight = 0;
    for seed in 0..1000 {
        let (rows, cols) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let m: Matrix<GaussRat> =
            gen_matrix(rows, cols, seed, -2..=2).map_err(|e| e.to_string())?;
        let u = random_subspace(&mut rng, rows)?;
        let v = random_subspace(&mut rng, cols)?;
        let defect = sylvester_defect(&m, &u, &v, tol()).map_err(|e| e.to_string())?;
        check(defect >= 0, || format!("seed {seed}: defect {defect}"))?;
        tight += usize::from(defect == 0);
    }
    Ok(format!("1000 cases, {tight} with equality"))
}

fn non_unique_example() -> Outcome {
    let d = exact_decomposition(&fixture("nonunique.json"));
    let a = certify_uniqueness(&d, tol()).map_err(|e| e.to_string())?;
    let b = certify_uniqueness(&d, tol()).map_err(|e| e.to_string())?;
    check(a == b, || "certificate differs between runs".into())?;
    check(a.verdict == Verdict::NotCertified, || "certified".into())?;
    check(a.kruskal_ranks[0] == 1, || {
        format!("mode A Kruskal rank {}", a.kruskal_ranks[0])
    })?;
    Ok(format!("k = {:?}, bound {}", a.kruskal_ranks, a.bound))
}

fn diagonal_family() -> Outcome {
    for a in 2..=6usize {
        let terms: Vec<Vec<Vec<GaussRat>>> = (0..a).map(|i| vec![unit(a, i); 3]).collect();
        let d = Decomposition::from_terms(&terms).map_err(|e| e.to_string())?;
        let cert = certify_uniqueness(&d, tol()).map_err(|e| e.to_string())?;
        let want = BigRational::new((3 * a as i64 - 2).into(), 2.into());
        check(cert.is_certified() && cert.bound == want, || {
            format!("a = {a}: {} with bound {}", cert.verdict, cert.bound)
        })?;
        let rank = BigRational::from_integer((a as i64).into());
        let top =
            BigRational::new((3 * a as i64).into(), 2.into()) - BigRational::from_integer(1.into());
        check(rank <= top && top == cert.bound, || {
            format!("a = {a}: {rank} vs {top}")
        })?;
    }
    Ok("a = 2..6 certified with bound (3a - 2)/2".into())
}

fn backend_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut deficient = 0;
    for seed in 0..100 {
        let rows = rng.gen_range(1..=6);
        let cols = rng.gen_range(1..=10);
        let m: Matrix<GaussRat> =
            gen_matrix(rows, cols, seed, -5..=5).map_err(|e| e.to_string())?;
        let mut exact_cols = m.columns();
        if seed % 3 == 0 && cols > 1 {
            // a negated copy forces a dependent pair
            let (i, j) = (rng.gen_range(0..cols), rng.gen_range(0..cols));
            exact_cols[j] = exact_cols[i].iter().map(|x| -x).collect();
        }
        let float_cols: Vec<Vec<Complex64>> = exact_cols
            .iter()
            .map(|c| c.iter().map(GaussRat::to_complex64).collect())
            .collect();
        let ke = kruskal_rank(&exact_cols, tol()).map_err(|e| e.to_string())?;
        let kf = kruskal_rank(&float_cols, tol()).map_err(|e| e.to_string())?;
        check(ke == kf, || format!("seed {seed}: exact {ke}, float {kf}"))?;
        deficient += usize::from(ke < rows.min(cols));
    }
    Ok(format!("100 matrices, {deficient} below full Kruskal rank"))
}

/// Proper spans of points of S~ holding at least `dim L` of them.
fn admissible_spans(inst: &LemmaInstance<GaussRat>) -> Result<Vec<Subspace<GaussRat>>, String> {
    let n = inst.dim();
    let pts = inst.s_tilde().points();
    let mut out: Vec<Subspace<GaussRat>> = Vec::new();
    for mask in 1u32..(1 << pts.len()) {
        let chosen: Vec<Vec<GaussRat>> = (0..pts.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| pts[i].clone())
            .collect();
        let l = Subspace::span(n, &chosen, tol()).map_err(|e| e.to_string())?;
        if l.dim() == n || out.contains(&l) {
            continue;
        }
        let mu = pts
            .iter()
            .filter(|p| l.contains(p, tol()).unwrap_or(false))
            .count();
        if mu >= l.dim() {
            out.push(l);
        }
    }
    Ok(out)
}

fn flag_counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pairs = 0;
    let mut strict = 0;
    let mut seed = 0;
    while pairs < 200 {
        let n = rng.gen_range(2..=4);
        let r = rng.gen_range(n..=n + 3);
        let inst = gen_lemma_instance(n, r, seed).map_err(|e| e.to_string())?;
        for l in admissible_spans(&inst)?.into_iter().take(200 - pairs) {
            let c = inst.flag_counts(&l).map_err(|e| e.to_string())?;
            check(c.partition_holds(), || format!("seed {seed}: {c:?}"))?;
            check(c.covering_holds(), || format!("seed {seed}: {c:?}"))?;
            strict += usize::from(c.s_total() < c.r);
            pairs += 1;
        }
        seed += 1;
    }
    Ok(format!(
        "{pairs} pairs from {seed} instances, {strict} strict"
    ))
}

fn unit_examples() -> Outcome {
    // two factors: with independent a_i and b_i, permuting the b_i changes the tensor
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let r = rng.gen_range(2..=4);
        let a: Vec<Vec<GaussRat>> = (0..r).map(|i| unit(r, i)).collect();
        let b: Vec<Vec<GaussRat>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|k| GaussRat::from_integer(if k <= i { 1 } else { 0 }))
                    .collect()
            })
            .collect();
        let mut sigma: Vec<usize> = (0..r).collect();
        sigma.shuffle(&mut rng);
        let permuted: Vec<Vec<GaussRat>> = sigma.iter().map(|&i| b[i].clone()).collect();
        let build = |bs: &[Vec<GaussRat>]| {
            Decomposition::new(vec![
                Matrix::from_columns(&a).expect("columns"),
                Matrix::from_columns(bs).expect("columns"),
            ])
            .expect("nonzero columns")
        };
        let same = compose(&build(&b)) == compose(&build(&permuted));
        let identity = sigma.iter().enumerate().all(|(i, &s)| i == s);
        check(same == identity, || format!("sigma {sigma:?}"))?;
    }

    let four = exact_decomposition(&fixture("four_modes.json"));
    let cert = certify_uniqueness(&four, tol()).map_err(|e| e.to_string())?;
    check(
        cert.is_certified() && cert.kruskal_sum() >= cert.required_sum(),
        || format!("d = 4: {:?}", cert.kruskal_ranks),
    )?;

    let padded = exact_decomposition(&fixture("padded.json"));
    let report =
        support_containment_check(&padded, &compose(&padded), tol()).map_err(|e| e.to_string())?;
    check(
        report.support_dims == [1, 1, 1] && report.violations == [(0, 0), (1, 0)],
        || format!("{report:?}"),
    )?;
    Ok("sigma = id, d = 4 certificate, support violation".into())
}

fn krusk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krusk"))
        .args(args)
        .env_remove("KRUSK_TOL")
        .output()
        .expect("krusk runs")
}

fn cli_properties() -> Outcome {
    let out = krusk(&["selftest"]);
    check(out.status.code() == Some(0), || {
        format!("selftest failed:\n{}", String::from_utf8_lossy(&out.stdout))
    })?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..100u64 {
        let seed = i.to_string();
        let backend = if i % 4 == 3 { "float" } else { "exact" };
        let order = rng.gen_range(3..=4);
        let dims: Vec<String> = (0..order)
            .map(|_| rng.gen_range(1..=4).to_string())
            .collect();
        let dims = dims.join(",");
        let rank = rng.gen_range(1..=4).to_string();
        let gen_args: Vec<&str> = match i % 3 {
            0 => vec!["gen", "decomposition", "--dims", &dims, "--rank", &rank],
            1 => vec!["gen", "tensor", "--dims", &dims, "--rank", &rank],
            _ => vec!["gen", "pointset", "--dim", "3", "--count", &rank],
        };
        let common = ["--seed", &seed, "--backend", backend];
        let path = dir.path().join(format!("{i}.json"));
        let path_s = path.to_str().expect("utf-8 path");

        let first = krusk(&[&gen_args[..], &common, &["-o", path_s]].concat());
        check(first.status.success(), || {
            String::from_utf8_lossy(&first.stderr).into()
        })?;
        let printed = krusk(&[&gen_args[..], &common].concat());
        let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
        check(printed.stdout == text.as_bytes(), || {
            format!("file {i}: gen output not deterministic")
        })?;

        let parsed = parse_instance(&text).map_err(|e| format!("file {i}: {e}"))?;
        check(parsed.to_document() == text, || {
            format!("file {i}: serialization is not stable")
        })?;
        check(
            parse_instance(&parsed.to_document()).ok() == Some(parsed.clone()),
            || format!("file {i}: round trip changed the value"),
        )?;

        let report = match i % 3 {
            0 => vec!["--json", "certify", path_s],
            1 => vec!["--json", "flatten", path_s, "--modes", "0"],
            _ => vec!["--json", "krank", path_s],
        };
        let (a, b) = (krusk(&report), krusk(&report));
        check(a.stdout == b.stdout && a.status == b.status, || {
            format!("file {i}: reports differ")
        })?;
        let verdict = match &parsed {
            Instance::Exact(Object::Decomposition(d)) => {
                Some(certify_uniqueness(d, tol()).map(|c| c.is_certified()))
            }
            Instance::Float(Object::Decomposition(d)) => {
                Some(certify_uniqueness(d, tol()).map(|c| c.is_certified()))
            }
            _ => None,
        };
        if let Some(verdict) = verdict {
            let want = match verdict {
                Ok(true) => 0,
                Ok(false) => 1,
                Err(_) => 2,
            };
            check(a.status.code() == Some(want), || {
                format!("file {i}: exit {:?}, expected {want}", a.status.code())
            })?;
            let moved = dir.path().join(format!("{i}-scrambled.json"));
            let moved_s = moved.to_str().expect("utf-8 path");
            let sc = krusk(&["gen", "scramble", path_s, "--seed", &seed, "-o", moved_s]);
            check(sc.status.success(), || {
                String::from_utf8_lossy(&sc.stderr).into()
            })?;
            let cmp = krusk(&["--json", "compare", path_s, moved_s]);
            check(cmp.status.code() == Some(0), || {
                format!("file {i}: scrambled copy not matched")
            })?;
        } else {
            check(a.status.code() == Some(0), || {
                format!("file {i}: exit {:?}", a.status.code())
            })?;
        }
    }
    let bad = krusk(&[
        "certify",
        fixture("lemma_s.json").to_str().expect("utf-8 path"),
    ]);
    check(bad.status.code() == Some(2), || {
        "wrong kind did not exit 2".into()
    })?;
    Ok("selftest green; 100 files round-trip and reproduce".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "Kruskal-theorem consistency (4x4x4, r = 5)",
            kruskal_consistency,
            Some(Duration::from_secs(120)),
        ),
        (
            "permutation lemma on random instances",
            permutation_lemma,
            Some(Duration::from_secs(120)),
        ),
        (
            "Sylvester inequality",
            sylvester,
            Some(Duration::from_secs(30)),
        ),
        ("non-unique example", non_unique_example, None),
        ("diagonal family", diagonal_family, None),
        (
            "exact/float Kruskal rank agreement",
            backend_agreement,
            None,
        ),
        ("flag-counting identity", flag_counts, None),
        ("unit examples", unit_examples, None),
        (
            "CLI selftest, round trip, determinism",
            cli_properties,
            None,
        ),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match (result, budget) {
            (Ok(_), Some(b)) if elapsed > *b => Err(format!("took {elapsed:.1?}, budget {b:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("PASS  {}. {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL  {}. {name}: {e} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
