use krusk_core::gen::{gen_matrix, gen_pointset};
use krusk_core::kruskal::{is_r_general_position, kruskal_rank, PointSet};
use krusk_core::numeric::{GaussRat, Matrix, Tolerance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Point sets with deliberate coincidences and dependencies.
fn structured(seed: u64) -> PointSet<GaussRat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=4);
    let count = rng.gen_range(1..=6);
    let mut pts = gen_pointset::<GaussRat>(n, count, seed, -2..=2)
        .unwrap()
        .into_points();
    if count >= 2 && rng.gen_bool(0.3) {
        let c = GaussRat::from_integer(rng.gen_range(1..=3));
        pts[1] = pts[0].iter().map(|x| x * &c).collect();
    }
    if count >= 3 && rng.gen_bool(0.3) {
        let s: Vec<GaussRat> = pts[0].iter().zip(&pts[1]).map(|(a, b)| a + b).collect();
        if s.iter().any(|x| !x.is_zero()) {
            pts[2] = s;
        }
    }
    pts.shuffle(&mut rng);
    PointSet::new(n, pts).unwrap()
}

#[test]
fn both_routes_agree() {
    for seed in 0..300 {
        let s = structured(seed);
        let k = kruskal_rank(s.points(), tol()).unwrap();
        let geometric = (1..=s.len())
            .take_while(|&r| is_r_general_position(&s, r, tol()).unwrap())
            .last()
            .unwrap_or(0);
        assert_eq!(k, geometric, "seed {seed}");
    }
}

#[test]
fn rank_at_least_two_iff_distinct() {
    for seed in 0..300 {
        let s = structured(seed);
        if s.len() < 2 || s.dim() < 2 {
            continue;
        }
        let k = kruskal_rank(s.points(), tol()).unwrap();
        let distinct = (0..s.len()).all(|i| {
            (i + 1..s.len()).all(|j| {
                kruskal_rank(&[s.points()[i].clone(), s.points()[j].clone()], tol()).unwrap() == 2
            })
        });
        assert_eq!(k >= 2, distinct, "seed {seed}");
    }
}

#[test]
fn large_subsets_keep_the_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..200 {
        let s = structured(seed);
        let k = kruskal_rank(s.points(), tol()).unwrap();
        let size = rng.gen_range(k.max(1)..=s.len());
        let mut pts = s.points().to_vec();
        pts.shuffle(&mut rng);
        pts.truncate(size);
        assert!(kruskal_rank(&pts, tol()).unwrap() >= k, "seed {seed}");
    }
}

#[test]
fn invariant_under_change_of_coordinates() {
    let mut tested = 0;
    for seed in 0..200u64 {
        let s = structured(seed);
        let n = s.dim();
        let g = gen_matrix::<GaussRat>(n, n, seed + 1000, -3..=3).unwrap();
        if g.rank(tol()) < n {
            continue;
        }
        let moved: Vec<Vec<GaussRat>> = s
            .points()
            .iter()
            .map(|p| {
                let col = Matrix::from_columns(std::slice::from_ref(p)).unwrap();
                g.matmul(&col).unwrap().column(0)
            })
            .collect();
        assert_eq!(
            kruskal_rank(&moved, tol()).unwrap(),
            kruskal_rank(s.points(), tol()).unwrap(),
            "seed {seed}"
        );
        tested += 1;
    }
    assert!(tested > 100);
}
