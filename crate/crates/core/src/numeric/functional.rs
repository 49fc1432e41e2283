use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{Backend, Field, Tolerance};
use super::subspace::{pair, Subspace};
use crate::error::{Error, Result};

const SEED: u64 = 0x6b72_7573_6b61_6c00;
const BUDGET: usize = 4096;

/// Finds a covector vanishing on `l` and nonzero on every vector in `avoid`.
///
/// Its kernel is a hyperplane through `l` missing all of `avoid`. Basis covectors of
/// the annihilator are tried first, then seeded random integer combinations of
/// them with a slowly growing coefficient range. Exact backend only.
pub fn separating_functional<F: Field>(l: &Subspace<F>, avoid: &[Vec<F>]) -> Result<Vec<F>> {
    if F::BACKEND != Backend::Exact {
        return Err(Error::ExactOnly("separating_functional"));
    }
    let tol = Tolerance::default();
    for (i, v) in avoid.iter().enumerate() {
        if l.contains(v, tol)? {
            return Err(Error::NoSeparatingFunctional(format!(
                "avoid vector {i} lies in the subspace"
            )));
        }
    }
    let ann = l.annihilator(tol);
    if ann.dim() == 0 {
        return Err(Error::NoSeparatingFunctional(
            "the subspace is the whole space".into(),
        ));
    }
    let separates = |x: &[F]| avoid.iter().all(|v| !pair(x, v).is_exact_zero());

    if let Some(x) = ann.basis().iter().find(|x| separates(x)) {
        return Ok(x.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for attempt in 0..BUDGET {
        let bound = 2 + (attempt / 64) as i64;
        let mut x = vec![F::zero(); l.ambient()];
        for b in ann.basis() {
            let c = F::from_i64(rng.gen_range(-bound..=bound));
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi = xi.add(&c.mul(bi));
            }
        }
        if x.iter().any(|c| !c.is_exact_zero()) && separates(&x) {
            return Ok(x);
        }
    }
    // Over an infinite field finitely many hyperplanes cannot cover the annihilator.
    unreachable!("separating functional search exhausted its budget")
}
