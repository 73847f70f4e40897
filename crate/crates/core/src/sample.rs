//! Seeded sample generators for property tests and experiments.
//!
//! Everything is driven by an explicit ChaCha8 stream so runs are
//! reproducible from a single `--seed` value.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::hypergroup::{DiscreteHypergroup, Point, Window};
use crate::orlicz::OrliczFunction;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn carrier_candidates(h: &DiscreteHypergroup, window: &Window) -> Vec<Point> {
    (window.lo..=window.hi)
        .filter(|&x| h.carrier_contains(x))
        .collect()
}

/// Random real function with 1..=max_support points drawn from the
/// window and values uniform in [-2, 2] away from zero.
pub fn random_real_function(
    h: &DiscreteHypergroup,
    rng: &mut impl Rng,
    window: &Window,
    max_support: usize,
) -> Result<OrliczFunction> {
    let candidates = carrier_candidates(h, window);
    let k = rng.gen_range(1..=max_support.min(candidates.len()).max(1));
    let mut pairs = Vec::with_capacity(k);
    for _ in 0..k {
        let x = candidates[rng.gen_range(0..candidates.len())];
        let mut v: f64 = rng.gen_range(-2.0..2.0);
        if v.abs() < 1e-3 {
            v = 1e-3_f64.copysign(v + f64::MIN_POSITIVE);
        }
        pairs.push((x, v));
    }
    OrliczFunction::from_real(h, pairs)
}

/// Random complex function, same support scheme.
pub fn random_complex_function(
    h: &DiscreteHypergroup,
    rng: &mut impl Rng,
    window: &Window,
    max_support: usize,
) -> Result<OrliczFunction> {
    let candidates = carrier_candidates(h, window);
    let k = rng.gen_range(1..=max_support.min(candidates.len()).max(1));
    let mut pairs = Vec::with_capacity(k);
    for _ in 0..k {
        let x = candidates[rng.gen_range(0..candidates.len())];
        let v = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        pairs.push((x, v));
    }
    OrliczFunction::new(h, pairs)
}
