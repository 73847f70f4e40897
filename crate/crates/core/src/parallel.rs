//! Deterministic data-parallel primitives.
//!
//! Every helper here has a sequential twin that produces bit-identical
//! output: sums are accumulated per fixed-size chunk with compensated
//! (Kahan) addition and the chunk results are combined in index order,
//! so the result does not depend on thread count or scheduling. The
//! `parallel` feature selects which twin the dispatching functions use;
//! both twins stay available for benchmarking.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fixed chunk length for deterministic partial-sum splitting.
pub const SUM_CHUNK: u64 = 8192;

/// Compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum
    }
}

/// Kahan-sum an iterator in its native order.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Kahan::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

fn chunk_ranges(from: u64, to: u64) -> Vec<(u64, u64)> {
    let mut ranges = Vec::new();
    let mut lo = from;
    while lo < to {
        let hi = lo.saturating_add(SUM_CHUNK).min(to);
        ranges.push((lo, hi));
        lo = hi;
    }
    ranges
}

fn sum_chunk(lo: u64, hi: u64, term: &(impl Fn(u64) -> f64 + Sync)) -> f64 {
    let mut acc = Kahan::new();
    for n in lo..hi {
        acc.add(term(n));
    }
    acc.total()
}

/// Sum `term(n)` for `n` in `from..to`, sequential twin.
pub fn sum_indexed_seq(from: u64, to: u64, term: impl Fn(u64) -> f64 + Sync) -> f64 {
    let partials: Vec<f64> = chunk_ranges(from, to)
        .into_iter()
        .map(|(lo, hi)| sum_chunk(lo, hi, &term))
        .collect();
    kahan_sum(partials)
}

/// Sum `term(n)` for `n` in `from..to`, parallel twin.
#[cfg(feature = "parallel")]
pub fn sum_indexed_par(from: u64, to: u64, term: impl Fn(u64) -> f64 + Sync) -> f64 {
    let partials: Vec<f64> = chunk_ranges(from, to)
        .into_par_iter()
        .map(|(lo, hi)| sum_chunk(lo, hi, &term))
        .collect();
    kahan_sum(partials)
}

/// Sum `term(n)` for `n` in `from..to` (half-open); dispatches on the
/// `parallel` feature.
pub fn sum_indexed(from: u64, to: u64, term: impl Fn(u64) -> f64 + Sync) -> f64 {
    #[cfg(feature = "parallel")]
    {
        sum_indexed_par(from, to, term)
    }
    #[cfg(not(feature = "parallel"))]
    {
        sum_indexed_seq(from, to, term)
    }
}

/// Order-preserving map over a slice, sequential twin.
pub fn map_collect_seq<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Order-preserving map over a slice, parallel twin.
#[cfg(feature = "parallel")]
pub fn map_collect_par<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.par_iter().map(f).collect()
}

/// Order-preserving map over a slice; dispatches on the `parallel` feature.
pub fn map_collect<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        map_collect_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_collect_seq(items, f)
    }
}
