//! Data-parallel summation and scan kernels.
//!
//! Each kernel has a sequential variant (`*_seq`) that is always available
//! and a dispatching variant that fans work out with rayon when the
//! `parallel` feature is enabled and the range is large enough to pay for
//! it. Both variants are public so the benchmark suite can compare them.
//!
//! Floating-point sums run Neumaier compensation inside fixed-size chunks
//! and combine chunk totals in index order, so the result is bit-identical
//! regardless of thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many elements the dispatching kernels stay sequential.
pub const PAR_MIN_LEN: u64 = 4096;

const CHUNK: u64 = 8192;

fn neumaier_fold(mut acc: (f64, f64), x: f64) -> (f64, f64) {
    let t = acc.0 + x;
    if acc.0.abs() >= x.abs() {
        acc.1 += (acc.0 - t) + x;
    } else {
        acc.1 += (x - t) + acc.0;
    }
    acc.0 = t;
    acc
}

/// Compensated sum of `term(k)` for k in `lo..=hi` (empty when lo > hi).
pub fn sum_f64_seq<F>(lo: u64, hi: u64, term: F) -> f64
where
    F: Fn(u64) -> f64,
{
    if lo > hi {
        return 0.0;
    }
    let (s, c) = (lo..=hi).map(term).fold((0.0, 0.0), neumaier_fold);
    s + c
}

/// Compensated sum, parallel over fixed chunks when worthwhile.
pub fn sum_f64<F>(lo: u64, hi: u64, term: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    if lo > hi {
        return 0.0;
    }
    let len = hi - lo + 1;
    #[cfg(feature = "parallel")]
    if len >= PAR_MIN_LEN {
        let chunks = len.div_ceil(CHUNK);
        let partials: Vec<(f64, f64)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let a = lo + c * CHUNK;
                let b = hi.min(a + CHUNK - 1);
                (a..=b).map(&term).fold((0.0, 0.0), neumaier_fold)
            })
            .collect();
        // Combine in chunk order for a deterministic result.
        let (s, c) = partials
            .into_iter()
            .fold((0.0, 0.0), |acc, (s, c)| neumaier_fold(neumaier_fold(acc, s), c));
        return s + c;
    }
    let _ = len;
    sum_f64_seq(lo, hi, term)
}

/// Smallest k in `lo..=hi` with `pred(k)`, scanning in order.
pub fn first_match_seq<F>(lo: u64, hi: u64, pred: F) -> Option<u64>
where
    F: Fn(u64) -> bool,
{
    if lo > hi {
        return None;
    }
    (lo..=hi).find(|&k| pred(k))
}

/// Smallest k in `lo..=hi` with `pred(k)`.
///
/// Evaluates the predicate block by block, in parallel within a block, and
/// stops at the first block containing a hit; the answer is identical to the
/// sequential scan because the minimum inside the block is taken.
pub fn first_match<F>(lo: u64, hi: u64, pred: F) -> Option<u64>
where
    F: Fn(u64) -> bool + Sync,
{
    if lo > hi {
        return None;
    }
    #[cfg(feature = "parallel")]
    {
        let block = (4 * rayon::current_num_threads() as u64).max(8);
        if hi - lo + 1 >= 2 * block {
            let mut a = lo;
            while a <= hi {
                let b = hi.min(a + block - 1);
                let hit = (a..=b).into_par_iter().filter(|&k| pred(k)).min();
                if hit.is_some() {
                    return hit;
                }
                a = b + 1;
            }
            return None;
        }
    }
    first_match_seq(lo, hi, pred)
}

/// Count items of `lo..=hi` per bin, where `classify` picks a bin or skips.
pub fn histogram_u64_seq<F>(lo: u64, hi: u64, bins: usize, classify: F) -> Vec<u64>
where
    F: Fn(u64) -> Option<usize>,
{
    let mut counts = vec![0u64; bins];
    if lo > hi {
        return counts;
    }
    for v in lo..=hi {
        if let Some(b) = classify(v) {
            counts[b] += 1;
        }
    }
    counts
}

/// Count items per bin, merging per-chunk histograms when parallel.
pub fn histogram_u64<F>(lo: u64, hi: u64, bins: usize, classify: F) -> Vec<u64>
where
    F: Fn(u64) -> Option<usize> + Sync,
{
    if lo > hi {
        return vec![0u64; bins];
    }
    let len = hi - lo + 1;
    #[cfg(feature = "parallel")]
    if len >= PAR_MIN_LEN {
        let chunks = len.div_ceil(CHUNK);
        return (0..chunks)
            .into_par_iter()
            .map(|c| {
                let a = lo + c * CHUNK;
                let b = hi.min(a + CHUNK - 1);
                histogram_u64_seq(a, b, bins, &classify)
            })
            .reduce(
                || vec![0u64; bins],
                |mut acc, part| {
                    for (a, p) in acc.iter_mut().zip(part) {
                        *a += p;
                    }
                    acc
                },
            );
    }
    let _ = len;
    histogram_u64_seq(lo, hi, bins, classify)
}
