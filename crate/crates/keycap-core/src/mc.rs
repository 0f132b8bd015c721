//! Deterministic Monte Carlo plumbing: index-parallel evaluation and
//! order-stable summation.
//!
//! Estimators in this crate map a sample index to a pure per-sample value;
//! this module evaluates those maps across threads and reduces them so that
//! the result is bitwise identical for any worker count. Two ingredients make
//! that work: every index is computed independently of every other (keyed
//! RNG, no shared stream), and sums are always taken pairwise over the
//! index-ordered buffer rather than in thread-completion order.

use crate::Real;

/// Evaluate `f(0..n)` into an index-ordered buffer using `workers` threads.
///
/// Indices are split into contiguous chunks, one per worker; each worker
/// writes into its own disjoint slice. Because `f` is pure in the index, the
/// buffer content does not depend on `workers`.
pub fn indexed_values<F>(n: u64, workers: usize, f: F) -> Vec<Real>
where
    F: Fn(u64) -> Real + Sync,
{
    let n_usize = usize::try_from(n).expect("sample count fits in memory");
    let mut out = vec![0.0; n_usize];
    let workers = workers.max(1).min(n_usize.max(1));
    if workers <= 1 {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = f(i as u64);
        }
        return out;
    }
    let chunk = n_usize.div_ceil(workers);
    std::thread::scope(|scope| {
        let mut rest: &mut [Real] = &mut out;
        let mut start = 0u64;
        let f = &f;
        while !rest.is_empty() {
            let take = chunk.min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            let base = start;
            scope.spawn(move || {
                for (offset, slot) in head.iter_mut().enumerate() {
                    *slot = f(base + offset as u64);
                }
            });
            start += take as u64;
            rest = tail;
        }
    });
    out
}

/// Sum by recursive halving; associativity order depends only on the slice
/// length, giving both reproducibility and O(log n) error growth.
pub fn pairwise_sum(values: &[Real]) -> Real {
    if values.len() <= 32 {
        let mut s = 0.0;
        for v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sample mean and standard error of the mean.
///
/// Uses a two-pass estimate (pairwise sums in both passes); the standard
/// error is `sqrt(sample_variance / n)` and is 0 for a single sample.
pub fn mean_and_stderr(values: &[Real]) -> (Real, Real) {
    assert!(!values.is_empty(), "mean of an empty sample is undefined");
    let n = values.len() as Real;
    let mean = pairwise_sum(values) / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<Real> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
