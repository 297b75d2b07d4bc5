//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature these run on the current rayon pool; without it
//! they are plain loops. Work is split into fixed-size chunks whose partial
//! results are combined left to right, so floating-point reductions give the
//! same bits for any thread count.

use std::ops::Range;

/// Number of items per work unit in [`map_reduce_chunks`].
pub const CHUNK: usize = 32;

/// Maps every index in `0..len` and collects the results in index order.
pub fn map_collect<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Folds `0..len` in chunks of [`CHUNK`] and reduces the chunk partials in
/// order.
///
/// `init` must produce the identity of `combine`. `fold` receives a fresh
/// accumulator from `init` and the index range
/// of one chunk; `combine` merges partials strictly left to right.
pub fn map_reduce_chunks<A, I, F, C>(len: usize, init: I, fold: F, combine: C) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(A, Range<usize>) -> A + Sync + Send,
    C: Fn(A, A) -> A,
{
    let n_chunks = len.div_ceil(CHUNK);
    let partials = map_collect(n_chunks, |c| {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(len);
        fold(init(), start..end)
    });
    partials.into_iter().fold(init(), combine)
}

/// Number of worker threads available to [`map_collect`].
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Runs `f` with at most `threads` workers. A no-op wrapper in sequential
/// builds.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_collect_keeps_order() {
        let v = map_collect(1000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }

    #[test]
    fn chunked_sum_is_thread_independent() {
        let xs: Vec<f64> = (0..10_000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let sum = |threads| {
            with_threads(threads, || {
                map_reduce_chunks(
                    xs.len(),
                    || 0.0,
                    |acc, r| acc + xs[r].iter().sum::<f64>(),
                    |a, b| a + b,
                )
            })
        };
        assert_eq!(sum(1).to_bits(), sum(7).to_bits());
    }

    #[test]
    fn empty_range() {
        let total = map_reduce_chunks(0, || 0usize, |a, r| a + r.len(), |a, b| a + b);
        assert_eq!(total, 0);
        let total = map_reduce_chunks(100, || 0usize, |a, r| a + r.len(), |a, b| a + b);
        assert_eq!(total, 100);
    }
}
