//! Data-parallel execution of independent work items.
//!
//! Trials, bisection probes, and sweep points are embarrassingly parallel.
//! [`map_indexed`] runs a closure over `0..n` and collects results in index
//! order; with the `parallel` feature (default) it fans out over a rayon
//! pool, otherwise it is a plain loop. [`map_indexed_seq`] is always
//! sequential and exists so the two paths can be compared directly (the
//! benches do exactly that). Because results are collected by index, both
//! paths produce identical output for a pure closure.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, results in index order. Parallel when the
/// `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..n`, results in index order. Parallel when the
/// `parallel` feature is enabled.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    map_indexed_seq(n, f)
}

/// Sequential fallback with the same contract as [`map_indexed`].
pub fn map_indexed_seq<T, F>(n: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..n).map(f).collect()
}

/// Caps the rayon worker pool. Call once, before any parallel work. Without
/// the `parallel` feature this is a no-op.
pub fn configure_workers(jobs: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(j) = jobs {
        // Ignore the error from setting the pool twice; tests may race here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree() {
        let f = |i: u64| {
            let mut acc = i;
            for _ in 0..100 {
                acc = acc.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            }
            acc
        };
        assert_eq!(map_indexed(257, f), map_indexed_seq(257, f));
    }
}
