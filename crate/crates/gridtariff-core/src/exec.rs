//! Switch between rayon data parallelism and a sequential fallback.
//!
//! With the `parallel` feature (on by default) the mapping helpers fan out
//! over the ambient rayon thread pool; without it they run sequentially.
//! Results are always collected in input order and reduced sequentially, so
//! output is bit-identical regardless of feature or thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving input order in the output.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Maps `f` over `items`, preserving input order in the output.
#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential twin of [`map_ordered`], available under either feature.
///
/// Exists so benchmarks and determinism tests can compare the parallel path
/// against a plain loop within one build.
pub fn map_ordered_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Runs `f` inside a thread pool limited to `jobs` worker threads.
///
/// With `jobs` unset, or without the `parallel` feature, `f` runs with the
/// ambient configuration. A limit of 1 gives fully sequential execution.
#[cfg(feature = "parallel")]
pub fn with_job_limit<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("failed to build thread pool")
            .install(f),
        None => f(),
    }
}

/// Runs `f` directly; the sequential build ignores the job limit.
#[cfg(not(feature = "parallel"))]
pub fn with_job_limit<R>(jobs: Option<usize>, f: impl FnOnce() -> R) -> R {
    let _ = jobs;
    f()
}
