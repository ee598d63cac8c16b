//! Data-parallel execution with a sequential fallback.
//!
//! Every parallel kernel in the crate goes through these helpers. Work is cut
//! into chunks whose boundaries depend only on the problem size, and partial
//! results are combined in chunk order, so the answer never depends on the
//! number of worker threads (or on whether the `parallel` feature is on).

use std::ops::Range;

/// How a kernel distributes its chunks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon work stealing. Without the `parallel` feature this behaves
    /// exactly like [`Execution::Sequential`].
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

fn chunk_range(index: usize, chunk: usize, len: usize) -> Range<usize> {
    let start = index * chunk;
    start..(start + chunk).min(len)
}

/// Map `map` over `0..len` in chunks of `chunk` and fold the partial results
/// with the associative `reduce`.
pub fn map_reduce_chunks<T, I, M, R>(
    exec: Execution,
    len: usize,
    chunk: usize,
    identity: I,
    map: M,
    reduce: R,
) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    M: Fn(Range<usize>) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let chunks = len.div_ceil(chunk);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..chunks)
            .into_par_iter()
            .map(|c| map(chunk_range(c, chunk, len)))
            .reduce(&identity, &reduce);
    }
    let _ = exec;
    (0..chunks).fold(identity(), |acc, c| reduce(acc, map(chunk_range(c, chunk, len))))
}

/// Ordered `(0..len).map(f).collect()`.
pub fn map_collect<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Run `f` on a rayon pool capped at `threads` workers. Falls through to a
/// plain call when `threads` is `None` or the `parallel` feature is off.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            return pool.install(f);
        }
    }
    let _ = threads;
    f()
}
