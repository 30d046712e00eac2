/// Strategy for evaluating `n` independent work items and folding the results.
///
/// Implementations must call `map` exactly once per index in `0..n` and
/// combine results with `reduce` in index order (any bracketing is allowed).
/// Every reduction used by this crate is associative, so the output is the
/// same for any degree of parallelism.
pub trait Executor: Sync {
    fn map_reduce<T, M, R>(&self, n: usize, identity: T, map: M, reduce: R) -> T
    where
        T: Send + Clone,
        M: Fn(usize) -> T + Sync,
        R: Fn(T, T) -> T + Sync;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_reduce<T, M, R>(&self, n: usize, identity: T, map: M, reduce: R) -> T
    where
        T: Send + Clone,
        M: Fn(usize) -> T + Sync,
        R: Fn(T, T) -> T + Sync,
    {
        (0..n).fold(identity, |acc, i| reduce(acc, map(i)))
    }
}
