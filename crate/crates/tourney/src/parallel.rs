use rayon::prelude::*;
use tourney_core::Executor;

/// [`Executor`] backed by the global Rayon pool.
///
/// Rayon's `reduce` keeps index order, so with the associative reductions
/// used by the core crate the output equals [`tourney_core::Sequential`]'s.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn map_reduce<T, M, R>(&self, n: usize, identity: T, map: M, reduce: R) -> T
    where
        T: Send + Clone,
        M: Fn(usize) -> T + Sync,
        R: Fn(T, T) -> T + Sync,
    {
        match (0..n).into_par_iter().map(&map).reduce_with(&reduce) {
            Some(r) => reduce(identity, r),
            None => identity,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tourney_core::Sequential;

    #[test]
    fn matches_sequential() {
        let map = |i: usize| (i as f64 * 0.1).sin();
        let a = Rayon.map_reduce(10_000, f64::NEG_INFINITY, map, f64::max);
        let b = Sequential.map_reduce(10_000, f64::NEG_INFINITY, map, f64::max);
        assert_eq!(a.to_bits(), b.to_bits());
        let c = Rayon.map_reduce(
            1000,
            Vec::new(),
            |i| vec![i],
            |mut x, y| {
                x.extend(y);
                x
            },
        );
        assert_eq!(c, (0..1000).collect::<Vec<_>>());
    }
}
