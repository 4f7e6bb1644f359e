//! Execution strategy for the data-parallel loops in the crate.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] runs on
//! the rayon global pool. Without it every strategy degrades to a plain
//! sequential iterator, so callers never need to branch on the feature.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
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
    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// Maps `f` over `0..len`, preserving order.
    pub fn map_range<R, F>(self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..len).into_par_iter().map(f).collect(),
            _ => (0..len).map(f).collect(),
        }
    }

    /// Returns the first `Some` produced by `f` in index order, if any.
    pub fn find_first<R, F>(self, len: usize, f: F) -> Option<R>
    where
        R: Send,
        F: Fn(usize) -> Option<R> + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..len).into_par_iter().find_map_first(f),
            _ => (0..len).find_map(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = Execution::Sequential.map(&items, |x| x * x);
        let par = Execution::Parallel.map(&items, |x| x * x);
        assert_eq!(seq, par);
        let first = |i: usize| (i % 97 == 96).then_some(i);
        assert_eq!(
            Execution::Sequential.find_first(1000, first),
            Execution::Parallel.find_first(1000, first)
        );
    }
}
