//! Serial/parallel dispatch for the data-parallel inner loops.
//!
//! Every parallel path collects results in input order and reduces them
//! serially, so `Serial` and `Parallel` produce bit-identical output. Without
//! the `parallel` feature both variants run serially.

/// Chunk length used for reductions over amplitude arrays.
pub const REDUCE_CHUNK: usize = 1024;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Order-preserving map over a slice.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Order-preserving map over `0..n`.
    pub fn map_range<U, F>(self, n: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Fixed-chunk sum of `f(i)` over `0..n`; the summation tree does not
    /// depend on the thread count.
    pub fn chunked_sum<T, F>(self, n: usize, f: F) -> T
    where
        T: Send + std::iter::Sum<T>,
        F: Fn(usize) -> T + Sync + Send,
    {
        let chunks = n.div_ceil(REDUCE_CHUNK);
        let partial = self.map_range(chunks, |c| {
            let lo = c * REDUCE_CHUNK;
            let hi = (lo + REDUCE_CHUNK).min(n);
            (lo..hi).map(&f).sum::<T>()
        });
        partial.into_iter().sum()
    }

    /// Mutable, index-aware traversal of a slice.
    pub fn for_each_mut<T, F>(self, items: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            items.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
            return;
        }
        items.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }
}
