//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) work is distributed by rayon;
//! without it the same closures run in order on the calling thread. Results
//! are always returned in index order, so callers that reduce them in a
//! fixed order get identical output either way.

pub use internal::*;

#[cfg(feature = "parallel")]
mod internal {
    use rayon::prelude::*;

    /// Map `f` over `0..n`, collecting results in index order.
    pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Send + Sync,
    {
        (0..n).into_par_iter().map(f).collect()
    }

    pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Send + Sync,
    {
        items.par_iter().map(f).collect()
    }

    /// Map `f` over consecutive chunks of `items`. Chunk boundaries depend
    /// only on `chunk`, never on the thread count.
    pub fn map_chunks<S, T, F>(items: &[S], chunk: usize, f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&[S]) -> T + Send + Sync,
    {
        items.par_chunks(chunk.max(1)).map(f).collect()
    }

    pub fn is_parallel() -> bool {
        true
    }
}

#[cfg(not(feature = "parallel"))]
mod internal {
    pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
    where
        F: Fn(usize) -> T,
    {
        (0..n).map(f).collect()
    }

    pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
    where
        F: Fn(&S) -> T,
    {
        items.iter().map(f).collect()
    }

    pub fn map_chunks<S, T, F>(items: &[S], chunk: usize, f: F) -> Vec<T>
    where
        F: Fn(&[S]) -> T,
    {
        items.chunks(chunk.max(1)).map(f).collect()
    }

    pub fn is_parallel() -> bool {
        false
    }
}
