//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the work is spread over rayon's global pool
//! when the caller asks for it; without the feature, or with `parallel ==
//! false`, the same closures run in a plain loop. Output order is the input
//! order in every case.

/// `(0..n).filter_map(f)`, possibly in parallel.
pub(crate) fn filter_map_range<R, F>(n: u64, parallel: bool, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().filter_map(f).collect();
    }
    let _ = parallel;
    (0..n).filter_map(f).collect()
}

/// `items.into_iter().map(f)`, possibly in parallel.
pub(crate) fn map_vec<T, R, F>(items: Vec<T>, parallel: bool, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    let _ = parallel;
    items.into_iter().map(f).collect()
}

/// Whether this build can run anything in parallel.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}
