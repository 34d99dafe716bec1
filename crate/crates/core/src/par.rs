//! Order-preserving map over slices: rayon when the `parallel` feature is
//! on, a plain iterator otherwise. Results always come back in input order,
//! so any reduction the caller performs afterwards is bit-deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Whether this build evaluates batches in parallel.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
