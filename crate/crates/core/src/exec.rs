//! Data-parallel evaluation helper.
//!
//! Grid points and per-tenant searches are independent pure evaluations.
//! With the `parallel` feature they fan out across a rayon pool; results are
//! collected in input order either way, so reductions downstream see the
//! same sequence and produce identical minima and tie-breaks.

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}
