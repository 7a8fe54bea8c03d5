//! Thin shims over the data-parallel inner loops. With the `parallel` feature
//! (the default) these run on rayon; without it they fall back to the
//! sequential implementations used by the benchmarks as a baseline.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
pub fn map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seq(items, f)
    }
}

/// Sequential version of [`map`], always available.
pub fn map_seq<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// First item (in input order) for which `f` returns `Some`.
pub fn find_map_first<T, U, F>(items: Vec<T>, f: F) -> Option<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> Option<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().filter_map(f).find_first(|_| true)
    }
    #[cfg(not(feature = "parallel"))]
    {
        find_map_first_seq(items, f)
    }
}

/// Sequential version of [`find_map_first`], always available.
#[cfg_attr(feature = "parallel", allow(dead_code))] // fallback path only
pub fn find_map_first_seq<T, U, F>(items: Vec<T>, f: F) -> Option<U>
where
    F: Fn(T) -> Option<U>,
{
    items.into_iter().find_map(f)
}
