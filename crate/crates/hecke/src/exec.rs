//! Execution strategy for bulk computations.
//!
//! [`par_map`] distributes independent work items across threads when the
//! crate is built with the `parallel` feature (the default) and degrades to
//! a plain sequential loop otherwise. [`seq_map`] is always sequential and
//! serves as the comparison baseline for benchmarks.

/// Maps `f` over the items, in parallel when the `parallel` feature is on.
/// Results are returned in input order either way.
#[cfg(feature = "parallel")]
pub fn par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

/// Maps `f` over the items, in parallel when the `parallel` feature is on.
/// Results are returned in input order either way.
#[cfg(not(feature = "parallel"))]
pub fn par_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    items.into_iter().map(f).collect()
}

/// Maps `f` over the items one at a time, regardless of enabled features.
pub fn seq_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_preserve_order() {
        let items: Vec<u64> = (0..100).collect();
        let squared = |x: u64| x * x;
        assert_eq!(par_map(items.clone(), squared), seq_map(items, squared));
    }
}
