//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) these dispatch to rayon unless
//! sequential execution was requested at runtime via [`set_parallel`].
//! Without the feature everything runs on the calling thread. Results are
//! always returned in input order, so outputs never depend on thread count.

use std::sync::atomic::{AtomicBool, Ordering};

static PARALLEL: AtomicBool = AtomicBool::new(true);

/// Enables or disables parallel execution for subsequent calls.
pub fn set_parallel(on: bool) {
    PARALLEL.store(on, Ordering::SeqCst);
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && PARALLEL.load(Ordering::SeqCst)
}

/// Ordered map over a slice.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// Ordered map over `0..n`.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

/// Ordered filter-map over `0..n` (indices as `u64`, for bitmask sweeps).
pub fn filter_map_range<R, F>(n: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().filter_map(f).collect();
        }
    }
    (0..n).filter_map(f).collect()
}

/// Returns the first item (in input order) for which `f` yields `Some`.
pub fn find_first<T, R, F>(items: &[T], f: F) -> Option<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() {
            use rayon::prelude::*;
            return items
                .par_iter()
                .enumerate()
                .filter_map(|(i, t)| f(t).map(|r| (i, r)))
                .min_by_key(|(i, _)| *i)
                .map(|(_, r)| r);
        }
    }
    items.iter().find_map(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_results_in_both_modes() {
        let v: Vec<u32> = (0..1000).collect();
        for on in [true, false] {
            set_parallel(on);
            let sq = map(&v, |x| x * x);
            assert_eq!(sq[999], 999 * 999);
            let odd = filter_map_range(10, |i| (i % 2 == 1).then_some(i));
            assert_eq!(odd, vec![1, 3, 5, 7, 9]);
            assert_eq!(find_first(&v, |x| (*x > 500).then_some(*x)), Some(501));
        }
        set_parallel(true);
    }
}
