//! Path-level data parallelism.
//!
//! Work is indexed by path; results come back in index order and are reduced
//! sequentially, so the worker count never changes a single bit of output.

/// How to spread independent path computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecPolicy {
    Sequential,
    /// Rayon work stealing over path indices. Falls back to sequential when
    /// the `parallel` feature is off.
    #[default]
    Parallel,
}

/// `(0..n).map(f)` in index order under the given policy.
pub fn map_indexed<T, F>(n: usize, policy: ExecPolicy, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match policy {
        ExecPolicy::Sequential => (0..n).map(f).collect(),
        ExecPolicy::Parallel => parallel_map(n, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Run `f` on a pool of `jobs` workers (`None` keeps the global pool).
#[cfg(feature = "parallel")]
pub fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match jobs {
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_jobs<R: Send>(_jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    f()
}

/// Pairwise (tree) summation in index order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if v.len() <= LEAF {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved_under_both_policies() {
        let s: Vec<usize> = map_indexed(1000, ExecPolicy::Sequential, |i| i * i);
        let p: Vec<usize> = with_jobs(Some(4), || map_indexed(1000, ExecPolicy::Parallel, |i| i * i));
        assert_eq!(s, p);
    }

    #[test]
    fn pairwise_sum_matches_exact_small_cases() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        let v: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 5050.0);
    }
}
