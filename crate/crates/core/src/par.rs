//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature these dispatch to rayon; without it, or when a
//! caller asks for [`Exec::Sequential`], they run on the calling thread.

/// Execution strategy for grid scans and amplitude kernels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Below this many elements the kernels stay sequential.
const MIN_PAR_LEN: usize = 1 << 12;

/// `f(i, &mut v[i])` for every index.
pub fn for_each_indexed<T, F>(exec: Exec, v: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && v.len() >= MIN_PAR_LEN {
        use rayon::prelude::*;
        v.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
        return;
    }
    let _ = exec;
    v.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
}

/// `Σ f(i)` over `0..n`.
///
/// Partial sums are taken over fixed chunks and combined in order, so the
/// result is bit-identical whatever the thread count.
pub fn sum_range<F>(exec: Exec, n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = n.div_ceil(MIN_PAR_LEN);
    let chunk_sum = |k: usize| {
        let end = ((k + 1) * MIN_PAR_LEN).min(n);
        (k * MIN_PAR_LEN..end).map(&f).sum::<f64>()
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && chunks > 1 {
        use rayon::prelude::*;
        let parts: Vec<f64> = (0..chunks).into_par_iter().map(chunk_sum).collect();
        return parts.into_iter().sum();
    }
    let _ = exec;
    (0..chunks).map(chunk_sum).sum()
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}
