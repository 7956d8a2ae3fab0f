//! Execution strategy for the data-parallel loops.
//!
//! Every parallel loop in the crate goes through these helpers. With the
//! `parallel` feature disabled, or with [`Execution::Sequential`], they run
//! as plain iterators. Results never depend on the strategy: searches return
//! the first hit in index order and maps preserve order.

/// How data-parallel loops are executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    /// Use the rayon thread pool when the `parallel` feature is enabled.
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// First `Some` produced by `f` over `0..len`, in index order.
pub(crate) fn find_map_first<T, F>(exec: Execution, len: usize, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().find_map_first(f);
    }
    let _ = exec;
    (0..len).find_map(f)
}

/// `(0..len).map(f).collect()`, order preserved.
pub(crate) fn map_collect<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Does `pred` hold for every index in `0..len`?
pub(crate) fn all<F>(exec: Execution, len: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    find_map_first(exec, len, |i| (!pred(i)).then_some(())).is_none()
}
