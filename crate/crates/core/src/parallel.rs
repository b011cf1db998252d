//! Independent trial execution, data-parallel when the `parallel` feature is
//! enabled and sequential otherwise.

/// How a batch of independent trials is executed. Results come back in
/// trial order either way, so aggregation never depends on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether `Parallel` actually runs on a thread pool in this build.
    pub const fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// `f(0), f(1), ..., f(count - 1)`, in order.
pub fn map_trials<T, F>(exec: Exec, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
        _ => (0..count).map(f).collect(),
    }
}
