//! Index-ordered data-parallel maps.
//!
//! Results are always collected in index order, and every task derives its
//! randomness from its own key, so `Sequential` and `Parallel` produce
//! identical output. Without the `parallel` feature, `Parallel` runs
//! sequentially.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecPolicy {
    Sequential,
    #[default]
    Parallel,
}

impl ExecPolicy {
    /// Whether this policy actually fans out in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == ExecPolicy::Parallel
    }
}

/// `(0..len).map(f).collect()`, possibly in parallel.
pub fn map_indexed<T, F>(len: usize, policy: ExecPolicy, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = policy;
    (0..len).map(f).collect()
}

/// Like [`map_indexed`] but stops at the first error (by index).
pub fn try_map_indexed<T, E, F>(len: usize, policy: ExecPolicy, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indexed(len, policy, f).into_iter().collect()
}
