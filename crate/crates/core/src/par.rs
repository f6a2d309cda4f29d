//! Worker-pool helpers.
//!
//! Ensembles use `into_par_iter().map(..).collect()` over trajectory indices,
//! which preserves index order; any floating-point reduction happens
//! afterwards, sequentially. Together with per-trajectory RNG streams this
//! makes every result independent of the worker count.

use crate::{Error, Result};

/// Runs `f` on a dedicated pool of `workers` threads (`0` = rayon default).
pub fn with_workers<T, F>(workers: usize, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
