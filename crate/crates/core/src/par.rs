//! Order-preserving map over independent jobs.
//!
//! With the `parallel` feature and `jobs != 1` work runs on a rayon pool of
//! `jobs` threads (`0` lets rayon pick). Otherwise it runs in the caller's
//! thread. Results always come back in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if jobs != 1 && items.len() > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build();
        if let Ok(pool) = pool {
            return pool.install(|| items.par_iter().map(&f).collect());
        }
    }
    let _ = jobs;
    items.iter().map(f).collect()
}

/// Whether [`map`] can actually run concurrently in this build.
pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}
