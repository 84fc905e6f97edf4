//! Order-preserving map over independent work items. With the `parallel`
//! feature the items run on a rayon pool of `jobs` threads; without it, or
//! with `jobs <= 1`, they run in sequence. Output order never depends on
//! scheduling.

#[cfg(feature = "parallel")]
pub fn par_map<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
        Err(e) => {
            log::warn!("could not start {jobs} worker threads ({e}); running sequentially");
            items.iter().map(f).collect()
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if jobs > 1 {
        log::debug!("built without the `parallel` feature; ignoring jobs = {jobs}");
    }
    items.iter().map(f).collect()
}

/// Whether this build can run work items concurrently.
pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
