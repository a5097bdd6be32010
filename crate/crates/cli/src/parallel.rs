//! Deterministic fan-out over independent work items.
//!
//! Results are always assembled in index order, so the number of worker
//! threads never changes any output byte. `PCNLS_THREADS` caps the worker
//! count; unset or invalid values fall back to the machine's parallelism.

/// Worker-thread cap from the environment, at least 1.
pub fn thread_cap() -> usize {
    std::env::var("PCNLS_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Applies `f` to `0..n`, returning results in index order.
///
/// Work is split into contiguous chunks, one per worker, so scheduling
/// cannot reorder or interleave results.
pub fn ordered_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = thread_cap().min(n).max(1);
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    let per = n.div_ceil(workers);
    let mut out = Vec::with_capacity(n);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                scope.spawn(move || {
                    let lo = w * per;
                    let hi = ((w + 1) * per).min(n);
                    (lo..hi).map(f).collect::<Vec<T>>()
                })
            })
            .collect();
        for handle in handles {
            out.extend(handle.join().expect("worker panicked"));
        }
    });
    out
}
