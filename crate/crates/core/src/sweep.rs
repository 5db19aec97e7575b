//! Order-independent data-parallel evaluation for verification sweeps.

/// Environment variable consulted for the default worker count.
pub const WORKERS_ENV: &str = "LRCW_WORKERS";

/// Worker count from [`WORKERS_ENV`], defaulting to 1.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&w: &usize| w > 0)
        .unwrap_or(1)
}

/// Evaluates `f(0..n)` on up to `workers` threads. Item `i` goes to worker
/// `i % workers`; results come back in index order, so the output never
/// depends on the worker count.
pub fn map_indexed<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.clamp(1, n.max(1));
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    let mut parts: Vec<Vec<(usize, T)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let f = &f;
                scope.spawn(move || (w..n).step_by(workers).map(|i| (i, f(i))).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    for part in parts.iter_mut() {
        for (i, t) in part.drain(..) {
            out[i] = Some(t);
        }
    }
    out.into_iter().map(|t| t.expect("every index evaluated")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_stable() {
        let one = map_indexed(37, 1, |i| i * i);
        for w in [2, 3, 8, 100] {
            assert_eq!(map_indexed(37, w, |i| i * i), one);
        }
        assert!(map_indexed(0, 4, |i| i).is_empty());
    }
}
