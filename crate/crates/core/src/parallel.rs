//! Slice-level parallelism on scoped std threads.
//!
//! Work items are independent and results are collected by index, so output
//! never depends on the thread count. The count comes from
//! [`set_threads`], else the `TCOMPLETE_THREADS` environment variable, else
//! the available parallelism.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

pub const THREADS_ENV: &str = "TCOMPLETE_THREADS";

static OVERRIDE: AtomicUsize = AtomicUsize::new(0);
static FROM_ENV: OnceLock<usize> = OnceLock::new();

/// Parses a thread-count setting; must be a positive integer.
pub fn parse_threads(s: &str) -> Option<usize> {
    s.trim().parse().ok().filter(|&n| n > 0)
}

/// Sets the worker count for the whole process; `0` restores the default.
pub fn set_threads(n: usize) {
    OVERRIDE.store(n, Ordering::Relaxed);
}

pub fn threads() -> usize {
    match OVERRIDE.load(Ordering::Relaxed) {
        0 => *FROM_ENV.get_or_init(|| {
            std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| parse_threads(&v))
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        }),
        n => n,
    }
}

/// `(0..count).map(f)` spread over [`threads`] workers.
pub fn par_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = threads().min(count);
    if workers <= 1 {
        return (0..count).map(f).collect();
    }
    let f = &f;
    let mut out: Vec<Option<T>> = (0..count).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..count)
                        .step_by(workers)
                        .map(|i| (i, f(i)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("worker thread panicked") {
                out[i] = Some(v);
            }
        }
    });
    out.into_iter()
        .map(|v| v.expect("every index computed"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_keep_index_order() {
        for n in [0, 1, 5, 17] {
            let v = par_map(n, |i| i * i);
            assert_eq!(v, (0..n).map(|i| i * i).collect::<Vec<_>>());
        }
    }

    #[test]
    fn parses_thread_counts() {
        assert_eq!(parse_threads(" 4 "), Some(4));
        assert_eq!(parse_threads("0"), None);
        assert_eq!(parse_threads("x"), None);
    }
}
