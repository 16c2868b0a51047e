use std::thread;

use orthocount_core::exec::Executor;

/// Scoped-thread executor: items are split into contiguous blocks, one per
/// worker, and results are concatenated in input order.
#[derive(Clone, Copy, Debug)]
pub struct Threads {
    n: usize,
}

impl Threads {
    pub fn new(n: usize) -> Self {
        Threads { n: n.max(1) }
    }

    /// Flag value, then `ORTHOCOUNT_WORKERS`, then the config value, then the
    /// available parallelism.
    pub fn resolve(flag: Option<usize>, config: Option<usize>) -> Result<Self, String> {
        if let Some(n) = flag {
            return Ok(Self::new(n));
        }
        if let Ok(v) = std::env::var("ORTHOCOUNT_WORKERS") {
            let n: usize = v.trim().parse().map_err(|_| format!("ORTHOCOUNT_WORKERS is not a positive integer: {v:?}"))?;
            if n == 0 {
                return Err("ORTHOCOUNT_WORKERS must be at least 1".into());
            }
            return Ok(Self::new(n));
        }
        if let Some(n) = config {
            return Ok(Self::new(n));
        }
        Ok(Self::new(thread::available_parallelism().map_or(1, |n| n.get())))
    }
}

impl Executor for Threads {
    fn map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(&self, items: &[T], f: F) -> Vec<R> {
        if self.n == 1 || items.len() < 2 {
            return items.iter().map(f).collect();
        }
        let block = items.len().div_ceil(self.n);
        let f = &f;
        thread::scope(|s| {
            let handles: Vec<_> = items.chunks(block).map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<R>>())).collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
        })
    }

    fn workers(&self) -> usize {
        self.n
    }
}
