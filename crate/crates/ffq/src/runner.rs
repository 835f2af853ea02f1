//! A [`ChunkRunner`] that spreads index ranges over scoped threads.

use std::ops::Range;

use ffq_core::equidist::{merge_histograms, ChunkRunner, Histogram};
use ffq_core::Result;

use crate::error::{CliError, CliResult};

/// Ranges shorter than this per worker run in the calling thread.
const MIN_CHUNK: u64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Threads {
    workers: usize,
}

impl Threads {
    pub fn new(workers: usize) -> Self {
        Threads { workers: workers.max(1) }
    }

    /// Worker count from `FFQ_THREADS`, else the available parallelism.
    pub fn from_env() -> CliResult<Self> {
        match std::env::var("FFQ_THREADS") {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n >= 1 => Ok(Self::new(n)),
                _ => Err(CliError::Usage(format!("FFQ_THREADS must be a positive integer, got \"{v}\""))),
            },
            Err(_) => Ok(Self::new(std::thread::available_parallelism().map_or(1, |n| n.get()))),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }
}

impl ChunkRunner for Threads {
    fn map_reduce(&self, total: u64, job: &(dyn Fn(Range<u64>) -> Result<Histogram> + Sync)) -> Result<Histogram> {
        let n = (self.workers as u64).min(total / MIN_CHUNK).max(1);
        if n == 1 {
            return job(0..total);
        }
        let step = total.div_ceil(n);
        let parts: Vec<Result<Histogram>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..n)
                .map(|i| {
                    let r = i * step..((i + 1) * step).min(total);
                    s.spawn(move || job(r))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker thread panicked")).collect()
        });
        let mut out = Histogram::new();
        for p in parts {
            merge_histograms(&mut out, p?);
        }
        Ok(out)
    }
}
