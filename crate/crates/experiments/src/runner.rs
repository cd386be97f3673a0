//! Replica fan-out on a bounded worker pool with a wall-time budget.

use std::cell::Cell;
use std::time::{Duration, Instant};

use lpp_core::montecarlo::run_replicas;
use lpp_core::RngStream;

use crate::error::{config_error, Result};

/// Replicas are launched in chunks of this size; the budget is checked
/// between chunks, so a truncated run always stops on a chunk boundary.
const CHUNK: usize = 16;

pub struct Runner {
    pool: rayon::ThreadPool,
    deadline: Option<Instant>,
    truncated: Cell<bool>,
}

impl Runner {
    /// `jobs = 0` uses every available core.
    pub fn new(jobs: usize, budget: Option<Duration>) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| config_error("jobs", e.to_string()))?;
        Ok(Runner {
            pool,
            deadline: budget.map(|b| Instant::now() + b),
            truncated: Cell::new(false),
        })
    }

    /// Whether any call so far stopped early on the budget.
    pub fn truncated(&self) -> bool {
        self.truncated.get()
    }

    /// Runs replicas `0..reps` of `f` and returns their results in replica
    /// order. Replica `i` always sees the same substream of `base`.
    pub fn replicate<R, F>(&self, base: RngStream, reps: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(RngStream) -> R + Sync,
    {
        let mut out = Vec::with_capacity(reps);
        let mut start = 0;
        while start < reps {
            if self.deadline.is_some_and(|d| Instant::now() >= d) {
                self.truncated.set(true);
                break;
            }
            let end = (start + CHUNK).min(reps);
            out.extend(self.pool.install(|| run_replicas(base, start..end, |_, s| f(s))));
            start = end;
        }
        out
    }
}
