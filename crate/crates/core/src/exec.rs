//! Replication- and grid-parallel execution.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool;
//! without it, or with [`Execution::Sequential`], everything runs on the
//! calling thread. Both paths return identical results for identical seeds:
//! shards own split generators and outputs are concatenated in shard order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::rng::SeededRng;

/// Default number of Monte Carlo shards.
pub const DEFAULT_SHARDS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this mode actually fans out to worker threads in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Order-preserving map over a slice.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Runs `reps` replications split over `shards` independent generators.
    pub fn replicate<T, F>(self, rng: &SeededRng, reps: usize, shards: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut SeededRng) -> T + Sync + Send,
    {
        let plan = shard_plan(reps, shards);
        let run = |(s, count): &(usize, usize)| -> Vec<T> {
            let mut r = rng.split(*s as u64);
            (0..*count).map(|_| f(&mut r)).collect()
        };
        self.map(&plan, run).into_iter().flatten().collect()
    }
}

/// `(shard index, replications)` pairs; remainders go to the first shards.
pub fn shard_plan(reps: usize, shards: usize) -> Vec<(usize, usize)> {
    let shards = shards.max(1);
    let base = reps / shards;
    let extra = reps % shards;
    (0..shards)
        .map(|s| (s, base + usize::from(s < extra)))
        .filter(|&(_, c)| c > 0)
        .collect()
}
