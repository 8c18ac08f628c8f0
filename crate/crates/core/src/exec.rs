//! Order-preserving trial execution, parallel when the `parallel` feature is on.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Serial,
    /// `None` uses every available core.
    Parallel(Option<usize>),
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel(None)
        } else {
            Execution::Serial
        }
    }
}

impl Execution {
    /// `1` thread means serial.
    pub fn with_threads(threads: Option<usize>) -> Self {
        match threads {
            Some(1) => Execution::Serial,
            Some(0) | None => Execution::Parallel(None),
            t => Execution::Parallel(t),
        }
    }
}

/// `f(0), …, f(count − 1)`, in index order whatever the schedule.
pub fn map_trials<T, F>(count: usize, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match execution {
        Execution::Serial => (0..count).map(f).collect(),
        Execution::Parallel(threads) => parallel(count, threads, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel<T, F>(count: usize, threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..count).into_par_iter().map(&f).collect();
    match threads {
        None => run(),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel<T, F>(count: usize, _threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}
