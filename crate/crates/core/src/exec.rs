//! Order-preserving map over independent work items, data-parallel when the
//! `parallel` feature is enabled.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecMode {
    Sequential,
    /// Rayon pool; `threads = None` uses the global pool.
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Exec {
    pub mode: ExecMode,
    pub threads: Option<usize>,
}

impl Exec {
    pub fn sequential() -> Self {
        Self {
            mode: ExecMode::Sequential,
            threads: None,
        }
    }

    pub fn parallel(threads: Option<usize>) -> Self {
        Self {
            mode: ExecMode::Parallel,
            threads,
        }
    }

    /// `f(i)` for `i in 0..n`, results in index order regardless of scheduling.
    pub fn map<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Send + Sync,
    {
        match self.mode {
            ExecMode::Sequential => (0..n).map(f).collect(),
            ExecMode::Parallel => par_map(n, self.threads, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<R, F>(n: usize, threads: Option<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Send + Sync,
{
    use rayon::prelude::*;
    let run = || (0..n).into_par_iter().map(&f).collect();
    match threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(_) => (0..n).map(&f).collect(),
        },
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn par_map<R, F>(n: usize, _threads: Option<usize>, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Send + Sync,
{
    (0..n).map(f).collect()
}
