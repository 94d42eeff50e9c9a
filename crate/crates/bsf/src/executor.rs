//! Intra-worker map executors.

use bsf_core::{BsfError, MapExecutor, RunConfig, SerialMap};
use rayon::prelude::*;

/// Maps a sublist on a private rayon pool, keeping input order.
pub struct ThreadedMap {
    pool: rayon::ThreadPool,
}

impl ThreadedMap {
    /// `threads == 0` sizes the pool to the available parallelism.
    pub fn new(threads: usize) -> Result<Self, BsfError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .thread_name(|i| format!("bsf-map-{i}"))
            .build()
            .map(|pool| ThreadedMap { pool })
            .map_err(|_| BsfError::InvalidConfig("could not start the intra-worker thread pool"))
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl MapExecutor for ThreadedMap {
    fn map_indexed<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send,
    {
        self.pool
            .install(|| items.par_iter().enumerate().map(|(i, item)| f(i, item)).collect())
    }
}

/// The executor a worker uses, chosen from the run configuration.
pub enum WorkerMap {
    Serial,
    Threaded(ThreadedMap),
}

impl WorkerMap {
    pub fn for_config(config: &RunConfig) -> Result<Self, BsfError> {
        if config.intra_worker_parallel {
            ThreadedMap::new(config.intra_worker_threads).map(WorkerMap::Threaded)
        } else {
            Ok(WorkerMap::Serial)
        }
    }
}

impl MapExecutor for WorkerMap {
    fn map_indexed<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send,
    {
        match self {
            WorkerMap::Serial => SerialMap.map_indexed(items, f),
            WorkerMap::Threaded(t) => t.map_indexed(items, f),
        }
    }
}
