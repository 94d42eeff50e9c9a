use core::fmt;

use crate::error::BsfError;

/// Index of a workflow job. Job 0 is the starting job; at most four exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct JobId(u8);

impl JobId {
    pub const ZERO: JobId = JobId(0);
    pub const MAX: JobId = JobId(3);

    pub const fn new(index: u8) -> Option<JobId> {
        if index <= Self::MAX.0 {
            Some(JobId(index))
        } else {
            None
        }
    }

    pub const fn index(self) -> u8 {
        self.0
    }
}

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Skeleton parameters of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Number of worker contexts `K`.
    pub num_workers: usize,
    /// Highest job number the workflow may use.
    pub max_job_case: JobId,
    /// Decimal digits for floats in trace output.
    pub output_precision: usize,
    /// Emit per-iteration output through the observer.
    pub iter_output: bool,
    /// Emit iteration output every `trace_count`-th iteration.
    pub trace_count: u64,
    /// Threads for the in-worker map; 0 means all available.
    pub intra_worker_threads: usize,
    pub intra_worker_parallel: bool,
    /// Runs that have not stopped after this many iterations fail.
    pub max_iterations: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            num_workers: 1,
            max_job_case: JobId::ZERO,
            output_precision: 4,
            iter_output: false,
            trace_count: 1,
            intra_worker_threads: 0,
            intra_worker_parallel: false,
            max_iterations: 1_000_000,
        }
    }
}

impl RunConfig {
    pub fn with_workers(num_workers: usize) -> Self {
        RunConfig {
            num_workers,
            ..RunConfig::default()
        }
    }

    pub fn check(&self) -> Result<(), BsfError> {
        if self.num_workers == 0 {
            return Err(BsfError::InvalidConfig("num_workers must be at least 1"));
        }
        if self.trace_count == 0 {
            return Err(BsfError::InvalidConfig("trace_count must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(BsfError::InvalidConfig("max_iterations must be at least 1"));
        }
        Ok(())
    }
}
