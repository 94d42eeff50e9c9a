use crate::config::JobId;

/// Read-only skeleton variables visible to a map callback.
///
/// Worker ranks are `0..num_workers`; the master's rank is `num_workers`.
#[derive(Debug, Clone, Copy)]
pub struct ExecutionContext<'a, T> {
    pub(crate) address_offset: usize,
    pub(crate) iter_counter: u64,
    pub(crate) job_case: JobId,
    pub(crate) rank: usize,
    pub(crate) number_in_sublist: usize,
    pub(crate) num_workers: usize,
    pub(crate) sublist_length: usize,
    pub(crate) parameter: &'a T,
}

impl<'a, T> ExecutionContext<'a, T> {
    /// Context for the first element of a sublist; the engine advances
    /// `number_in_sublist` while mapping.
    pub fn for_sublist(
        address_offset: usize,
        sublist_length: usize,
        iter_counter: u64,
        job_case: JobId,
        rank: usize,
        num_workers: usize,
        parameter: &'a T,
    ) -> Self {
        ExecutionContext {
            address_offset,
            iter_counter,
            job_case,
            rank,
            number_in_sublist: 0,
            num_workers,
            sublist_length,
            parameter,
        }
    }

    /// Global index of the first element of this worker's sublist.
    pub fn address_offset(&self) -> usize {
        self.address_offset
    }

    /// Iterations completed before the current one.
    pub fn iter_counter(&self) -> u64 {
        self.iter_counter
    }

    pub fn job_case(&self) -> JobId {
        self.job_case
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn master_rank(&self) -> usize {
        self.num_workers
    }

    /// Position of the element being mapped, relative to the sublist start.
    pub fn number_in_sublist(&self) -> usize {
        self.number_in_sublist
    }

    /// Global index of the element being mapped.
    pub fn global_index(&self) -> usize {
        self.address_offset + self.number_in_sublist
    }

    pub fn num_workers(&self) -> usize {
        self.num_workers
    }

    pub fn sublist_length(&self) -> usize {
        self.sublist_length
    }

    /// The order parameter of the current iteration.
    pub fn parameter(&self) -> &'a T {
        self.parameter
    }

    pub(crate) fn at(&self, number_in_sublist: usize) -> Self {
        ExecutionContext {
            number_in_sublist,
            ..*self
        }
    }
}

/// What master-side callbacks (process-results, dispatcher, output) can see.
///
/// These callbacks get the parameter separately as an owned working copy,
/// never the copy that was broadcast with the order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationInfo {
    /// Iterations completed so far.
    pub iter_counter: u64,
    /// Job of the iteration being processed (or about to start).
    pub job_case: JobId,
    pub num_workers: usize,
}
