//! The contract a user implements to run an iterative algorithm on the engine.
//!
//! A [`Problem`] owns the problem data and describes the map-list and the order
//! parameter. The per-iteration work is split into up to four [`Job`]
//! families; job 0 always exists and unused slots are filled with [`NoJob`].
//! Every job shares the problem's map element type but has its own reduce
//! element type.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Debug;

use crate::codec::WireCodec;
use crate::config::{JobId, RunConfig};
use crate::context::{ExecutionContext, IterationInfo};
use crate::error::BsfError;

/// What the master does after processing an iteration's reduce result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Next {
    /// Run the same job again.
    Continue,
    /// Run the given job in the next iteration.
    SwitchTo(JobId),
    /// Stop; the current parameter is the result.
    Exit,
}

pub trait Problem: Sized + Sync {
    /// Order parameters broadcast to every worker each iteration.
    type Parameter: Clone + PartialEq + Debug + WireCodec + Send + Sync;
    type MapElem: Send + Sync;

    type Job0: Job<Self>;
    type Job1: Job<Self>;
    type Job2: Job<Self>;
    type Job3: Job<Self>;

    /// Returns `false` if the problem could not be initialized.
    fn init(&mut self) -> bool {
        true
    }

    fn list_size(&self) -> usize;

    /// Builds map-list element `index` (0-based).
    fn map_list_elem(&self, index: usize) -> Self::MapElem;

    fn init_parameter(&self) -> Self::Parameter;

    /// Workflow state machine, run by the master before every iteration
    /// (after process-results of the previous one). It may rewrite the
    /// parameter, the next job and the exit flag. Only called when
    /// `max_job_case > 0`.
    fn job_dispatcher(&self, parameter: &mut Self::Parameter, job: &mut JobId, exit: &mut bool, info: &IterationInfo) {
        let _ = (parameter, job, exit, info);
    }

    /// Text emitted once before the first iteration.
    fn parameters_output(&self, parameter: &Self::Parameter, precision: usize) -> Option<String> {
        let _ = (parameter, precision);
        None
    }
}

/// One family of per-job callbacks.
///
/// The functions take the problem explicitly; jobs are type-level markers and
/// carry no state of their own.
pub trait Job<P: Problem> {
    type Reduce: Clone + Debug + PartialEq + WireCodec + Send + Sync;

    /// `false` only for [`NoJob`].
    const IMPLEMENTED: bool = true;

    /// Maps one element. `None` marks the result as ignored (counter 0).
    fn map_f(problem: &P, elem: &P::MapElem, ctx: &ExecutionContext<'_, P::Parameter>) -> Option<Self::Reduce>;

    /// `x ⊕ y`. Must be associative; the engine fixes the evaluation order.
    fn reduce_f(problem: &P, x: &Self::Reduce, y: &Self::Reduce) -> Self::Reduce;

    /// `acc = acc ⊕ y`. Override to avoid the allocation in [`Job::reduce_f`].
    fn reduce_into(problem: &P, acc: &mut Self::Reduce, y: &Self::Reduce) {
        *acc = Self::reduce_f(problem, acc, y);
    }

    /// Computes the next order parameter from the iteration's fold.
    ///
    /// `reduce` is `None` when every element was ignored, in which case
    /// `reduce_counter` is 0.
    fn process_results(
        problem: &P,
        reduce: Option<&Self::Reduce>,
        reduce_counter: u64,
        parameter: &mut P::Parameter,
        info: &IterationInfo,
    ) -> Next;

    /// Problem-defined fields of an iteration trace line.
    #[allow(clippy::too_many_arguments)]
    fn iter_output(
        problem: &P,
        reduce: Option<&Self::Reduce>,
        reduce_counter: u64,
        parameter: &P::Parameter,
        elapsed_seconds: f64,
        next_job: JobId,
        precision: usize,
    ) -> String {
        let _ = (
            problem,
            reduce,
            reduce_counter,
            parameter,
            elapsed_seconds,
            next_job,
            precision,
        );
        String::new()
    }

    /// Final report of a run that stopped in this job.
    fn problem_output(
        problem: &P,
        reduce: Option<&Self::Reduce>,
        reduce_counter: u64,
        parameter: &P::Parameter,
        elapsed_seconds: f64,
        precision: usize,
    ) -> Option<String> {
        let _ = (problem, reduce, reduce_counter, parameter, elapsed_seconds, precision);
        None
    }
}

/// Placeholder for unused job slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoJob {}

impl<P: Problem> Job<P> for NoJob {
    type Reduce = ();
    const IMPLEMENTED: bool = false;

    fn map_f(_: &P, _: &P::MapElem, _: &ExecutionContext<'_, P::Parameter>) -> Option<()> {
        unreachable!("map_f called on an unimplemented job")
    }

    fn reduce_f(_: &P, _: &(), _: &()) {
        unreachable!("reduce_f called on an unimplemented job")
    }

    fn process_results(_: &P, _: Option<&()>, _: u64, _: &mut P::Parameter, _: &IterationInfo) -> Next {
        unreachable!("process_results called on an unimplemented job")
    }
}

pub(crate) fn job_implemented<P: Problem>(job: JobId) -> bool {
    match job.index() {
        0 => <P::Job0 as Job<P>>::IMPLEMENTED,
        1 => <P::Job1 as Job<P>>::IMPLEMENTED,
        2 => <P::Job2 as Job<P>>::IMPLEMENTED,
        _ => <P::Job3 as Job<P>>::IMPLEMENTED,
    }
}

/// Checks a problem against a run configuration before any iteration starts.
pub fn validate<P: Problem>(problem: &P, config: &RunConfig) -> Result<(), BsfError> {
    config.check()?;
    for index in 0..=config.max_job_case.index() {
        let job = JobId::new(index).expect("max_job_case is a valid JobId");
        if !job_implemented::<P>(job) {
            return Err(BsfError::MissingJobImplementation { job });
        }
    }
    let list_size = problem.list_size();
    if list_size < config.num_workers {
        return Err(BsfError::ListTooShort {
            list_size,
            num_workers: config.num_workers,
        });
    }
    let parameter = problem.init_parameter();
    match P::Parameter::from_bytes(&parameter.to_bytes()) {
        Ok(decoded) if decoded == parameter => Ok(()),
        _ => Err(BsfError::CodecMismatch),
    }
}

/// The full map-list, element `i` built by `map_list_elem(i)`.
pub fn build_map_list<P: Problem>(problem: &P) -> Vec<P::MapElem> {
    build_map_sublist(problem, 0, problem.list_size())
}

pub(crate) fn build_map_sublist<P: Problem>(problem: &P, offset: usize, length: usize) -> Vec<P::MapElem> {
    (offset..offset + length).map(|i| problem.map_list_elem(i)).collect()
}
