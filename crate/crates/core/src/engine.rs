//! Sequential and master/worker drivers.
//!
//! Both drivers share [`master_iterate`], so the observable sequence of
//! callbacks is the same whichever way a problem runs. Folds are evaluated left
//! to right within a sublist and in ascending rank across partials; a run with
//! fixed `K` is therefore bitwise reproducible, and `K = 1` reproduces the
//! sequential fold exactly.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::codec::WireCodec;
use crate::config::{JobId, RunConfig};
use crate::context::{ExecutionContext, IterationInfo};
use crate::error::BsfError;
use crate::partition::partition_list;
use crate::problem::{build_map_list, build_map_sublist, job_implemented, validate, Job, Next, Problem};
use crate::protocol::{MasterTransport, OrderMessage, Peer, ResultMessage, TransportError, WorkerTransport};
use crate::reduce::{master_reduce, process_extended_reduce_list, worker_reduce, ExtendedReduceElement};

/// Monotonic time source, in seconds from an arbitrary origin.
pub trait Clock {
    fn now_seconds(&self) -> f64;
}

/// A clock that never advances. All reported times are zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_seconds(&self) -> f64 {
        0.0
    }
}

/// Receives trace lines and the parameter after each iteration.
pub trait RunObserver<T> {
    /// One line of output: parameters, iteration traces
    /// (`iter=<i> job=<j> <fields>`) and the final problem output.
    fn trace(&mut self, line: &str) {
        let _ = line;
    }

    /// Called on the master after every iteration with the new parameter.
    fn iterate(&mut self, iteration: u64, job: JobId, parameter: &T) {
        let _ = (iteration, job, parameter);
    }
}

impl<T> RunObserver<T> for () {}

impl<T> RunObserver<T> for Vec<String> {
    fn trace(&mut self, line: &str) {
        self.push(String::from(line));
    }
}

impl<T, O: RunObserver<T> + ?Sized> RunObserver<T> for &mut O {
    fn trace(&mut self, line: &str) {
        (**self).trace(line)
    }
    fn iterate(&mut self, iteration: u64, job: JobId, parameter: &T) {
        (**self).iterate(iteration, job, parameter)
    }
}

/// Runs the map over a sublist. Implementations may work concurrently but must
/// return results in input order.
pub trait MapExecutor {
    fn map_indexed<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SerialMap;

impl MapExecutor for SerialMap {
    fn map_indexed<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send,
    {
        items.iter().enumerate().map(|(i, item)| f(i, item)).collect()
    }
}

/// The fold of the last iteration, tagged with the job that produced it.
pub enum JobReduce<P: Problem> {
    Job0(ExtendedReduceElement<<P::Job0 as Job<P>>::Reduce>),
    Job1(ExtendedReduceElement<<P::Job1 as Job<P>>::Reduce>),
    Job2(ExtendedReduceElement<<P::Job2 as Job<P>>::Reduce>),
    Job3(ExtendedReduceElement<<P::Job3 as Job<P>>::Reduce>),
}

macro_rules! each_job_reduce {
    ($value:expr, $elem:ident => $body:expr) => {
        match $value {
            JobReduce::Job0($elem) => $body,
            JobReduce::Job1($elem) => $body,
            JobReduce::Job2($elem) => $body,
            JobReduce::Job3($elem) => $body,
        }
    };
}

impl<P: Problem> JobReduce<P> {
    fn empty(job: JobId) -> Self {
        match job.index() {
            0 => JobReduce::Job0(ExtendedReduceElement::empty()),
            1 => JobReduce::Job1(ExtendedReduceElement::empty()),
            2 => JobReduce::Job2(ExtendedReduceElement::empty()),
            _ => JobReduce::Job3(ExtendedReduceElement::empty()),
        }
    }

    pub fn job(&self) -> JobId {
        let index = match self {
            JobReduce::Job0(_) => 0,
            JobReduce::Job1(_) => 1,
            JobReduce::Job2(_) => 2,
            JobReduce::Job3(_) => 3,
        };
        JobId::new(index).expect("valid job index")
    }

    pub fn reduce_counter(&self) -> u64 {
        each_job_reduce!(self, e => e.reduce_counter())
    }

    pub fn is_empty(&self) -> bool {
        each_job_reduce!(self, e => e.is_empty())
    }

    /// The folded value in wire encoding.
    pub fn encoded_value(&self) -> Option<Vec<u8>> {
        each_job_reduce!(self, e => e.value().map(WireCodec::to_bytes))
    }

    pub fn job0(&self) -> Option<&ExtendedReduceElement<<P::Job0 as Job<P>>::Reduce>> {
        match self {
            JobReduce::Job0(e) => Some(e),
            _ => None,
        }
    }

    pub fn job1(&self) -> Option<&ExtendedReduceElement<<P::Job1 as Job<P>>::Reduce>> {
        match self {
            JobReduce::Job1(e) => Some(e),
            _ => None,
        }
    }

    pub fn job2(&self) -> Option<&ExtendedReduceElement<<P::Job2 as Job<P>>::Reduce>> {
        match self {
            JobReduce::Job2(e) => Some(e),
            _ => None,
        }
    }

    pub fn job3(&self) -> Option<&ExtendedReduceElement<<P::Job3 as Job<P>>::Reduce>> {
        match self {
            JobReduce::Job3(e) => Some(e),
            _ => None,
        }
    }

    fn problem_output(&self, problem: &P, parameter: &P::Parameter, elapsed: f64, precision: usize) -> Option<String> {
        match self {
            JobReduce::Job0(e) => <P::Job0 as Job<P>>::problem_output(
                problem,
                e.value(),
                e.reduce_counter(),
                parameter,
                elapsed,
                precision,
            ),
            JobReduce::Job1(e) => <P::Job1 as Job<P>>::problem_output(
                problem,
                e.value(),
                e.reduce_counter(),
                parameter,
                elapsed,
                precision,
            ),
            JobReduce::Job2(e) => <P::Job2 as Job<P>>::problem_output(
                problem,
                e.value(),
                e.reduce_counter(),
                parameter,
                elapsed,
                precision,
            ),
            JobReduce::Job3(e) => <P::Job3 as Job<P>>::problem_output(
                problem,
                e.value(),
                e.reduce_counter(),
                parameter,
                elapsed,
                precision,
            ),
        }
    }
}

impl<P: Problem> Clone for JobReduce<P> {
    fn clone(&self) -> Self {
        match self {
            JobReduce::Job0(e) => JobReduce::Job0(e.clone()),
            JobReduce::Job1(e) => JobReduce::Job1(e.clone()),
            JobReduce::Job2(e) => JobReduce::Job2(e.clone()),
            JobReduce::Job3(e) => JobReduce::Job3(e.clone()),
        }
    }
}

impl<P: Problem> PartialEq for JobReduce<P> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (JobReduce::Job0(a), JobReduce::Job0(b)) => a == b,
            (JobReduce::Job1(a), JobReduce::Job1(b)) => a == b,
            (JobReduce::Job2(a), JobReduce::Job2(b)) => a == b,
            (JobReduce::Job3(a), JobReduce::Job3(b)) => a == b,
            _ => false,
        }
    }
}

impl<P: Problem> fmt::Debug for JobReduce<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let job = self.job();
        each_job_reduce!(self, e => f.debug_tuple("JobReduce").field(&job).field(e).finish())
    }
}

pub struct RunOutcome<P: Problem> {
    pub final_parameter: P::Parameter,
    pub final_reduce: JobReduce<P>,
    pub iterations: u64,
    pub elapsed_seconds: f64,
    /// Job of the last iteration; `final_reduce` belongs to it.
    pub final_job_case: JobId,
}

impl<P: Problem> Clone for RunOutcome<P> {
    fn clone(&self) -> Self {
        RunOutcome {
            final_parameter: self.final_parameter.clone(),
            final_reduce: self.final_reduce.clone(),
            iterations: self.iterations,
            elapsed_seconds: self.elapsed_seconds,
            final_job_case: self.final_job_case,
        }
    }
}

impl<P: Problem> fmt::Debug for RunOutcome<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RunOutcome")
            .field("final_parameter", &self.final_parameter)
            .field("final_reduce", &self.final_reduce)
            .field("iterations", &self.iterations)
            .field("elapsed_seconds", &self.elapsed_seconds)
            .field("final_job_case", &self.final_job_case)
            .finish()
    }
}

/// What a worker did before it received the exit order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkerSummary {
    pub rank: usize,
    pub iterations: u64,
    pub address_offset: usize,
    pub sublist_length: usize,
}

/// Master-side iteration state.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterState<T> {
    pub parameter: T,
    pub job: JobId,
    pub iter_counter: u64,
    pub num_workers: usize,
}

impl<T> MasterState<T> {
    pub fn new(parameter: T, num_workers: usize) -> Self {
        MasterState {
            parameter,
            job: JobId::ZERO,
            iter_counter: 0,
            num_workers,
        }
    }

    fn info(&self) -> IterationInfo {
        IterationInfo {
            iter_counter: self.iter_counter,
            job_case: self.job,
            num_workers: self.num_workers,
        }
    }
}

/// Applies job `J`'s map to every element of `sublist`.
///
/// `ctx` describes the sublist; its `number_in_sublist` is set per element.
/// A `None` from the map becomes an element with counter 0.
pub fn worker_map<P, J, E>(
    problem: &P,
    sublist: &[P::MapElem],
    ctx: &ExecutionContext<'_, P::Parameter>,
    executor: &E,
) -> Vec<ExtendedReduceElement<J::Reduce>>
where
    P: Problem,
    J: Job<P>,
    E: MapExecutor,
{
    debug_assert_eq!(ctx.sublist_length(), sublist.len());
    executor.map_indexed(sublist, |t, elem| match J::map_f(problem, elem, &ctx.at(t)) {
        Some(value) => ExtendedReduceElement::counted(value),
        None => ExtendedReduceElement::empty(),
    })
}

/// Master work after the final fold of one iteration: process-results of the
/// running job, the iteration counter, the dispatcher, and iteration output.
///
/// Returns the exit flag. On return `state.job` is the job of the next
/// iteration, or the job that just ran when exiting.
pub fn master_iterate<P, J, O>(
    problem: &P,
    config: &RunConfig,
    state: &mut MasterState<P::Parameter>,
    reduce_result: &ExtendedReduceElement<J::Reduce>,
    elapsed_seconds: f64,
    observer: &mut O,
) -> Result<bool, BsfError>
where
    P: Problem,
    J: Job<P>,
    O: RunObserver<P::Parameter> + ?Sized,
{
    let ran = state.job;
    let info = state.info();
    let next = J::process_results(
        problem,
        reduce_result.value(),
        reduce_result.reduce_counter(),
        &mut state.parameter,
        &info,
    );
    let (mut next_job, mut exit) = match next {
        Next::Continue => (ran, false),
        Next::SwitchTo(job) => (job, false),
        Next::Exit => (ran, true),
    };
    state.iter_counter += 1;
    if config.max_job_case > JobId::ZERO {
        let info = state.info();
        problem.job_dispatcher(&mut state.parameter, &mut next_job, &mut exit, &info);
    }
    if !exit {
        check_job::<P>(next_job, config)?;
    }
    if config.iter_output && state.iter_counter % config.trace_count == 0 {
        let fields = J::iter_output(
            problem,
            reduce_result.value(),
            reduce_result.reduce_counter(),
            &state.parameter,
            elapsed_seconds,
            next_job,
            config.output_precision,
        );
        observer.trace(&trace_line(state.iter_counter, ran, &fields));
    }
    observer.iterate(state.iter_counter, ran, &state.parameter);
    if !exit {
        state.job = next_job;
    }
    Ok(exit)
}

fn trace_line(iteration: u64, job: JobId, fields: &str) -> String {
    if fields.is_empty() {
        format!("iter={iteration} job={job}")
    } else {
        format!("iter={iteration} job={job} {fields}")
    }
}

fn check_job<P: Problem>(job: JobId, config: &RunConfig) -> Result<(), BsfError> {
    if job > config.max_job_case {
        return Err(BsfError::JobOutOfRange {
            job,
            max_job_case: config.max_job_case,
        });
    }
    if !job_implemented::<P>(job) {
        return Err(BsfError::MissingJobImplementation { job });
    }
    Ok(())
}

// Calls `$func::<P, P::JobN>(args.., JobReduce::JobN)` for the job selected at
// run time.
macro_rules! per_job {
    ($job:expr, $P:ty, $func:ident :: < $($rest:tt),* > ( $($arg:expr),* $(,)? )) => {
        match $job.index() {
            0 => $func::<$P, <$P as Problem>::Job0, $($rest),*>($($arg,)* JobReduce::Job0),
            1 => $func::<$P, <$P as Problem>::Job1, $($rest),*>($($arg,)* JobReduce::Job1),
            2 => $func::<$P, <$P as Problem>::Job2, $($rest),*>($($arg,)* JobReduce::Job2),
            _ => $func::<$P, <$P as Problem>::Job3, $($rest),*>($($arg,)* JobReduce::Job3),
        }
    };
}

/// Prologue shared by both drivers: parameters output and the dispatcher run
/// that precedes the first iteration. Returns `true` if the dispatcher already
/// asked to stop.
fn start<P, O>(
    problem: &P,
    config: &RunConfig,
    state: &mut MasterState<P::Parameter>,
    observer: &mut O,
) -> Result<bool, BsfError>
where
    P: Problem,
    O: RunObserver<P::Parameter> + ?Sized,
{
    if let Some(line) = problem.parameters_output(&state.parameter, config.output_precision) {
        observer.trace(&line);
    }
    let mut exit = false;
    if config.max_job_case > JobId::ZERO {
        let mut job = state.job;
        let info = state.info();
        problem.job_dispatcher(&mut state.parameter, &mut job, &mut exit, &info);
        if !exit {
            check_job::<P>(job, config)?;
            state.job = job;
        }
    }
    Ok(exit)
}

fn finish<P, O>(
    problem: &P,
    config: &RunConfig,
    state: MasterState<P::Parameter>,
    final_reduce: JobReduce<P>,
    elapsed_seconds: f64,
    observer: &mut O,
) -> RunOutcome<P>
where
    P: Problem,
    O: RunObserver<P::Parameter> + ?Sized,
{
    if let Some(line) = final_reduce.problem_output(problem, &state.parameter, elapsed_seconds, config.output_precision)
    {
        observer.trace(&line);
    }
    RunOutcome {
        final_parameter: state.parameter,
        final_reduce,
        iterations: state.iter_counter,
        elapsed_seconds,
        final_job_case: state.job,
    }
}

/// Runs the whole algorithm in one context: map over the full list, fold,
/// process results, repeat until a stop.
pub fn run_sequential<P, C, O>(
    problem: &mut P,
    config: &RunConfig,
    clock: &C,
    observer: &mut O,
) -> Result<RunOutcome<P>, BsfError>
where
    P: Problem,
    C: Clock + ?Sized,
    O: RunObserver<P::Parameter> + ?Sized,
{
    if !problem.init() {
        return Err(BsfError::InitFailed);
    }
    let problem = &*problem;
    validate(
        problem,
        &RunConfig {
            num_workers: 1,
            ..config.clone()
        },
    )?;
    let started = clock.now_seconds();
    let list = build_map_list(problem);
    let mut state = MasterState::new(problem.init_parameter(), 1);
    if start(problem, config, &mut state, observer)? {
        let reduce = JobReduce::empty(state.job);
        return Ok(finish(
            problem,
            config,
            state,
            reduce,
            clock.now_seconds() - started,
            observer,
        ));
    }
    loop {
        if state.iter_counter >= config.max_iterations {
            return Err(BsfError::IterationLimitExceeded {
                limit: config.max_iterations,
            });
        }
        let (exit, reduce) = per_job!(
            state.job,
            P,
            sequential_step::<_, _>(problem, config, &list, &mut state, clock, started, &mut *observer)
        )?;
        if exit {
            return Ok(finish(
                problem,
                config,
                state,
                reduce,
                clock.now_seconds() - started,
                observer,
            ));
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn sequential_step<P, J, C, O>(
    problem: &P,
    config: &RunConfig,
    list: &[P::MapElem],
    state: &mut MasterState<P::Parameter>,
    clock: &C,
    started: f64,
    observer: &mut O,
    wrap: fn(ExtendedReduceElement<J::Reduce>) -> JobReduce<P>,
) -> Result<(bool, JobReduce<P>), BsfError>
where
    P: Problem,
    J: Job<P>,
    C: Clock + ?Sized,
    O: RunObserver<P::Parameter> + ?Sized,
{
    let reduce = {
        let ctx = ExecutionContext {
            address_offset: 0,
            iter_counter: state.iter_counter,
            job_case: state.job,
            rank: 0,
            number_in_sublist: 0,
            num_workers: 1,
            sublist_length: list.len(),
            parameter: &state.parameter,
        };
        let mapped = worker_map::<P, J, _>(problem, list, &ctx, &SerialMap);
        process_extended_reduce_list(mapped, |acc, y| J::reduce_into(problem, acc, y))
    };
    let exit = master_iterate::<P, J, O>(problem, config, state, &reduce, clock.now_seconds() - started, observer)?;
    Ok((exit, wrap(reduce)))
}

/// Master side of a parallel run over `transport`.
///
/// Each iteration broadcasts an order carrying the encoded parameter and the
/// job, gathers one partial fold per worker, folds them in rank order and calls
/// [`master_iterate`]. When the run stops (or fails after the workers are
/// up) an exit order is broadcast.
pub fn run_master<P, T, C, O>(
    problem: &mut P,
    config: &RunConfig,
    transport: &mut T,
    clock: &C,
    observer: &mut O,
) -> Result<RunOutcome<P>, BsfError>
where
    P: Problem,
    T: MasterTransport + ?Sized,
    C: Clock + ?Sized,
    O: RunObserver<P::Parameter> + ?Sized,
{
    let result = drive_master(problem, config, transport, clock, observer);
    if let Err(err) = &result {
        // Best effort: let healthy workers leave their loop.
        if !matches!(err, BsfError::Transport(_)) {
            let _ = transport.broadcast_order(&OrderMessage::exit());
        }
    }
    result
}

fn drive_master<P, T, C, O>(
    problem: &mut P,
    config: &RunConfig,
    transport: &mut T,
    clock: &C,
    observer: &mut O,
) -> Result<RunOutcome<P>, BsfError>
where
    P: Problem,
    T: MasterTransport + ?Sized,
    C: Clock + ?Sized,
    O: RunObserver<P::Parameter> + ?Sized,
{
    if transport.num_workers() != config.num_workers {
        return Err(BsfError::WorkerCountMismatch {
            transport: transport.num_workers(),
            config: config.num_workers,
        });
    }
    if !problem.init() {
        return Err(BsfError::InitFailed);
    }
    let problem = &*problem;
    validate(problem, config)?;
    partition_list(problem.list_size(), config.num_workers)?;
    let started = clock.now_seconds();
    let mut state = MasterState::new(problem.init_parameter(), config.num_workers);
    if start(problem, config, &mut state, observer)? {
        transport.broadcast_order(&OrderMessage::exit())?;
        let reduce = JobReduce::empty(state.job);
        return Ok(finish(
            problem,
            config,
            state,
            reduce,
            clock.now_seconds() - started,
            observer,
        ));
    }
    loop {
        if state.iter_counter >= config.max_iterations {
            return Err(BsfError::IterationLimitExceeded {
                limit: config.max_iterations,
            });
        }
        transport.broadcast_order(&OrderMessage {
            job_case: state.job,
            exit: false,
            parameter: state.parameter.to_bytes(),
        })?;
        let results = transport.gather_results()?;
        check_ranks(&results, config.num_workers)?;
        let (exit, reduce) = per_job!(
            state.job,
            P,
            master_step::<_, _>(problem, config, &results, &mut state, clock, started, &mut *observer)
        )?;
        if exit {
            transport.broadcast_order(&OrderMessage::exit())?;
            return Ok(finish(
                problem,
                config,
                state,
                reduce,
                clock.now_seconds() - started,
                observer,
            ));
        }
    }
}

fn check_ranks(results: &[ResultMessage], num_workers: usize) -> Result<(), BsfError> {
    if results.len() != num_workers {
        return Err(TransportError::Protocol {
            peer: Peer::Worker(results.len().min(num_workers.saturating_sub(1))),
            detail: format!("gathered {} results for {} workers", results.len(), num_workers),
        }
        .into());
    }
    for (rank, msg) in results.iter().enumerate() {
        if msg.worker_rank as usize != rank {
            return Err(TransportError::Protocol {
                peer: Peer::Worker(rank),
                detail: format!("result in slot {rank} claims rank {}", msg.worker_rank),
            }
            .into());
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn master_step<P, J, C, O>(
    problem: &P,
    config: &RunConfig,
    results: &[ResultMessage],
    state: &mut MasterState<P::Parameter>,
    clock: &C,
    started: f64,
    observer: &mut O,
    wrap: fn(ExtendedReduceElement<J::Reduce>) -> JobReduce<P>,
) -> Result<(bool, JobReduce<P>), BsfError>
where
    P: Problem,
    J: Job<P>,
    C: Clock + ?Sized,
    O: RunObserver<P::Parameter> + ?Sized,
{
    let partials = results
        .iter()
        .map(|msg| match (&msg.value, msg.reduce_counter) {
            (Some(bytes), counter) if counter != 0 => {
                J::Reduce::from_bytes(bytes).map(|value| ExtendedReduceElement::new(value, counter))
            }
            _ => Ok(ExtendedReduceElement::empty()),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let reduce = master_reduce(partials, |acc, y| J::reduce_into(problem, acc, y));
    let exit = master_iterate::<P, J, O>(problem, config, state, &reduce, clock.now_seconds() - started, observer)?;
    Ok((exit, wrap(reduce)))
}

/// Worker side of a parallel run: builds its own map-sublist, then maps and
/// folds once per order until the exit order arrives.
pub fn run_worker<P, T, E>(problem: &mut P, transport: &mut T, executor: &E) -> Result<WorkerSummary, BsfError>
where
    P: Problem,
    T: WorkerTransport + ?Sized,
    E: MapExecutor,
{
    if !problem.init() {
        return Err(BsfError::InitFailed);
    }
    let problem = &*problem;
    let rank = transport.rank();
    let num_workers = transport.num_workers();
    let partition = partition_list(problem.list_size(), num_workers)?;
    let (address_offset, sublist_length) = partition.assignments()[rank];
    let sublist = build_map_sublist(problem, address_offset, sublist_length);
    let mut iter_counter = 0u64;
    loop {
        let order = transport.receive_order()?;
        if order.exit {
            return Ok(WorkerSummary {
                rank,
                iterations: iter_counter,
                address_offset,
                sublist_length,
            });
        }
        if !job_implemented::<P>(order.job_case) {
            return Err(BsfError::MissingJobImplementation { job: order.job_case });
        }
        let parameter = P::Parameter::from_bytes(&order.parameter)?;
        let ctx = ExecutionContext {
            address_offset,
            iter_counter,
            job_case: order.job_case,
            rank,
            number_in_sublist: 0,
            num_workers,
            sublist_length,
            parameter: &parameter,
        };
        let result = per_job!(order.job_case, P, worker_step::<_>(problem, &sublist, &ctx, executor));
        transport.send_result(&result)?;
        iter_counter += 1;
    }
}

fn worker_step<P, J, E>(
    problem: &P,
    sublist: &[P::MapElem],
    ctx: &ExecutionContext<'_, P::Parameter>,
    executor: &E,
    _wrap: fn(ExtendedReduceElement<J::Reduce>) -> JobReduce<P>,
) -> ResultMessage
where
    P: Problem,
    J: Job<P>,
    E: MapExecutor,
{
    let mapped = worker_map::<P, J, E>(problem, sublist, ctx, executor);
    let partial = worker_reduce(mapped, |acc, y| J::reduce_into(problem, acc, y));
    ResultMessage {
        worker_rank: u32::try_from(ctx.rank()).expect("rank fits in u32"),
        reduce_counter: partial.reduce_counter(),
        value: partial.value().map(WireCodec::to_bytes),
    }
}
