//! Ready-made ways to execute a problem: sequentially, as a threaded farm in
//! one process, or as the master or a worker of a TCP farm.

use std::net::{TcpListener, ToSocketAddrs};
use std::thread;
use std::time::{Duration, Instant};

use bsf_core::protocol::Peer;
use bsf_core::{
    run_master, run_worker, BsfError, Clock, Problem, RunConfig, RunObserver, RunOutcome, TransportError,
    WorkerSummary, WorkerTransport,
};

use crate::executor::WorkerMap;
use crate::transport::{inproc_links, TcpMaster, TcpWorker};

/// Wall-clock seconds since construction.
#[derive(Debug, Clone, Copy)]
pub struct StdClock {
    start: Instant,
}

impl StdClock {
    pub fn start() -> Self {
        StdClock { start: Instant::now() }
    }
}

impl Clock for StdClock {
    fn now_seconds(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

/// Single-context run without workers or messages.
pub fn run_sequential<P, O>(problem: &mut P, config: &RunConfig, observer: &mut O) -> Result<RunOutcome<P>, BsfError>
where
    P: Problem,
    O: RunObserver<P::Parameter> + ?Sized,
{
    bsf_core::run_sequential(problem, config, &StdClock::start(), observer)
}

/// Master on the calling thread, `config.num_workers` workers on scoped
/// threads, each owning its own clone of `problem`.
pub fn run_inproc<P, O>(
    problem: &mut P,
    config: &RunConfig,
    timeout: Duration,
    observer: &mut O,
) -> Result<RunOutcome<P>, BsfError>
where
    P: Problem + Clone + Send,
    O: RunObserver<P::Parameter> + ?Sized,
{
    config.check()?;
    let (mut master, workers) = inproc_links(config.num_workers, timeout);
    let executors = (0..config.num_workers)
        .map(|_| WorkerMap::for_config(config))
        .collect::<Result<Vec<_>, _>>()?;
    let clones: Vec<P> = (0..config.num_workers).map(|_| problem.clone()).collect();

    thread::scope(|s| {
        let handles: Vec<_> = workers
            .into_iter()
            .zip(clones)
            .zip(executors)
            .map(|((mut link, mut p), exec)| {
                thread::Builder::new()
                    .name(format!("bsf-worker-{}", link.rank()))
                    .spawn_scoped(s, move || run_worker(&mut p, &mut link, &exec))
            })
            .collect();

        let outcome = match handles.iter().position(Result::is_err) {
            Some(rank) => Err(BsfError::Transport(TransportError::Io {
                peer: Peer::Worker(rank),
                detail: "could not spawn worker thread".into(),
            })),
            None => run_master(problem, config, &mut master, &StdClock::start(), observer),
        };
        // Closing the links releases any worker still waiting for an order.
        drop(master);
        let worker_error = join_workers(handles, outcome.is_err());
        match (outcome, worker_error) {
            (Err(e), _) => Err(e),
            (Ok(_), Some(e)) => Err(e),
            (Ok(o), None) => Ok(o),
        }
    })
}

fn join_workers(
    handles: Vec<std::io::Result<thread::ScopedJoinHandle<'_, Result<WorkerSummary, BsfError>>>>,
    master_failed: bool,
) -> Option<BsfError> {
    let mut first = None;
    for (rank, handle) in handles.into_iter().enumerate() {
        let Ok(handle) = handle else { continue };
        let err = match handle.join() {
            Ok(Ok(summary)) => {
                log::debug!("worker rank {rank} finished after {} iterations", summary.iterations);
                continue;
            }
            Ok(Err(e)) => e,
            Err(_) => BsfError::Transport(TransportError::Protocol {
                peer: Peer::Worker(rank),
                detail: "worker thread panicked".into(),
            }),
        };
        if master_failed {
            log::debug!("worker rank {rank} stopped: {err}");
        } else {
            log::warn!("worker rank {rank} failed: {err}");
        }
        first.get_or_insert(err);
    }
    first
}

/// Accepts `config.num_workers` TCP workers on `listener`, then runs the
/// master. `problem.list_size()` must be answerable before `init`, since
/// it is announced to workers while they connect.
pub fn run_tcp_master<P, O>(
    problem: &mut P,
    config: &RunConfig,
    listener: TcpListener,
    timeout: Duration,
    observer: &mut O,
) -> Result<RunOutcome<P>, BsfError>
where
    P: Problem,
    O: RunObserver<P::Parameter> + ?Sized,
{
    config.check()?;
    let mut master = TcpMaster::accept(listener, config.num_workers, problem.list_size() as u64, timeout)?;
    run_master(problem, config, &mut master, &StdClock::start(), observer)
}

/// Connects to a TCP master and serves orders until the exit order.
pub fn run_tcp_worker<P, A>(
    problem: &mut P,
    addr: A,
    timeout: Duration,
    executor: &WorkerMap,
) -> Result<WorkerSummary, BsfError>
where
    P: Problem,
    A: ToSocketAddrs,
{
    let mut link = TcpWorker::connect(addr, timeout)?;
    let local = problem.list_size() as u64;
    if link.list_size() != local {
        return Err(BsfError::Transport(TransportError::Protocol {
            peer: Peer::Master,
            detail: format!(
                "master announced a list of {} elements, this worker has {local}",
                link.list_size()
            ),
        }));
    }
    run_worker(problem, &mut link, executor)
}
