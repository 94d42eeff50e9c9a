use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::Mutex;
use std::thread;

use bsf_core::jacobi::{generate_diagonally_dominant_system, JacobiProblem, LinearSystem, SparseCoordinates};
use bsf_core::protocol::Peer;
use bsf_core::{
    run_master, run_sequential, run_worker, worker_map, BsfError, ExecutionContext, ExtendedReduceElement,
    IterationInfo, Job, JobId, MasterTransport, Next, NoClock, NoJob, OrderMessage, Problem, ResultMessage, RunConfig,
    RunObserver, SerialMap, TransportError, WireCodec, WorkerTransport,
};

// Plain channel transport; every order sent is also appended to `log`.
struct TestMaster {
    orders: Vec<Sender<OrderMessage>>,
    results: Vec<Receiver<ResultMessage>>,
    log: Vec<OrderMessage>,
}

struct TestWorker {
    rank: usize,
    k: usize,
    orders: Receiver<OrderMessage>,
    results: Sender<ResultMessage>,
}

fn links(k: usize) -> (TestMaster, Vec<TestWorker>) {
    let mut master = TestMaster {
        orders: vec![],
        results: vec![],
        log: vec![],
    };
    let mut workers = vec![];
    for rank in 0..k {
        let (otx, orx) = channel();
        let (rtx, rrx) = channel();
        master.orders.push(otx);
        master.results.push(rrx);
        workers.push(TestWorker {
            rank,
            k,
            orders: orx,
            results: rtx,
        });
    }
    (master, workers)
}

impl MasterTransport for TestMaster {
    fn num_workers(&self) -> usize {
        self.orders.len()
    }
    fn broadcast_order(&mut self, order: &OrderMessage) -> Result<(), TransportError> {
        self.log.push(order.clone());
        for (rank, tx) in self.orders.iter().enumerate() {
            tx.send(order.clone()).map_err(|_| TransportError::Disconnected {
                peer: Peer::Worker(rank),
            })?;
        }
        Ok(())
    }
    fn gather_results(&mut self) -> Result<Vec<ResultMessage>, TransportError> {
        self.results
            .iter()
            .enumerate()
            .map(|(rank, rx)| {
                rx.recv().map_err(|_| TransportError::Disconnected {
                    peer: Peer::Worker(rank),
                })
            })
            .collect()
    }
}

impl WorkerTransport for TestWorker {
    fn rank(&self) -> usize {
        self.rank
    }
    fn num_workers(&self) -> usize {
        self.k
    }
    fn receive_order(&mut self) -> Result<OrderMessage, TransportError> {
        self.orders
            .recv()
            .map_err(|_| TransportError::Disconnected { peer: Peer::Master })
    }
    fn send_result(&mut self, msg: &ResultMessage) -> Result<(), TransportError> {
        self.results
            .send(msg.clone())
            .map_err(|_| TransportError::Disconnected { peer: Peer::Master })
    }
}

fn run_farm<P: Problem + Clone + Send>(
    problem: &P,
    config: &RunConfig,
    observer: &mut dyn RunObserver<P::Parameter>,
) -> (Result<bsf_core::RunOutcome<P>, BsfError>, Vec<OrderMessage>) {
    let (mut master, workers) = links(config.num_workers);
    thread::scope(|s| {
        let handles: Vec<_> = workers
            .into_iter()
            .map(|mut w| {
                let mut p = problem.clone();
                s.spawn(move || run_worker(&mut p, &mut w, &SerialMap))
            })
            .collect();
        let mut p = problem.clone();
        let outcome = run_master(&mut p, config, &mut master, &NoClock, observer);
        let log = std::mem::take(&mut master.log);
        drop(master);
        for h in handles {
            let _ = h.join();
        }
        (outcome, log)
    })
}

#[derive(Default)]
struct Iterates(Vec<(u64, JobId, Vec<u8>)>);

impl<T: WireCodec> RunObserver<T> for Iterates {
    fn iterate(&mut self, iteration: u64, job: JobId, parameter: &T) {
        self.0.push((iteration, job, parameter.to_bytes()));
    }
}

fn example() -> LinearSystem {
    LinearSystem::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 4.0]).unwrap()
}

#[test]
fn sequential_jacobi_on_example() {
    let mut problem = JacobiProblem::new(&example(), 1e-18).unwrap();
    let out = run_sequential(&mut problem, &RunConfig::default(), &NoClock, &mut ()).unwrap();
    assert!((out.final_parameter.x[0] - 1.0).abs() < 1e-6);
    assert!((out.final_parameter.x[1] - 1.0).abs() < 1e-6);
    assert_eq!(out.final_reduce.reduce_counter(), 2);
    assert_eq!(out.final_job_case, JobId::ZERO);
}

#[test]
fn single_worker_matches_sequential_bitwise() {
    let problem = JacobiProblem::new(&example(), 1e-18).unwrap();
    let config = RunConfig::default();
    let mut seq = Iterates::default();
    let out_seq = run_sequential(&mut problem.clone(), &config, &NoClock, &mut seq).unwrap();
    let mut par = Iterates::default();
    let (out_par, _) = run_farm(&problem, &config, &mut par);
    let out_par = out_par.unwrap();
    assert_eq!(seq.0, par.0);
    assert_eq!(out_seq.iterations, out_par.iterations);
    assert_eq!(
        out_seq.final_reduce.encoded_value(),
        out_par.final_reduce.encoded_value()
    );
}

#[test]
fn partials_of_example_with_two_workers() {
    // One iteration from x = d: the workers hold F_x(1) = (0, -0.5) and
    // F_x(2) = (-2/3, 0); their fold is (-2/3, -0.5) with counter 2.
    let sys = example();
    let problem = JacobiProblem::new(&sys, 1e300).unwrap();
    let config = RunConfig::with_workers(2);
    let (out, log) = run_farm(&problem, &config, &mut ());
    let out = out.unwrap();
    assert_eq!(out.iterations, 1);
    let fold = out.final_reduce.job0().unwrap();
    assert_eq!(fold.reduce_counter(), 2);
    let s = fold.value().unwrap();
    assert_eq!(s[1], -0.5);
    assert!((s[0] + 2.0 / 3.0).abs() < 1e-15);
    assert!((out.final_parameter.x[0] - 5.0 / 6.0).abs() < 1e-15);
    assert!((out.final_parameter.x[1] - 5.0 / 6.0).abs() < 1e-15);
    // One order plus the terminal exit order.
    assert_eq!(log.len(), 2);
    assert!(!log[0].exit && log[1].exit);
}

#[test]
fn list_too_short_before_any_iteration() {
    let problem = JacobiProblem::new(&example(), 1e-18).unwrap();
    let (out, log) = run_farm(&problem, &RunConfig::with_workers(3), &mut ());
    assert_eq!(
        out.unwrap_err(),
        BsfError::ListTooShort {
            list_size: 2,
            num_workers: 3
        }
    );
    assert!(log.iter().all(|o| o.exit));
}

#[test]
fn bigger_farm_stays_close_to_sequential() {
    let sys = generate_diagonally_dominant_system(64, 3);
    let problem = JacobiProblem::new(&sys, 1e-18).unwrap();
    let seq = run_sequential(&mut problem.clone(), &RunConfig::default(), &NoClock, &mut ()).unwrap();
    for k in [2, 3, 8] {
        let (par, _) = run_farm(&problem, &RunConfig::with_workers(k), &mut ());
        let par = par.unwrap();
        assert_eq!(par.iterations, seq.iterations);
        for (a, b) in par.final_parameter.x.iter().zip(&seq.final_parameter.x) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()));
        }
    }
}

/// Fold value and counter handed to process-results.
type Seen = (Option<i64>, u64);

// A problem whose first iteration stops, with switchable failure modes.
#[derive(Clone)]
struct Scripted {
    size: usize,
    init_ok: bool,
    succeed: bool,
    stop_after: u64,
    seen: std::sync::Arc<Mutex<Vec<Seen>>>,
}

impl Scripted {
    fn new(size: usize) -> Self {
        Scripted {
            size,
            init_ok: true,
            succeed: true,
            stop_after: 1,
            seen: Default::default(),
        }
    }
}

struct Count;

impl Problem for Scripted {
    type Parameter = u64;
    type MapElem = i64;
    type Job0 = Count;
    type Job1 = NoJob;
    type Job2 = NoJob;
    type Job3 = NoJob;

    fn init(&mut self) -> bool {
        self.init_ok
    }
    fn list_size(&self) -> usize {
        self.size
    }
    fn map_list_elem(&self, index: usize) -> i64 {
        index as i64
    }
    fn init_parameter(&self) -> u64 {
        0
    }
}

impl Job<Scripted> for Count {
    type Reduce = i64;
    fn map_f(p: &Scripted, e: &i64, _: &ExecutionContext<'_, u64>) -> Option<i64> {
        p.succeed.then_some(*e)
    }
    fn reduce_f(_: &Scripted, x: &i64, y: &i64) -> i64 {
        x + y
    }
    fn process_results(p: &Scripted, r: Option<&i64>, counter: u64, param: &mut u64, info: &IterationInfo) -> Next {
        p.seen.lock().unwrap().push((r.copied(), counter));
        *param += 1;
        if info.iter_counter + 1 >= p.stop_after {
            Next::Exit
        } else {
            Next::Continue
        }
    }
}

#[test]
fn immediate_stop_runs_one_iteration() {
    let mut p = Scripted::new(5);
    let out = run_sequential(&mut p, &RunConfig::default(), &NoClock, &mut ()).unwrap();
    assert_eq!(out.iterations, 1);
    assert_eq!(out.final_parameter, 1);
    assert_eq!(*p.seen.lock().unwrap(), vec![(Some(10), 5)]);
}

#[test]
fn failed_init() {
    let mut p = Scripted::new(5);
    p.init_ok = false;
    assert_eq!(
        run_sequential(&mut p, &RunConfig::default(), &NoClock, &mut ()).unwrap_err(),
        BsfError::InitFailed
    );
    let (out, _) = run_farm(&p, &RunConfig::with_workers(2), &mut ());
    assert_eq!(out.unwrap_err(), BsfError::InitFailed);
}

#[test]
fn all_ignored_reaches_process_results_with_zero_counter() {
    let mut p = Scripted::new(4);
    p.succeed = false;
    run_sequential(&mut p, &RunConfig::default(), &NoClock, &mut ()).unwrap();
    let (out, _) = run_farm(&p, &RunConfig::with_workers(2), &mut ());
    let out = out.unwrap();
    assert!(out.final_reduce.is_empty());
    assert_eq!(*p.seen.lock().unwrap(), vec![(None, 0), (None, 0)]);
}

#[test]
fn iteration_limit() {
    let mut p = Scripted::new(3);
    p.stop_after = u64::MAX;
    let config = RunConfig {
        max_iterations: 7,
        ..RunConfig::default()
    };
    assert_eq!(
        run_sequential(&mut p, &config, &NoClock, &mut ()).unwrap_err(),
        BsfError::IterationLimitExceeded { limit: 7 }
    );
    let (out, log) = run_farm(
        &p,
        &RunConfig {
            num_workers: 3,
            ..config
        },
        &mut (),
    );
    assert_eq!(out.unwrap_err(), BsfError::IterationLimitExceeded { limit: 7 });
    // Workers are released with an exit order.
    assert_eq!(log.len(), 8);
    assert!(log.last().unwrap().exit);
}

#[test]
fn worker_map_marks_failures_and_positions() {
    let p = Scripted {
        succeed: false,
        ..Scripted::new(3)
    };
    let list = [4i64, 5, 6];
    let param = 0u64;
    let ctx = ExecutionContext::for_sublist(0, 3, 0, JobId::ZERO, 0, 1, &param);
    let out = worker_map::<Scripted, Count, _>(&p, &list, &ctx, &SerialMap);
    assert!(out.iter().all(|e| e.reduce_counter() == 0));

    let p = Scripted::new(3);
    let out = worker_map::<Scripted, Count, _>(&p, &list, &ctx, &SerialMap);
    assert_eq!(
        out,
        list.iter()
            .map(|v| ExtendedReduceElement::counted(*v))
            .collect::<Vec<_>>()
    );
}

// Map-only coordinates land at `address_offset + number_in_sublist`.
#[test]
fn map_only_placement_uses_skeleton_variables() {
    use bsf_core::jacobi::{map_f_coordinate, JacobiMapProblem, NextCoordinates};
    let sys = generate_diagonally_dominant_system(10, 1);
    let p = JacobiMapProblem::new(&sys, 1e-18).unwrap();
    let x = bsf_core::jacobi::JacobiParameter {
        x: p.data().d().to_vec(),
    };
    let sub: Vec<usize> = (4..7).collect();
    let ctx = ExecutionContext::for_sublist(4, 3, 0, JobId::ZERO, 1, 3, &x);
    let out = worker_map::<JacobiMapProblem, NextCoordinates, _>(&p, &sub, &ctx, &SerialMap);
    for (t, e) in out.iter().enumerate() {
        let expected = SparseCoordinates::single(4 + t, map_f_coordinate(4 + t, &x.x, p.data()));
        assert_eq!(e.value(), Some(&expected));
    }
}
