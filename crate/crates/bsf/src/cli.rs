//! Command-line front end: argument definitions, problem loading and the
//! `run`, `bench` and `worker` subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::time::Duration;

use bsf_core::intsum::IntSum;
use bsf_core::jacobi::{
    check_diagonal_dominance, generate_diagonally_dominant_system, JacobiError, JacobiMapProblem, JacobiParameter,
    JacobiProblem, LinearSystem,
};
use bsf_core::{BsfError, JobId, Problem, RunConfig, RunObserver};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{run_bench, BenchReport};
use crate::delay::Delayed;
use crate::executor::WorkerMap;
use crate::matrix_io::{read_system, MatrixFileError};
use crate::runner::{run_inproc, run_sequential, run_tcp_master, run_tcp_worker};

#[derive(Debug, Parser)]
#[command(
    name = "bsf",
    version,
    about = "Bulk synchronous farm runner for iterative map/reduce problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem, sequentially or on a farm of workers.
    Run(RunArgs),
    /// Time one problem over several worker counts and report speedups.
    Bench(BenchArgs),
    /// Serve a TCP master as one worker.
    Worker(WorkerArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemKind {
    /// Jacobi method, map scales columns and reduce adds them.
    Jacobi,
    /// Jacobi method, map computes whole coordinates.
    JacobiMap,
    /// Integer sum with wrapping arithmetic.
    Intsum,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Jacobi => "jacobi",
            ProblemKind::JacobiMap => "jacobi-map",
            ProblemKind::Intsum => "intsum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransportKind {
    Inproc,
    Tcp,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum, default_value_t = ProblemKind::Jacobi)]
    pub problem: ProblemKind,
    /// Linear system file (Jacobi problems only).
    #[arg(
        long,
        value_name = "FILE",
        conflicts_with = "generate",
        required_unless_present = "generate"
    )]
    pub matrix: Option<PathBuf>,
    /// Generate a problem of this size: system dimension or list length.
    #[arg(long, value_name = "N")]
    pub generate: Option<usize>,
    #[arg(long, value_name = "S", default_value_t = 1)]
    pub seed: u64,
    /// Stop threshold on the squared norm of the step.
    #[arg(long, value_name = "E", default_value_t = 1e-18)]
    pub eps: f64,
    /// Iterations of the integer-sum problem.
    #[arg(long, value_name = "R", default_value_t = 3)]
    pub rounds: u32,
    /// Benchmark fixture: sleep this long in every map call.
    #[arg(long, value_name = "D", default_value_t = 0)]
    pub map_delay_us: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ExecArgs {
    /// Map each sublist on T threads (0 = all cores).
    #[arg(long, value_name = "T")]
    pub intra_threads: Option<usize>,
    /// Seconds any receive may wait before the link is declared dead.
    #[arg(long, value_name = "SECS", default_value_t = 60.0)]
    pub timeout: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    #[arg(long, value_name = "M", default_value_t = 100_000)]
    pub max_iter: u64,
    /// Print a trace line per iteration.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, value_name = "k", default_value_t = 1)]
    pub trace_count: u64,
    #[arg(long, value_name = "p", default_value_t = 4)]
    pub precision: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub exec: ExecArgs,
    /// Number of workers; without it the run is sequential.
    #[arg(long, value_name = "K")]
    pub workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = TransportKind::Inproc)]
    pub transport: TransportKind,
    /// Address the TCP master listens on.
    #[arg(long, value_name = "ADDR")]
    pub listen: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub exec: ExecArgs,
    /// Worker counts to time, comma separated.
    #[arg(long, value_name = "a,b,c", value_delimiter = ',', required = true)]
    pub k_list: Vec<usize>,
    #[arg(long, value_enum, default_value_t = TransportKind::Inproc)]
    pub transport: TransportKind,
    /// Also write the table as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct WorkerArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub exec: ExecArgs,
    /// Master address.
    #[arg(long, value_name = "ADDR")]
    pub connect: String,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("Usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Matrix(#[from] MatrixFileError),
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
    #[error(transparent)]
    Engine(#[from] BsfError),
    #[error("Output: {0}")]
    Output(String),
}

impl CliError {
    /// Process exit status; distinct for every error case.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Output(_) => 3,
            CliError::Matrix(_) => 4,
            CliError::Jacobi(e) => match e {
                JacobiError::ZeroDiagonal { .. } => 10,
                JacobiError::DimensionMismatch { .. } => 11,
                JacobiError::InvalidEpsilon => 12,
                JacobiError::NotConverged { .. } => 13,
            },
            CliError::Engine(e) => match e {
                BsfError::ListTooShort { .. } => 20,
                BsfError::InitFailed => 21,
                BsfError::IterationLimitExceeded { .. } => 22,
                BsfError::MissingJobImplementation { .. } => 23,
                BsfError::JobOutOfRange { .. } => 24,
                BsfError::CodecMismatch => 25,
                BsfError::Codec(_) => 26,
                BsfError::InvalidConfig(_) => 27,
                BsfError::WorkerCountMismatch { .. } => 28,
                BsfError::Transport(_) => 30,
            },
        }
    }
}

/// Extra reporting a CLI problem offers on top of [`Problem`].
pub trait Reportable: Problem + Clone + Send {
    /// The approximate solution held by the parameter, if any.
    fn solution(parameter: &Self::Parameter) -> Option<&[f64]>;
}

impl Reportable for JacobiProblem {
    fn solution(parameter: &JacobiParameter) -> Option<&[f64]> {
        Some(&parameter.x)
    }
}

impl Reportable for JacobiMapProblem {
    fn solution(parameter: &JacobiParameter) -> Option<&[f64]> {
        Some(&parameter.x)
    }
}

impl Reportable for IntSum {
    fn solution(_: &Self::Parameter) -> Option<&[f64]> {
        None
    }
}

impl<P: Reportable> Reportable for Delayed<P> {
    fn solution(parameter: &P::Parameter) -> Option<&[f64]> {
        P::solution(parameter)
    }
}

pub enum AnyProblem {
    Jacobi(Delayed<JacobiProblem>),
    JacobiMap(Delayed<JacobiMapProblem>),
    IntSum(Delayed<IntSum>),
}

macro_rules! with_problem {
    ($any:expr, $p:pat => $body:expr) => {
        match $any {
            AnyProblem::Jacobi($p) => $body,
            AnyProblem::JacobiMap($p) => $body,
            AnyProblem::IntSum($p) => $body,
        }
    };
}

/// A problem instance built from command-line flags.
pub struct Workload {
    pub kind: ProblemKind,
    pub system: Option<LinearSystem>,
    pub problem: AnyProblem,
}

impl Workload {
    pub fn load(args: &ProblemArgs) -> Result<Self, CliError> {
        let delay = Duration::from_micros(args.map_delay_us);
        if args.problem == ProblemKind::Intsum {
            if args.matrix.is_some() {
                return Err(CliError::Usage(
                    "--problem intsum takes --generate, not --matrix".into(),
                ));
            }
            let len = args.generate.unwrap_or_default();
            return Ok(Workload {
                kind: args.problem,
                system: None,
                problem: AnyProblem::IntSum(Delayed::new(IntSum::generate(len, args.seed, args.rounds), delay)),
            });
        }

        let system = match (&args.matrix, args.generate) {
            (Some(path), _) => read_system(path)?,
            (None, Some(0)) => return Err(CliError::Usage("--generate needs a dimension of at least 1".into())),
            (None, Some(n)) => generate_diagonally_dominant_system(n, args.seed),
            (None, None) => return Err(CliError::Usage("one of --matrix or --generate is required".into())),
        };
        let dominance = check_diagonal_dominance(&system);
        if !dominance.guarantees_convergence() {
            log::warn!("matrix is not diagonally dominant; the iteration may diverge");
        }
        let problem = match args.problem {
            ProblemKind::Jacobi => AnyProblem::Jacobi(Delayed::new(JacobiProblem::new(&system, args.eps)?, delay)),
            ProblemKind::JacobiMap => {
                AnyProblem::JacobiMap(Delayed::new(JacobiMapProblem::new(&system, args.eps)?, delay))
            }
            ProblemKind::Intsum => unreachable!("handled above"),
        };
        Ok(Workload {
            kind: args.problem,
            system: Some(system),
            problem,
        })
    }

    pub fn size(&self) -> usize {
        with_problem!(&self.problem, p => p.list_size())
    }
}

fn solution_of<'a, P: Reportable>(_: &P, parameter: &'a P::Parameter) -> Option<&'a [f64]> {
    P::solution(parameter)
}

fn residual(system: Option<&LinearSystem>, x: Option<&[f64]>) -> Option<f64> {
    Some(system?.residual_inf_norm(x?))
}

fn timeout(exec: &ExecArgs) -> Result<Duration, CliError> {
    Duration::try_from_secs_f64(exec.timeout)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| {
            CliError::Usage(format!(
                "--timeout {} is not a positive number of seconds",
                exec.timeout
            ))
        })
}

fn run_config(engine: &EngineArgs, exec: &ExecArgs, workers: usize) -> RunConfig {
    RunConfig {
        num_workers: workers,
        max_job_case: JobId::ZERO,
        output_precision: engine.precision,
        iter_output: engine.trace,
        trace_count: engine.trace_count,
        intra_worker_threads: exec.intra_threads.unwrap_or(0),
        intra_worker_parallel: exec.intra_threads.is_some(),
        max_iterations: engine.max_iter,
    }
}

/// Writes every engine output line to the given sink.
pub struct LineSink<W: Write>(pub W);

impl<T, W: Write> RunObserver<T> for LineSink<W> {
    fn trace(&mut self, line: &str) {
        let _ = writeln!(self.0, "{line}");
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => run(&args),
        Command::Bench(args) => bench(&args),
        Command::Worker(args) => worker(&args),
    }
}

enum Mode {
    Sequential,
    Inproc,
    Tcp(TcpListener),
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    let workload = Workload::load(&args.problem)?;
    let timeout = timeout(&args.exec)?;
    let (mode, workers) = match (args.workers, args.transport) {
        (None, TransportKind::Inproc) => (Mode::Sequential, 1),
        (None, TransportKind::Tcp) => return Err(CliError::Usage("--transport tcp needs --workers".into())),
        (Some(k), TransportKind::Inproc) => (Mode::Inproc, k),
        (Some(k), TransportKind::Tcp) => {
            let addr = args
                .listen
                .as_deref()
                .ok_or_else(|| CliError::Usage("--transport tcp needs --listen ADDR".into()))?;
            let listener =
                TcpListener::bind(addr).map_err(|e| CliError::Usage(format!("cannot listen on {addr}: {e}")))?;
            let local = listener.local_addr().map_err(|e| CliError::Output(e.to_string()))?;
            eprintln!("listening on {local}");
            (Mode::Tcp(listener), k)
        }
    };
    let config = run_config(&args.engine, &args.exec, workers);
    let transport = match mode {
        Mode::Sequential => "sequential",
        Mode::Inproc => "inproc",
        Mode::Tcp(_) => "tcp",
    };

    let stdout = io::stdout().lock();
    let mut sink = LineSink(BufWriter::new(stdout));
    let _ = writeln!(
        sink.0,
        "problem={} n={} K={} transport={transport}",
        workload.kind.name(),
        workload.size(),
        if matches!(mode, Mode::Sequential) { 0 } else { workers },
    );
    let Workload { system, problem, .. } = workload;
    let (iterations, elapsed, residual) = with_problem!(problem, mut p => {
        let outcome = match mode {
            Mode::Sequential => run_sequential(&mut p, &config, &mut sink),
            Mode::Inproc => run_inproc(&mut p, &config, timeout, &mut sink),
            Mode::Tcp(listener) => run_tcp_master(&mut p, &config, listener, timeout, &mut sink),
        };
        let _ = sink.0.flush();
        let outcome = outcome?;
        let residual = residual(system.as_ref(), solution_of(&p, &outcome.final_parameter));
        (outcome.iterations, outcome.elapsed_seconds, residual)
    });
    let out = &mut sink.0;
    let _ = writeln!(out, "iterations={iterations}");
    let _ = writeln!(out, "elapsed_s={elapsed:.6}");
    if let Some(r) = residual {
        let _ = writeln!(out, "residual_inf={r:.6e}");
    }
    out.flush().map_err(|e| CliError::Output(e.to_string()))
}

fn bench(args: &BenchArgs) -> Result<(), CliError> {
    if args.transport == TransportKind::Tcp {
        return Err(CliError::Usage(
            "bench measures the inproc transport only; time tcp farms with `run`".into(),
        ));
    }
    let workload = Workload::load(&args.problem)?;
    let timeout = timeout(&args.exec)?;
    let config = run_config(&args.engine, &args.exec, 1);
    let variant = workload.kind.name();
    let report: BenchReport = with_problem!(&workload.problem, p => {
        run_bench(variant, p, &config, &args.k_list, timeout, |param| {
            residual(workload.system.as_ref(), solution_of(p, param))
        })?
    });
    print!("{}", report.table());
    if let Some(path) = &args.csv {
        let file = File::create(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        report
            .write_csv(BufWriter::new(file))
            .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn worker(args: &WorkerArgs) -> Result<(), CliError> {
    let workload = Workload::load(&args.problem)?;
    let timeout = timeout(&args.exec)?;
    let executor = WorkerMap::for_config(&run_config(
        &EngineArgs {
            max_iter: 1,
            trace: false,
            trace_count: 1,
            precision: 0,
        },
        &args.exec,
        1,
    ))?;
    let summary = with_problem!(workload.problem, mut p => {
        run_tcp_worker(&mut p, args.connect.as_str(), timeout, &executor)?
    });
    println!(
        "worker rank={} iterations={} offset={} length={}",
        summary.rank, summary.iterations, summary.address_offset, summary.sublist_length
    );
    Ok(())
}
