//! Std companion of `bsf-core`: in-process and TCP transports, threaded
//! runners, intra-worker parallel map, matrix files, benchmarking and the
//! `bsf` command-line tool.

#![forbid(unsafe_code)]

pub mod bench;
pub mod cli;
pub mod delay;
pub mod executor;
pub mod matrix_io;
pub mod runner;
pub mod transport;

pub use bench::{run_bench, BenchRecord, BenchReport};
pub use delay::Delayed;
pub use executor::{ThreadedMap, WorkerMap};
pub use runner::{run_inproc, run_sequential, run_tcp_master, run_tcp_worker, StdClock};
pub use transport::DEFAULT_TIMEOUT;
