//! Bulk-synchronous farm engine.
//!
//! An iterative algorithm is described as a [`Problem`]: a map-list, an order
//! parameter broadcast to every worker, and up to four job families of
//! Map/Reduce/process-results callbacks. The engine runs it either in a single
//! context ([`run_sequential`]) or as one master driving `K` workers through a
//! [`MasterTransport`] / [`WorkerTransport`] pair ([`run_master`],
//! [`run_worker`]).
//!
//! The crate is `no_std` + `alloc`. Threads, sockets, clocks and files live in
//! the companion `bsf` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod codec;
pub mod config;
pub mod context;
pub mod engine;
mod error;
pub mod intsum;
pub mod jacobi;
pub mod partition;
pub mod problem;
pub mod protocol;
pub mod reduce;

pub use codec::{CodecError, WireCodec};
pub use config::{JobId, RunConfig};
pub use context::{ExecutionContext, IterationInfo};
pub use engine::{
    master_iterate, run_master, run_sequential, run_worker, worker_map, Clock, JobReduce, MapExecutor, NoClock,
    RunObserver, RunOutcome, SerialMap, WorkerSummary,
};
pub use error::BsfError;
pub use partition::{partition_list, Partition};
pub use problem::{build_map_list, validate, Job, Next, NoJob, Problem};
pub use protocol::{
    decode_frame, encode_frame, MasterTransport, MsgType, OrderMessage, ResultMessage, TransportError, WorkerTransport,
};
pub use reduce::{master_reduce, process_extended_reduce_list, worker_reduce, ExtendedReduceElement};
