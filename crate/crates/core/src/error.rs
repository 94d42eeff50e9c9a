use crate::codec::CodecError;
use crate::config::JobId;
use crate::protocol::TransportError;

/// Everything that can stop a run.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BsfError {
    #[error("ListTooShort: list of {list_size} elements cannot feed {num_workers} workers")]
    ListTooShort { list_size: usize, num_workers: usize },

    #[error("InitFailed: problem initialization reported failure")]
    InitFailed,

    #[error("IterationLimitExceeded: no stop after {limit} iterations")]
    IterationLimitExceeded { limit: u64 },

    #[error("MissingJobImplementation: job {job} is not implemented")]
    MissingJobImplementation { job: JobId },

    #[error("JobOutOfRange: job {job} exceeds max_job_case {max_job_case}")]
    JobOutOfRange { job: JobId, max_job_case: JobId },

    #[error("CodecMismatch: parameter does not survive an encode/decode round trip")]
    CodecMismatch,

    #[error("Codec: {0}")]
    Codec(#[from] CodecError),

    #[error("InvalidConfig: {0}")]
    InvalidConfig(&'static str),

    #[error("WorkerCountMismatch: transport connects {transport} workers, config expects {config}")]
    WorkerCountMismatch { transport: usize, config: usize },

    #[error("TransportFailure: {0}")]
    Transport(#[from] TransportError),
}
