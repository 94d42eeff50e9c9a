//! Concrete links for the master/worker star: in-process channels and TCP.
//!
//! Both carry the same byte frames, so a run behaves identically on either.

pub mod inproc;
pub mod tcp;

use std::time::Duration;

use bsf_core::protocol::{decode_frame, Peer};
use bsf_core::{OrderMessage, ResultMessage, TransportError};

pub use inproc::{inproc_links, InprocMaster, InprocWorker};
pub use tcp::{TcpMaster, TcpWorker};

/// How long any single receive may block before the link is declared dead.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

pub(crate) fn parse_order(peer: Peer, frame: &[u8]) -> Result<OrderMessage, TransportError> {
    decode_frame(frame)
        .and_then(|(ty, payload)| OrderMessage::from_frame(ty, payload))
        .map_err(|error| TransportError::Malformed { peer, error })
}

pub(crate) fn parse_result(peer: Peer, frame: &[u8]) -> Result<ResultMessage, TransportError> {
    decode_frame(frame)
        .and_then(|(ty, payload)| ResultMessage::from_frame(ty, payload))
        .map_err(|error| TransportError::Malformed { peer, error })
}
