//! Master/worker wire protocol.
//!
//! Every message travels in a frame:
//!
//! ```text
//! [length: u32 LE][msg_type: u8][payload]      length = 1 + payload.len()
//! ```
//!
//! | type | name   | payload                                                     |
//! |------|--------|-------------------------------------------------------------|
//! | 0x01 | ORDER  | `[job_case: u8][exit: u8][parameter bytes]`                 |
//! | 0x02 | RESULT | `[worker_rank: u32 LE][reduce_counter: u64 LE][value bytes]` |
//! | 0x03 | EXIT   | `[0x01]`                                                    |
//!
//! RESULT value bytes are present iff `reduce_counter != 0`. The terminal
//! exit order is sent as an EXIT frame; an ORDER frame with its exit byte set
//! is read the same way.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::config::JobId;

pub const FRAME_HEADER_LEN: usize = 4;

/// Largest `length` field accepted from a peer.
pub const MAX_FRAME_LEN: u32 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    Order = 0x01,
    Result = 0x02,
    Exit = 0x03,
}

impl MsgType {
    pub fn from_byte(byte: u8) -> Result<MsgType, FrameError> {
        match byte {
            0x01 => Ok(MsgType::Order),
            0x02 => Ok(MsgType::Result),
            0x03 => Ok(MsgType::Exit),
            other => Err(FrameError::UnknownType(other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("MalformedFrame: truncated, need {needed} bytes, have {have}")]
    Truncated { needed: usize, have: usize },
    #[error("MalformedFrame: unknown message type 0x{0:02X}")]
    UnknownType(u8),
    #[error("MalformedFrame: length field {0} out of range")]
    BadLength(u32),
    #[error("MalformedFrame: {0} trailing bytes")]
    Trailing(usize),
    #[error("MalformedFrame: bad {kind} payload: {detail}")]
    BadPayload { kind: &'static str, detail: &'static str },
}

pub fn encode_frame(msg_type: MsgType, payload: &[u8]) -> Vec<u8> {
    let length = u32::try_from(payload.len() + 1)
        .ok()
        .filter(|&len| len <= MAX_FRAME_LEN)
        .expect("frame payload too large");
    let mut out = Vec::with_capacity(FRAME_HEADER_LEN + 1 + payload.len());
    out.extend_from_slice(&length.to_le_bytes());
    out.push(msg_type as u8);
    out.extend_from_slice(payload);
    out
}

/// Reads the length field of a frame header, i.e. the number of bytes that
/// follow it.
pub fn frame_body_len(header: [u8; FRAME_HEADER_LEN]) -> Result<usize, FrameError> {
    let length = u32::from_le_bytes(header);
    if length == 0 || length > MAX_FRAME_LEN {
        return Err(FrameError::BadLength(length));
    }
    Ok(length as usize)
}

/// Decodes a buffer holding exactly one frame.
pub fn decode_frame(bytes: &[u8]) -> Result<(MsgType, &[u8]), FrameError> {
    if bytes.len() < FRAME_HEADER_LEN + 1 {
        return Err(FrameError::Truncated {
            needed: FRAME_HEADER_LEN + 1,
            have: bytes.len(),
        });
    }
    let header: [u8; FRAME_HEADER_LEN] = bytes[..FRAME_HEADER_LEN].try_into().expect("sliced");
    let body_len = frame_body_len(header)?;
    let body = &bytes[FRAME_HEADER_LEN..];
    if body.len() < body_len {
        return Err(FrameError::Truncated {
            needed: FRAME_HEADER_LEN + body_len,
            have: bytes.len(),
        });
    }
    if body.len() > body_len {
        return Err(FrameError::Trailing(body.len() - body_len));
    }
    let msg_type = MsgType::from_byte(body[0])?;
    Ok((msg_type, &body[1..]))
}

/// Order broadcast by the master at the start of an iteration, or the
/// terminal exit order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderMessage {
    pub job_case: JobId,
    pub exit: bool,
    /// Encoded order parameter. Empty in an exit order.
    pub parameter: Vec<u8>,
}

impl OrderMessage {
    pub fn exit() -> Self {
        OrderMessage {
            job_case: JobId::ZERO,
            exit: true,
            parameter: Vec::new(),
        }
    }

    pub fn to_frame(&self) -> Vec<u8> {
        if self.exit {
            return encode_frame(MsgType::Exit, &[0x01]);
        }
        let mut payload = Vec::with_capacity(2 + self.parameter.len());
        payload.push(self.job_case.index());
        payload.push(0);
        payload.extend_from_slice(&self.parameter);
        encode_frame(MsgType::Order, &payload)
    }

    pub fn from_frame(msg_type: MsgType, payload: &[u8]) -> Result<Self, FrameError> {
        let bad = |detail| FrameError::BadPayload { kind: "ORDER", detail };
        match msg_type {
            MsgType::Exit => match payload {
                [0x01] => Ok(OrderMessage::exit()),
                _ => Err(FrameError::BadPayload {
                    kind: "EXIT",
                    detail: "payload must be the single byte 0x01",
                }),
            },
            MsgType::Order => {
                let [job, exit, parameter @ ..] = payload else {
                    return Err(bad("shorter than 2 bytes"));
                };
                let job_case = JobId::new(*job).ok_or(bad("job_case above 3"))?;
                let exit = match exit {
                    0 => false,
                    1 => true,
                    _ => return Err(bad("exit byte must be 0 or 1")),
                };
                if exit {
                    return Ok(OrderMessage::exit());
                }
                Ok(OrderMessage {
                    job_case,
                    exit,
                    parameter: parameter.to_vec(),
                })
            }
            MsgType::Result => Err(FrameError::BadPayload {
                kind: "ORDER",
                detail: "expected ORDER or EXIT, got RESULT",
            }),
        }
    }
}

/// A worker's partial fold for one iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultMessage {
    pub worker_rank: u32,
    pub reduce_counter: u64,
    /// Encoded reduce value; `None` iff `reduce_counter == 0`.
    pub value: Option<Vec<u8>>,
}

impl ResultMessage {
    pub fn to_frame(&self) -> Vec<u8> {
        let value: &[u8] = match (&self.value, self.reduce_counter) {
            (Some(v), c) if c != 0 => v,
            _ => &[],
        };
        let mut payload = Vec::with_capacity(12 + value.len());
        payload.extend_from_slice(&self.worker_rank.to_le_bytes());
        payload.extend_from_slice(&self.reduce_counter.to_le_bytes());
        payload.extend_from_slice(value);
        encode_frame(MsgType::Result, &payload)
    }

    pub fn from_frame(msg_type: MsgType, payload: &[u8]) -> Result<Self, FrameError> {
        let bad = |detail| FrameError::BadPayload { kind: "RESULT", detail };
        if msg_type != MsgType::Result {
            return Err(bad("expected RESULT frame"));
        }
        if payload.len() < 12 {
            return Err(bad("shorter than 12 bytes"));
        }
        let worker_rank = u32::from_le_bytes(payload[..4].try_into().expect("sliced"));
        let reduce_counter = u64::from_le_bytes(payload[4..12].try_into().expect("sliced"));
        let rest = &payload[12..];
        let value = if reduce_counter == 0 {
            if !rest.is_empty() {
                return Err(bad("value bytes present with zero counter"));
            }
            None
        } else {
            Some(rest.to_vec())
        };
        Ok(ResultMessage {
            worker_rank,
            reduce_counter,
            value,
        })
    }
}

/// The other end of a failed link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Peer {
    Master,
    Worker(usize),
}

impl fmt::Display for Peer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Peer::Master => f.write_str("master"),
            Peer::Worker(rank) => write!(f, "worker rank {rank}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransportError {
    #[error("link to {peer} closed")]
    Disconnected { peer: Peer },
    #[error("timed out waiting for {peer}")]
    Timeout { peer: Peer },
    #[error("malformed message from {peer}: {error}")]
    Malformed { peer: Peer, error: FrameError },
    #[error("protocol violation by {peer}: {detail}")]
    Protocol { peer: Peer, detail: String },
    #[error("i/o error on link to {peer}: {detail}")]
    Io { peer: Peer, detail: String },
    #[error("{peer} refused the connection: {detail}")]
    Refused { peer: Peer, detail: String },
}

impl TransportError {
    pub fn peer(&self) -> Peer {
        match self {
            TransportError::Disconnected { peer }
            | TransportError::Timeout { peer }
            | TransportError::Malformed { peer, .. }
            | TransportError::Protocol { peer, .. }
            | TransportError::Io { peer, .. }
            | TransportError::Refused { peer, .. } => *peer,
        }
    }
}

/// Master end of the star topology: one link per worker.
pub trait MasterTransport {
    fn num_workers(&self) -> usize;

    /// Delivers a copy of `order` to every worker.
    fn broadcast_order(&mut self, order: &OrderMessage) -> Result<(), TransportError>;

    /// Receives exactly one result per worker, returned in ascending rank.
    fn gather_results(&mut self) -> Result<Vec<ResultMessage>, TransportError>;
}

/// Worker end of one master link.
pub trait WorkerTransport {
    fn rank(&self) -> usize;

    fn num_workers(&self) -> usize;

    fn receive_order(&mut self) -> Result<OrderMessage, TransportError>;

    fn send_result(&mut self, msg: &ResultMessage) -> Result<(), TransportError>;
}

impl<T: MasterTransport + ?Sized> MasterTransport for &mut T {
    fn num_workers(&self) -> usize {
        (**self).num_workers()
    }
    fn broadcast_order(&mut self, order: &OrderMessage) -> Result<(), TransportError> {
        (**self).broadcast_order(order)
    }
    fn gather_results(&mut self) -> Result<Vec<ResultMessage>, TransportError> {
        (**self).gather_results()
    }
}

impl<T: WorkerTransport + ?Sized> WorkerTransport for &mut T {
    fn rank(&self) -> usize {
        (**self).rank()
    }
    fn num_workers(&self) -> usize {
        (**self).num_workers()
    }
    fn receive_order(&mut self) -> Result<OrderMessage, TransportError> {
        (**self).receive_order()
    }
    fn send_result(&mut self, msg: &ResultMessage) -> Result<(), TransportError> {
        (**self).send_result(msg)
    }
}
