//! Framed TCP links for multi-process runs.
//!
//! Right after accepting a worker the master writes a fixed 16-byte greeting
//! outside the frame layer: `[rank u32 LE][num_workers u32 LE][list_size u64 LE]`.
//! Ranks follow connection order. Connections beyond `num_workers` receive a
//! greeting with rank `u32::MAX` and are closed.

use std::io::{self, ErrorKind, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use bsf_core::protocol::{frame_body_len, Peer, FRAME_HEADER_LEN};
use bsf_core::{MasterTransport, OrderMessage, ResultMessage, TransportError, WorkerTransport};

use super::{parse_order, parse_result};

pub const GREETING_LEN: usize = 16;
const REJECTED: u32 = u32::MAX;
const POLL: Duration = Duration::from_millis(10);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Greeting {
    rank: u32,
    num_workers: u32,
    list_size: u64,
}

impl Greeting {
    fn to_bytes(self) -> [u8; GREETING_LEN] {
        let mut out = [0u8; GREETING_LEN];
        out[..4].copy_from_slice(&self.rank.to_le_bytes());
        out[4..8].copy_from_slice(&self.num_workers.to_le_bytes());
        out[8..].copy_from_slice(&self.list_size.to_le_bytes());
        out
    }

    fn from_bytes(b: [u8; GREETING_LEN]) -> Self {
        Greeting {
            rank: u32::from_le_bytes(b[..4].try_into().expect("sliced")),
            num_workers: u32::from_le_bytes(b[4..8].try_into().expect("sliced")),
            list_size: u64::from_le_bytes(b[8..].try_into().expect("sliced")),
        }
    }
}

fn io_error(peer: Peer, e: io::Error) -> TransportError {
    match e.kind() {
        ErrorKind::WouldBlock | ErrorKind::TimedOut => TransportError::Timeout { peer },
        ErrorKind::UnexpectedEof
        | ErrorKind::ConnectionReset
        | ErrorKind::ConnectionAborted
        | ErrorKind::BrokenPipe => TransportError::Disconnected { peer },
        _ => TransportError::Io {
            peer,
            detail: e.to_string(),
        },
    }
}

fn configure(stream: &TcpStream, timeout: Duration) -> io::Result<()> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(timeout))?;
    stream.set_write_timeout(Some(timeout))
}

fn write_frame(stream: &mut TcpStream, frame: &[u8], peer: Peer) -> Result<(), TransportError> {
    stream
        .write_all(frame)
        .and_then(|_| stream.flush())
        .map_err(|e| io_error(peer, e))
}

fn read_frame(stream: &mut TcpStream, peer: Peer) -> Result<Vec<u8>, TransportError> {
    let mut header = [0u8; FRAME_HEADER_LEN];
    stream.read_exact(&mut header).map_err(|e| io_error(peer, e))?;
    let body_len = frame_body_len(header).map_err(|error| TransportError::Malformed { peer, error })?;
    let mut frame = vec![0u8; FRAME_HEADER_LEN + body_len];
    frame[..FRAME_HEADER_LEN].copy_from_slice(&header);
    stream
        .read_exact(&mut frame[FRAME_HEADER_LEN..])
        .map_err(|e| io_error(peer, e))?;
    Ok(frame)
}

/// Master end: one stream per worker, indexed by rank.
pub struct TcpMaster {
    streams: Vec<TcpStream>,
    stop: Arc<AtomicBool>,
    rejecter: Option<JoinHandle<()>>,
}

impl TcpMaster {
    /// Waits up to `timeout` for `num_workers` connections on `listener`.
    ///
    /// Later connections are refused until the master is dropped.
    pub fn accept(
        listener: TcpListener,
        num_workers: usize,
        list_size: u64,
        timeout: Duration,
    ) -> Result<Self, TransportError> {
        let local = |e| io_error(Peer::Worker(0), e);
        listener.set_nonblocking(true).map_err(local)?;
        let deadline = Instant::now() + timeout;
        let mut streams = Vec::with_capacity(num_workers);
        while streams.len() < num_workers {
            let rank = streams.len();
            let peer = Peer::Worker(rank);
            match listener.accept() {
                Ok((mut stream, addr)) => {
                    configure(&stream, timeout).map_err(|e| io_error(peer, e))?;
                    let greeting = Greeting {
                        rank: rank as u32,
                        num_workers: num_workers as u32,
                        list_size,
                    };
                    stream.write_all(&greeting.to_bytes()).map_err(|e| io_error(peer, e))?;
                    log::info!("{peer} connected from {addr}");
                    streams.push(stream);
                }
                Err(e) if e.kind() == ErrorKind::WouldBlock => {
                    if Instant::now() >= deadline {
                        return Err(TransportError::Timeout { peer });
                    }
                    thread::sleep(POLL);
                }
                Err(e) => return Err(io_error(peer, e)),
            }
        }
        let stop = Arc::new(AtomicBool::new(false));
        let rejecter = {
            let stop = Arc::clone(&stop);
            thread::spawn(move || reject_surplus(listener, num_workers as u32, &stop))
        };
        Ok(TcpMaster {
            streams,
            stop,
            rejecter: Some(rejecter),
        })
    }
}

fn reject_surplus(listener: TcpListener, num_workers: u32, stop: &AtomicBool) {
    let greeting = Greeting {
        rank: REJECTED,
        num_workers,
        list_size: 0,
    };
    while !stop.load(Ordering::Relaxed) {
        match listener.accept() {
            Ok((mut stream, addr)) => {
                log::warn!("rejecting surplus worker from {addr}: all {num_workers} ranks are taken");
                let _ = stream.set_nonblocking(false);
                let _ = stream.write_all(&greeting.to_bytes());
            }
            Err(e) if e.kind() == ErrorKind::WouldBlock => thread::sleep(POLL),
            Err(e) => {
                log::warn!("accept failed: {e}");
                thread::sleep(POLL);
            }
        }
    }
}

impl Drop for TcpMaster {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::Relaxed);
        if let Some(handle) = self.rejecter.take() {
            let _ = handle.join();
        }
    }
}

impl MasterTransport for TcpMaster {
    fn num_workers(&self) -> usize {
        self.streams.len()
    }

    fn broadcast_order(&mut self, order: &OrderMessage) -> Result<(), TransportError> {
        let frame = order.to_frame();
        for (rank, stream) in self.streams.iter_mut().enumerate() {
            write_frame(stream, &frame, Peer::Worker(rank))?;
        }
        Ok(())
    }

    fn gather_results(&mut self) -> Result<Vec<ResultMessage>, TransportError> {
        self.streams
            .iter_mut()
            .enumerate()
            .map(|(rank, stream)| {
                let peer = Peer::Worker(rank);
                parse_result(peer, &read_frame(stream, peer)?)
            })
            .collect()
    }
}

/// Worker end of one TCP link.
pub struct TcpWorker {
    stream: TcpStream,
    rank: usize,
    num_workers: usize,
    list_size: u64,
}

impl TcpWorker {
    /// Connects to the master, retrying refused attempts until `timeout`
    /// has elapsed, then reads the rank assignment.
    pub fn connect<A: ToSocketAddrs>(addr: A, timeout: Duration) -> Result<Self, TransportError> {
        let peer = Peer::Master;
        let addrs: Vec<SocketAddr> = addr.to_socket_addrs().map_err(|e| io_error(peer, e))?.collect();
        let deadline = Instant::now() + timeout;
        let mut stream = loop {
            let mut last = io::Error::new(ErrorKind::InvalidInput, "address resolved to nothing");
            let mut connected = None;
            for a in &addrs {
                let left = deadline.saturating_duration_since(Instant::now()).max(POLL);
                match TcpStream::connect_timeout(a, left.min(Duration::from_secs(1))) {
                    Ok(s) => {
                        connected = Some(s);
                        break;
                    }
                    Err(e) => last = e,
                }
            }
            if let Some(s) = connected {
                break s;
            }
            if Instant::now() >= deadline {
                return Err(TransportError::Io {
                    peer,
                    detail: format!("no master reachable within {timeout:?}: {last}"),
                });
            }
            thread::sleep(POLL * 5);
        };
        configure(&stream, timeout).map_err(|e| io_error(peer, e))?;
        let mut raw = [0u8; GREETING_LEN];
        stream.read_exact(&mut raw).map_err(|e| io_error(peer, e))?;
        let g = Greeting::from_bytes(raw);
        if g.rank == REJECTED {
            return Err(TransportError::Refused {
                peer,
                detail: format!("all {} worker ranks are taken", g.num_workers),
            });
        }
        if g.rank >= g.num_workers {
            return Err(TransportError::Protocol {
                peer,
                detail: format!("assigned rank {} is not below {} workers", g.rank, g.num_workers),
            });
        }
        log::info!("connected as worker rank {} of {}", g.rank, g.num_workers);
        Ok(TcpWorker {
            stream,
            rank: g.rank as usize,
            num_workers: g.num_workers as usize,
            list_size: g.list_size,
        })
    }

    /// Map-list length announced by the master.
    pub fn list_size(&self) -> u64 {
        self.list_size
    }
}

impl WorkerTransport for TcpWorker {
    fn rank(&self) -> usize {
        self.rank
    }

    fn num_workers(&self) -> usize {
        self.num_workers
    }

    fn receive_order(&mut self) -> Result<OrderMessage, TransportError> {
        parse_order(Peer::Master, &read_frame(&mut self.stream, Peer::Master)?)
    }

    fn send_result(&mut self, msg: &ResultMessage) -> Result<(), TransportError> {
        write_frame(&mut self.stream, &msg.to_frame(), Peer::Master)
    }
}
