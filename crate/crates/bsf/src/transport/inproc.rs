//! Channel links between threads of one process.
//!
//! Messages travel as encoded frames, never as shared values.

use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::time::Duration;

use bsf_core::protocol::Peer;
use bsf_core::{MasterTransport, OrderMessage, ResultMessage, TransportError, WorkerTransport};

use super::{parse_order, parse_result};

struct Link {
    orders: Sender<Vec<u8>>,
    results: Receiver<Vec<u8>>,
}

pub struct InprocMaster {
    links: Vec<Link>,
    timeout: Duration,
}

pub struct InprocWorker {
    rank: usize,
    num_workers: usize,
    orders: Receiver<Vec<u8>>,
    results: Sender<Vec<u8>>,
    timeout: Duration,
}

/// Builds a master end and `num_workers` worker ends, worker `r` at index `r`.
pub fn inproc_links(num_workers: usize, timeout: Duration) -> (InprocMaster, Vec<InprocWorker>) {
    let mut links = Vec::with_capacity(num_workers);
    let mut workers = Vec::with_capacity(num_workers);
    for rank in 0..num_workers {
        let (order_tx, order_rx) = channel();
        let (result_tx, result_rx) = channel();
        links.push(Link {
            orders: order_tx,
            results: result_rx,
        });
        workers.push(InprocWorker {
            rank,
            num_workers,
            orders: order_rx,
            results: result_tx,
            timeout,
        });
    }
    (InprocMaster { links, timeout }, workers)
}

fn recv(rx: &Receiver<Vec<u8>>, timeout: Duration, peer: Peer) -> Result<Vec<u8>, TransportError> {
    rx.recv_timeout(timeout).map_err(|e| match e {
        RecvTimeoutError::Timeout => TransportError::Timeout { peer },
        RecvTimeoutError::Disconnected => TransportError::Disconnected { peer },
    })
}

impl MasterTransport for InprocMaster {
    fn num_workers(&self) -> usize {
        self.links.len()
    }

    fn broadcast_order(&mut self, order: &OrderMessage) -> Result<(), TransportError> {
        let frame = order.to_frame();
        for (rank, link) in self.links.iter().enumerate() {
            link.orders
                .send(frame.clone())
                .map_err(|_| TransportError::Disconnected {
                    peer: Peer::Worker(rank),
                })?;
        }
        Ok(())
    }

    fn gather_results(&mut self) -> Result<Vec<ResultMessage>, TransportError> {
        self.links
            .iter()
            .enumerate()
            .map(|(rank, link)| {
                let peer = Peer::Worker(rank);
                parse_result(peer, &recv(&link.results, self.timeout, peer)?)
            })
            .collect()
    }
}

impl WorkerTransport for InprocWorker {
    fn rank(&self) -> usize {
        self.rank
    }

    fn num_workers(&self) -> usize {
        self.num_workers
    }

    fn receive_order(&mut self) -> Result<OrderMessage, TransportError> {
        parse_order(Peer::Master, &recv(&self.orders, self.timeout, Peer::Master)?)
    }

    fn send_result(&mut self, msg: &ResultMessage) -> Result<(), TransportError> {
        self.results
            .send(msg.to_frame())
            .map_err(|_| TransportError::Disconnected { peer: Peer::Master })
    }
}
