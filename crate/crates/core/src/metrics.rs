//! Per-packet records and the five network-level metrics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::routing::UavId;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    RetryExhausted,
    LocalMinimum,
    NoRoute,
    TtlExceeded,
    QueueOverflow,
    DeadNode,
    RoutingLoop,
    /// Still queued or in flight when the run ended.
    SimEnd,
}

impl DropReason {
    pub const ALL: [DropReason; 8] = [
        DropReason::RetryExhausted,
        DropReason::LocalMinimum,
        DropReason::NoRoute,
        DropReason::TtlExceeded,
        DropReason::QueueOverflow,
        DropReason::DeadNode,
        DropReason::RoutingLoop,
        DropReason::SimEnd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DropReason::RetryExhausted => "retry_exhausted",
            DropReason::LocalMinimum => "local_minimum",
            DropReason::NoRoute => "no_route",
            DropReason::TtlExceeded => "ttl_exceeded",
            DropReason::QueueOverflow => "queue_overflow",
            DropReason::DeadNode => "dead_node",
            DropReason::RoutingLoop => "routing_loop",
            DropReason::SimEnd => "sim_end",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    InFlight,
    Delivered,
    Dropped(DropReason),
}

/// One hop, from ingress at the sender to the end of the receiver's ACK.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayBreakdown {
    pub queuing: SimTime,
    /// DIFS, backoff (active and frozen), and every failed attempt.
    pub contention: SimTime,
    pub transmission: SimTime,
    pub propagation: SimTime,
    /// SIFS plus ACK airtime.
    pub ack_overhead: SimTime,
}

impl DelayBreakdown {
    pub fn total(&self) -> SimTime {
        self.queuing + self.contention + self.transmission + self.propagation + self.ack_overhead
    }

    fn accumulate(&mut self, o: &DelayBreakdown) {
        self.queuing += o.queuing;
        self.contention += o.contention;
        self.transmission += o.transmission;
        self.propagation += o.propagation;
        self.ack_overhead += o.ack_overhead;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketRecord {
    pub packet_id: u64,
    pub src: UavId,
    pub dst: UavId,
    pub generated_at: SimTime,
    pub delivered_at: Option<SimTime>,
    pub payload_bits: u64,
    /// Intermediate relays only.
    pub hops: Vec<UavId>,
    pub hop_delays: Vec<DelayBreakdown>,
    /// Distance to the destination used at each forwarding decision
    /// (geographic protocols only).
    pub progress: Vec<f64>,
    pub terminal: Terminal,
}

impl PacketRecord {
    pub fn new(packet_id: u64, src: UavId, dst: UavId, generated_at: SimTime, payload_bits: u64) -> Self {
        PacketRecord {
            packet_id,
            src,
            dst,
            generated_at,
            delivered_at: None,
            payload_bits,
            hops: Vec::new(),
            hop_delays: Vec::new(),
            progress: Vec::new(),
            terminal: Terminal::InFlight,
        }
    }

    pub fn is_delivered(&self) -> bool {
        self.terminal == Terminal::Delivered
    }

    /// True when no UAV appears twice on the path `src, hops.., dst`.
    pub fn loop_free(&self) -> bool {
        let mut seen = vec![self.src];
        for &h in self.hops.iter().chain(std::iter::once(&self.dst)) {
            if seen.contains(&h) {
                return false;
            }
            seen.push(h);
        }
        true
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsLedger {
    pub generated_count: u64,
    pub delivered_count: u64,
    pub control_tx_count: u64,
    pub delivered_payload_bits: u64,
    pub records: Vec<PacketRecord>,
    pub sim_duration: f64,
    pub data_tx_count: u64,
    pub ack_tx_count: u64,
    pub unknown_frames: u64,
}

impl MetricsLedger {
    pub fn record_generated(&mut self, rec: PacketRecord) {
        self.generated_count += 1;
        self.records.push(rec);
    }

    pub fn record_delivered(&mut self, idx: usize, at: SimTime) {
        let r = &mut self.records[idx];
        debug_assert_eq!(r.terminal, Terminal::InFlight);
        r.delivered_at = Some(at);
        r.terminal = Terminal::Delivered;
        self.delivered_count += 1;
        self.delivered_payload_bits += r.payload_bits;
    }

    pub fn record_dropped(&mut self, idx: usize, reason: DropReason) {
        let r = &mut self.records[idx];
        debug_assert_eq!(r.terminal, Terminal::InFlight);
        r.terminal = Terminal::Dropped(reason);
    }

    /// Closes every record still in flight.
    pub fn finalize(&mut self, sim_duration: f64) {
        self.sim_duration = sim_duration;
        for r in &mut self.records {
            if r.terminal == Terminal::InFlight {
                r.terminal = Terminal::Dropped(DropReason::SimEnd);
            }
        }
    }

    pub fn drop_histogram(&self) -> BTreeMap<&'static str, u64> {
        let mut h: BTreeMap<&'static str, u64> = DropReason::ALL.iter().map(|r| (r.name(), 0)).collect();
        for r in &self.records {
            if let Terminal::Dropped(reason) = r.terminal {
                *h.get_mut(reason.name()).expect("all reasons present") += 1;
            }
        }
        h
    }

    fn delivered(&self) -> impl Iterator<Item = &PacketRecord> {
        self.records.iter().filter(|r| r.is_delivered())
    }
}

/// Delivered over generated; `None` when nothing was generated.
pub fn pdr(l: &MetricsLedger) -> Option<f64> {
    (l.generated_count > 0).then(|| l.delivered_count as f64 / l.generated_count as f64)
}

/// Mean generation-to-delivery latency in seconds.
pub fn avg_e2e_delay(l: &MetricsLedger) -> Option<f64> {
    let (n, sum) = l.delivered().fold((0u64, 0u128), |(n, s), r| {
        let d = r.delivered_at.expect("delivered") - r.generated_at;
        (n + 1, s + d.as_nanos() as u128)
    });
    (n > 0).then(|| sum as f64 / n as f64 / 1e9)
}

/// Delivered payload in Kbit/s over the run.
pub fn avg_throughput(l: &MetricsLedger) -> f64 {
    if l.sim_duration <= 0.0 {
        return 0.0;
    }
    l.delivered_payload_bits as f64 / l.sim_duration / 1000.0
}

/// Control-frame transmissions per delivered data packet.
pub fn routing_load(l: &MetricsLedger) -> Option<f64> {
    (l.delivered_count > 0).then(|| l.control_tx_count as f64 / l.delivered_count as f64)
}

/// Mean number of intermediate relays over delivered packets.
pub fn avg_hop_count(l: &MetricsLedger) -> Option<f64> {
    let (n, sum) = l.delivered().fold((0u64, 0usize), |(n, s), r| (n + 1, s + r.hops.len()));
    (n > 0).then(|| sum as f64 / n as f64)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReconciliationError {
    #[error("packet {0} was not delivered")]
    NotDelivered(u64),
    #[error("packet {packet}: components sum to {sum} but end-to-end delay is {e2e}")]
    Mismatch { packet: u64, sum: SimTime, e2e: SimTime },
    #[error("packet {packet}: {hops} relays but {records} hop records")]
    HopCount { packet: u64, hops: usize, records: usize },
}

/// Summed per-hop components, checked against the end-to-end delay.
pub fn delay_breakdown(r: &PacketRecord) -> Result<DelayBreakdown, ReconciliationError> {
    let Some(at) = r.delivered_at.filter(|_| r.is_delivered()) else {
        return Err(ReconciliationError::NotDelivered(r.packet_id));
    };
    if r.hop_delays.len() != r.hops.len() + 1 {
        return Err(ReconciliationError::HopCount { packet: r.packet_id, hops: r.hops.len(), records: r.hop_delays.len() });
    }
    let mut total = DelayBreakdown::default();
    for h in &r.hop_delays {
        total.accumulate(h);
    }
    let e2e = at - r.generated_at;
    if total.total() != e2e {
        return Err(ReconciliationError::Mismatch { packet: r.packet_id, sum: total.total(), e2e });
    }
    Ok(total)
}
