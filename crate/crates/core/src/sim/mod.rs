//! The simulated world: UAV nodes wired to one event kernel and one shared channel.

mod link;
mod net;
mod phy;

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::rc::Rc;

use rand_distr::{Distribution, Exp};

use crate::config::{MotionDriver, ScenarioConfig, TrafficKind};
use crate::energy::{propulsion_power, EnergyCategory, EnergyLedger};
use crate::geometry::Vector3;
use crate::kernel::{EventHandle, Kernel, KernelError};
use crate::mac::{Dcf, MacParams};
use crate::metrics::{DropReason, MetricsLedger, PacketRecord};
use crate::mobility::{self, MobilityParams, MotionState};
use crate::rng::{stream, Purpose, SimRng};
use crate::routing::dsdv::{AdvertEntry, DsdvTable};
use crate::routing::qrouting::QTable;
use crate::routing::{NeighborTable, RoutingProtocol, UavId};
use crate::time::SimTime;
use crate::topology::{apply_control_step, connectivity_stats, virtual_force, ForceParams};
use crate::trace::{TraceKind, TraceWriter};

use rand::Rng;

/// A data packet as carried from hop to hop.
#[derive(Debug, Clone)]
pub(crate) struct DataPacket {
    pub rec: usize,
    pub dst: UavId,
    /// Destination coordinates read from the location service at generation.
    pub dst_pos: Vector3,
    /// Links traversed so far.
    pub hop_index: u32,
    /// Arrival time at the current holder.
    pub ingress: SimTime,
    /// Remaining source route, current holder first.
    pub route: Vec<UavId>,
    /// Greedy progress bound: the last decision distance.
    pub bound: f64,
    pub visited: Vec<UavId>,
}

#[derive(Debug, Clone)]
pub(crate) enum QueueItem {
    Data(DataPacket),
    Hello,
    Advert,
}

#[derive(Debug)]
pub(crate) enum Body {
    Data { pkt: DataPacket, hol_since: SimTime },
    Ack { data_frame: u64, feedback: f64 },
    Hello { position: Vector3, velocity: Vector3 },
    Advert(Vec<AdvertEntry>),
}

#[derive(Debug)]
pub(crate) struct Frame {
    pub id: u64,
    pub from: UavId,
    /// `None` for broadcast.
    pub to: Option<UavId>,
    pub start: SimTime,
    pub airtime: SimTime,
    pub body: Body,
}

pub(crate) struct Arrival {
    pub frame: Rc<Frame>,
    pub power: f64,
    pub peak_interference: f64,
    pub corrupted: bool,
}

pub(crate) struct Hol {
    pub item: QueueItem,
    pub since: SimTime,
    pub next_hop: Option<UavId>,
    pub frame_id: u64,
    pub sent_at: SimTime,
    pub awaiting_ack: bool,
}

/// An ACK we owe, with what to do once it is on the air.
pub(crate) struct AckDuty {
    pub data: Rc<Frame>,
    pub arrived_at: SimTime,
}

pub(crate) struct Node {
    pub id: UavId,
    pub motion: MotionState,
    pub alive: bool,
    pub energy: EnergyLedger,
    pub queue: VecDeque<QueueItem>,
    pub hol: Option<Hol>,
    pub dcf: Dcf,
    pub mac_timer: Option<EventHandle>,
    pub ack_timer: Option<EventHandle>,
    pub transmitting: Option<Rc<Frame>>,
    pub tx_until: SimTime,
    pub ack_duty: Option<AckDuty>,
    pub arrivals: Vec<Arrival>,
    pub busy: bool,
    pub idle_since: SimTime,
    pub neighbors: NeighborTable,
    pub dsdv: DsdvTable,
    pub dsdv_seen_seq: BTreeMap<UavId, u64>,
    pub advert_pending: bool,
    pub hello_pending: bool,
    pub q: QTable,
    pub accepted: HashSet<(usize, u32)>,
    pub rng_mobility: SimRng,
    pub rng_traffic: SimRng,
    pub rng_mac: SimRng,
    pub rng_routing: SimRng,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Ev {
    Mobility,
    Control,
    EnergySample,
    Traffic(UavId),
    Hello(UavId),
    DsdvDump(UavId),
    MacTimer(UavId),
    AckTimeout(UavId),
    TxEnd(UavId),
    SendAck(UavId),
    ArrivalStart { rx: UavId, slot: u32 },
    ArrivalEnd { rx: UavId, frame: u64 },
}

/// Counters outside the five headline metrics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimStats {
    pub frames_sent: u64,
    pub receptions_ok: u64,
    pub receptions_failed: u64,
    pub half_duplex_losses: u64,
    pub acks_skipped: u64,
    pub duplicate_data: u64,
    pub retries: u64,
    pub dsdv_seq_regressions: u64,
    pub dsdv_malformed: u64,
    pub events_executed: u64,
}

pub struct Simulation {
    pub(crate) cfg: ScenarioConfig,
    pub(crate) mac: MacParams,
    pub(crate) mob: MobilityParams,
    pub(crate) force: ForceParams,
    pub(crate) range: f64,
    pub(crate) ttl: SimTime,
    pub(crate) t_data: SimTime,
    pub(crate) kernel: Kernel<Ev>,
    pub(crate) nodes: Vec<Node>,
    /// Frames waiting for their `ArrivalStart` events, indexed by slot.
    pub(crate) pending_arrivals: Vec<Option<(Rc<Frame>, f64)>>,
    pub(crate) free_slots: Vec<u32>,
    pub(crate) next_frame_id: u64,
    pub(crate) metrics: MetricsLedger,
    pub(crate) stats: SimStats,
    pub(crate) trace: Option<TraceWriter>,
    pub(crate) rng_force: SimRng,
    pub(crate) end: SimTime,
    /// Links that recently exhausted MAC retries, with the time they may be used again.
    pub(crate) failed_links: BTreeMap<(UavId, UavId), SimTime>,
}

/// Everything a finished run leaves behind.
pub struct SimOutcome {
    pub metrics: MetricsLedger,
    pub stats: SimStats,
    pub energy: Vec<EnergyLedger>,
    pub final_positions: Vec<Vector3>,
    pub trace: Option<Vec<u8>>,
}

impl Simulation {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        let cfg = cfg.clone();
        let mac = cfg.mac_params();
        let mob = cfg.mobility_params();
        let force = cfg.force_params();
        let range = cfg.max_range();
        let seed = cfg.seed;
        let mut placement = stream(seed, u32::MAX, Purpose::Placement);
        let nodes = (0..cfg.n_uavs as u32)
            .map(|id| {
                let mut motion = MotionState::random(&mob, &mut placement);
                if let Some(p) = cfg.positions.get(id as usize) {
                    motion.position = *p;
                }
                if cfg.motion == MotionDriver::TopologyControl {
                    motion.speed = 0.0;
                }
                Node {
                    id,
                    motion,
                    alive: true,
                    energy: EnergyLedger::new(cfg.battery),
                    queue: VecDeque::new(),
                    hol: None,
                    dcf: Dcf::new(mac.cw_min),
                    mac_timer: None,
                    ack_timer: None,
                    transmitting: None,
                    tx_until: SimTime::ZERO,
                    ack_duty: None,
                    arrivals: Vec::new(),
                    busy: false,
                    idle_since: SimTime::ZERO,
                    neighbors: NeighborTable::default(),
                    dsdv: DsdvTable::new(id, SimTime::ZERO),
                    dsdv_seen_seq: BTreeMap::new(),
                    advert_pending: false,
                    hello_pending: false,
                    q: QTable::new(cfg.routing.q_learning_rate),
                    accepted: HashSet::new(),
                    rng_mobility: stream(seed, id, Purpose::Mobility),
                    rng_traffic: stream(seed, id, Purpose::Traffic),
                    rng_mac: stream(seed, id, Purpose::Mac),
                    rng_routing: stream(seed, id, Purpose::Routing),
                }
            })
            .collect();
        Simulation {
            ttl: SimTime::from_secs_f64(cfg.neighbor_ttl()),
            t_data: SimTime::airtime(cfg.packet.data_bits(), cfg.channel.bit_rate),
            end: SimTime::from_secs_f64(cfg.duration),
            trace: cfg.trace.then(TraceWriter::new),
            rng_force: stream(seed, u32::MAX, Purpose::Force),
            mac,
            mob,
            force,
            range,
            kernel: Kernel::new(),
            nodes,
            pending_arrivals: Vec::new(),
            free_slots: Vec::new(),
            next_frame_id: 0,
            metrics: MetricsLedger::default(),
            stats: SimStats::default(),
            failed_links: BTreeMap::new(),
            cfg,
        }
    }

    pub fn now(&self) -> SimTime {
        self.kernel.now()
    }

    pub fn positions(&self) -> Vec<Vector3> {
        self.nodes.iter().map(|n| n.motion.position).collect()
    }

    pub fn metrics(&self) -> &MetricsLedger {
        &self.metrics
    }

    pub(crate) fn emit(&mut self, kind: TraceKind, uav: Option<UavId>, pkt: Option<u64>, pos: Option<Vector3>, detail: String) {
        if let Some(t) = self.trace.as_mut() {
            t.emit(self.kernel.now(), kind, uav, pkt, pos, detail);
        }
    }

    fn at(&mut self, t: SimTime, ev: Ev) -> EventHandle {
        self.kernel.schedule(t, ev).expect("scheduled in the future")
    }

    fn bootstrap(&mut self) {
        let n = self.nodes.len() as u32;
        for id in 0..n {
            let p = self.nodes[id as usize].motion.position;
            self.emit(TraceKind::Pos, Some(id), None, Some(p), String::new());
        }
        match self.cfg.motion {
            MotionDriver::Mobility => {}
            MotionDriver::TopologyControl => {
                self.emit_connectivity();
                self.at(SimTime::from_secs_f64(self.force.control_interval), Ev::Control);
            }
        }
        self.at(SimTime::from_secs_f64(self.mob.update_interval), Ev::Mobility);
        self.at(SimTime::from_secs_f64(self.cfg.energy_sample_interval), Ev::EnergySample);
        let sources = if self.cfg.traffic.sources == 0 { n } else { self.cfg.traffic.sources as u32 };
        let proto = self.cfg.routing_protocol;
        for id in 0..n {
            let is_sink = self.cfg.traffic.destination == Some(id as usize);
            if id < sources && n > 1 && !is_sink {
                let start = SimTime::from_secs_f64(self.cfg.traffic.start);
                if let Some(gap) = self.traffic_gap(id) {
                    self.at(start + gap, Ev::Traffic(id));
                }
            }
            let node = &mut self.nodes[id as usize];
            if proto.uses_hello() {
                let off = node.rng_routing.random::<f64>() * self.cfg.routing.hello_interval;
                self.at(SimTime::from_secs_f64(off), Ev::Hello(id));
            }
            let node = &mut self.nodes[id as usize];
            if proto == RoutingProtocol::Dsdv {
                let off = node.rng_routing.random::<f64>() * self.cfg.routing.dsdv_dump_interval;
                self.at(SimTime::from_secs_f64(off), Ev::DsdvDump(id));
            }
        }
    }

    fn traffic_gap(&mut self, id: UavId) -> Option<SimTime> {
        let rate = self.cfg.traffic.rate;
        if rate <= 0.0 {
            return None;
        }
        let rng = &mut self.nodes[id as usize].rng_traffic;
        let secs = match self.cfg.traffic.kind {
            TrafficKind::Poisson => Exp::new(rate).expect("positive rate").sample(rng),
            TrafficKind::Uniform => rng.random::<f64>() * 2.0 / rate,
        };
        Some(SimTime::from_secs_f64(secs))
    }

    /// Runs to the configured duration.
    pub fn run(mut self) -> Result<SimOutcome, KernelError> {
        self.bootstrap();
        let end = self.end;
        while let Some((at, handle, ev)) = self.kernel.pop_until(end) {
            self.dispatch(ev)
                .map_err(|message| KernelError::EventFault { at, seq: handle.seq(), message })?;
        }
        self.kernel.advance_to(end);
        self.stats.events_executed = self.kernel.stats().executed;
        self.metrics.finalize(self.cfg.duration);
        Ok(SimOutcome {
            final_positions: self.positions(),
            energy: self.nodes.iter().map(|n| n.energy.clone()).collect(),
            metrics: self.metrics,
            stats: self.stats,
            trace: self.trace.map(TraceWriter::into_bytes),
        })
    }

    fn dispatch(&mut self, ev: Ev) -> Result<(), String> {
        match ev {
            Ev::Mobility => self.on_mobility(),
            Ev::Control => self.on_control(),
            Ev::EnergySample => self.on_energy_sample(),
            Ev::Traffic(id) => self.on_traffic(id),
            Ev::Hello(id) => self.on_hello_timer(id),
            Ev::DsdvDump(id) => self.on_dsdv_dump(id),
            Ev::MacTimer(id) => self.on_mac_timer(id),
            Ev::AckTimeout(id) => self.on_ack_timeout(id),
            Ev::TxEnd(id) => self.on_tx_end(id),
            Ev::SendAck(id) => self.on_send_ack(id),
            Ev::ArrivalStart { rx, slot } => self.on_arrival_start(rx, slot),
            Ev::ArrivalEnd { rx, frame } => self.on_arrival_end(rx, frame),
        }
        Ok(())
    }

    fn on_mobility(&mut self) {
        let dt = self.mob.update_interval;
        for i in 0..self.nodes.len() {
            if !self.nodes[i].alive {
                continue;
            }
            let speed = self.nodes[i].motion.speed;
            let joules = propulsion_power(speed, &self.cfg.energy).expect("speed is never negative") * dt;
            if self.nodes[i].energy.debit(joules, EnergyCategory::Propulsion) {
                self.kill(i as UavId);
                continue;
            }
            if self.cfg.motion == MotionDriver::Mobility {
                let node = &mut self.nodes[i];
                node.motion = mobility::step(&node.motion, &self.mob, &mut node.rng_mobility);
            }
            let p = self.nodes[i].motion.position;
            self.emit(TraceKind::Pos, Some(i as UavId), None, Some(p), String::new());
        }
        let next = self.now() + SimTime::from_secs_f64(dt);
        self.at(next, Ev::Mobility);
    }

    fn on_control(&mut self) {
        let snapshot: Vec<(bool, Vector3)> = self.nodes.iter().map(|n| (n.alive, n.motion.position)).collect();
        for i in 0..self.nodes.len() {
            if !snapshot[i].0 {
                continue;
            }
            let me = snapshot[i].1;
            let nbrs: Vec<Vector3> = snapshot
                .iter()
                .enumerate()
                .filter(|&(j, &(alive, p))| j != i && alive && me.distance(p) <= self.force.interaction_radius)
                .map(|(_, &(_, p))| p)
                .collect();
            let f = virtual_force(me, &nbrs, &self.force, &mut self.rng_force);
            let node = &mut self.nodes[i];
            node.motion = apply_control_step(&node.motion, f, &self.force, &self.cfg.bounds);
        }
        self.emit_connectivity();
        let next = self.now() + SimTime::from_secs_f64(self.force.control_interval);
        self.at(next, Ev::Control);
    }

    fn emit_connectivity(&mut self) {
        if self.trace.is_none() {
            return;
        }
        let s = connectivity_stats(&self.positions(), self.range);
        let detail = format!(
            "components={} edges={} largest={}",
            s.component_count, s.edge_count, s.largest_component_size
        );
        self.emit(TraceKind::Conn, None, None, None, detail);
    }

    fn on_energy_sample(&mut self) {
        if self.trace.is_some() {
            for i in 0..self.nodes.len() {
                let e = &self.nodes[i].energy;
                let detail = format!(
                    "residual={:?} propulsion={:?} comm={:?}",
                    e.residual, e.spent_propulsion, e.spent_comm
                );
                let p = self.nodes[i].motion.position;
                self.emit(TraceKind::Energy, Some(i as UavId), None, Some(p), detail);
            }
        }
        let next = self.now() + SimTime::from_secs_f64(self.cfg.energy_sample_interval);
        self.at(next, Ev::EnergySample);
    }

    fn on_traffic(&mut self, id: UavId) {
        if !self.nodes[id as usize].alive {
            return;
        }
        let n = self.nodes.len() as u32;
        let node = &mut self.nodes[id as usize];
        let dst = match self.cfg.traffic.destination {
            Some(d) => d as UavId,
            None => {
                let d = node.rng_traffic.random_range(0..n - 1);
                if d >= id {
                    d + 1
                } else {
                    d
                }
            }
        };
        let now = self.kernel.now();
        let rec = self.metrics.records.len();
        self.metrics.record_generated(PacketRecord::new(rec as u64, id, dst, now, 8 * self.cfg.packet.payload_bytes));
        let pkt = DataPacket {
            rec,
            dst,
            dst_pos: self.nodes[dst as usize].motion.position,
            hop_index: 0,
            ingress: now,
            route: Vec::new(),
            bound: f64::INFINITY,
            visited: Vec::new(),
        };
        let p = self.nodes[id as usize].motion.position;
        self.emit(TraceKind::PktGen, Some(id), Some(rec as u64), Some(p), format!("dst={dst}"));
        self.enqueue_data(id, pkt);
        if let Some(gap) = self.traffic_gap(id) {
            self.at(now + gap, Ev::Traffic(id));
        }
    }

    pub(crate) fn drop_packet(&mut self, holder: UavId, pkt: &DataPacket, reason: DropReason) {
        // A copy already accepted downstream keeps the packet alive.
        if self.metrics.records[pkt.rec].hop_delays.len() > pkt.hop_index as usize {
            return;
        }
        self.metrics.record_dropped(pkt.rec, reason);
        let p = self.nodes[holder as usize].motion.position;
        self.emit(TraceKind::Drop, Some(holder), Some(pkt.rec as u64), Some(p), reason.name().to_string());
    }

    /// Battery exhausted: the UAV freezes and its queued packets are lost.
    pub(crate) fn kill(&mut self, id: UavId) {
        let node = &mut self.nodes[id as usize];
        if !node.alive {
            return;
        }
        node.alive = false;
        node.motion.speed = 0.0;
        for h in [node.mac_timer.take(), node.ack_timer.take()].into_iter().flatten() {
            self.kernel.cancel(h);
        }
        let node = &mut self.nodes[id as usize];
        let mut lost: Vec<DataPacket> = node
            .queue
            .drain(..)
            .filter_map(|q| match q {
                QueueItem::Data(p) => Some(p),
                _ => None,
            })
            .collect();
        if let Some(Hol { item: QueueItem::Data(p), .. }) = node.hol.take() {
            lost.insert(0, p);
        }
        node.arrivals.clear();
        for p in lost {
            self.drop_packet(id, &p, DropReason::DeadNode);
        }
    }
}
