use std::rc::Rc;

use super::{AckDuty, Body, DataPacket, Ev, Frame, Hol, QueueItem, Simulation};
use crate::mac::{aloha_send, AckWindow, DcfStep, MacProtocol, MediumView};
use crate::metrics::{DelayBreakdown, DropReason};
use crate::routing::qrouting::q_routing_update;
use crate::routing::{RoutingProtocol, UavId};
use crate::time::SimTime;
use crate::trace::TraceKind;

impl Simulation {
    pub(crate) fn enqueue_data(&mut self, id: UavId, pkt: DataPacket) {
        if self.nodes[id as usize].queue.len() >= self.mac.queue_capacity {
            self.drop_packet(id, &pkt, DropReason::QueueOverflow);
            return;
        }
        self.nodes[id as usize].queue.push_back(QueueItem::Data(pkt));
        self.try_hol(id);
    }

    /// Control frames go ahead of queued data.
    pub(crate) fn enqueue_control(&mut self, id: UavId, item: QueueItem) {
        self.nodes[id as usize].queue.push_front(item);
        self.try_hol(id);
    }

    /// Promotes the next queued frame to head-of-line and starts channel access.
    pub(crate) fn try_hol(&mut self, id: UavId) {
        loop {
            let node = &mut self.nodes[id as usize];
            if !node.alive || node.hol.is_some() {
                return;
            }
            let Some(item) = node.queue.pop_front() else { return };
            let next_hop = match item {
                QueueItem::Data(mut pkt) => match self.route(id, &mut pkt) {
                    Ok(n) => {
                        self.set_hol(id, QueueItem::Data(pkt), Some(n));
                        break;
                    }
                    Err(reason) => {
                        self.drop_packet(id, &pkt, reason);
                        continue;
                    }
                },
                QueueItem::Hello => {
                    node.hello_pending = false;
                    None
                }
                QueueItem::Advert => {
                    node.advert_pending = false;
                    None
                }
            };
            self.set_hol(id, item, next_hop);
            break;
        }
        self.begin_access(id);
    }

    fn set_hol(&mut self, id: UavId, item: QueueItem, next_hop: Option<UavId>) {
        let now = self.now();
        let node = &mut self.nodes[id as usize];
        node.dcf.reset(&self.mac);
        node.hol = Some(Hol { item, since: now, next_hop, frame_id: 0, sent_at: now, awaiting_ack: false });
    }

    /// Starts (or restarts after a failure) channel access for the head-of-line frame.
    fn begin_access(&mut self, id: UavId) {
        let now = self.now();
        match self.mac.protocol {
            MacProtocol::CsmaCa => {
                let node = &mut self.nodes[id as usize];
                let view = MediumView { busy: node.busy, idle_since: node.idle_since };
                match node.dcf.begin(now, view, &self.mac, &mut node.rng_mac) {
                    DcfStep::Timer(t) => self.arm_mac_timer(id, t),
                    DcfStep::Transmit => self.transmit_hol(id),
                    DcfStep::Wait => {}
                }
            }
            MacProtocol::Aloha => {
                let node = &mut self.nodes[id as usize];
                let attempt = node.dcf.state.attempt;
                let t = aloha_send(now, attempt, &mut node.rng_mac, &self.mac).max(node.tx_until);
                if t == now && node.transmitting.is_none() {
                    self.transmit_hol(id);
                } else {
                    self.arm_mac_timer(id, t);
                }
            }
        }
    }

    pub(crate) fn on_mac_timer(&mut self, id: UavId) {
        let now = self.now();
        let node = &mut self.nodes[id as usize];
        node.mac_timer = None;
        if !node.alive || node.hol.is_none() {
            return;
        }
        match self.mac.protocol {
            MacProtocol::CsmaCa => match node.dcf.timer_fired(now, &self.mac) {
                DcfStep::Transmit => self.transmit_hol(id),
                DcfStep::Timer(t) => self.arm_mac_timer(id, t),
                DcfStep::Wait => {}
            },
            MacProtocol::Aloha => {
                if node.transmitting.is_some() {
                    let t = node.tx_until;
                    self.arm_mac_timer(id, t);
                } else {
                    self.transmit_hol(id);
                }
            }
        }
    }

    fn transmit_hol(&mut self, id: UavId) {
        let now = self.now();
        let frame_id = self.new_frame_id();
        let bits_hello = 8 * self.cfg.routing.hello_bytes;
        let node = &mut self.nodes[id as usize];
        node.dcf.transmitting();
        let hol = node.hol.as_mut().expect("head-of-line frame");
        hol.frame_id = frame_id;
        hol.sent_at = now;
        let (body, bits) = match &hol.item {
            QueueItem::Data(pkt) => (Body::Data { pkt: pkt.clone(), hol_since: hol.since }, self.cfg.packet.data_bits()),
            QueueItem::Hello => (
                Body::Hello { position: node.motion.position, velocity: node.motion.velocity() },
                bits_hello,
            ),
            QueueItem::Advert => {
                let entries = node.dsdv.advert();
                let bits = 8 * (self.cfg.routing.advert_base_bytes + self.cfg.routing.advert_entry_bytes * entries.len() as u64);
                (Body::Advert(entries), bits)
            }
        };
        let frame = Frame {
            id: frame_id,
            from: id,
            to: hol.next_hop,
            start: now,
            airtime: SimTime::airtime(bits, self.cfg.channel.bit_rate),
            body,
        };
        self.start_tx(frame);
    }

    pub(crate) fn on_tx_end(&mut self, id: UavId) {
        let now = self.now();
        let node = &mut self.nodes[id as usize];
        let Some(frame) = node.transmitting.take() else { return };
        let depleted = node.energy.depleted;
        match &frame.body {
            Body::Ack { .. } => {
                if let Some(duty) = node.ack_duty.take() {
                    self.accept(id, duty);
                }
            }
            _ if node.hol.as_ref().is_some_and(|h| h.frame_id == frame.id) => {
                if frame.to.is_some() && self.cfg.mac.ack {
                    let window = AckWindow { sent_at: now, timeout: self.mac.ack_timeout };
                    let node = &mut self.nodes[id as usize];
                    node.dcf.awaiting_ack();
                    node.hol.as_mut().expect("hol").awaiting_ack = true;
                    let h = self.kernel.schedule(window.expiry(), Ev::AckTimeout(id)).expect("future");
                    self.nodes[id as usize].ack_timer = Some(h);
                } else {
                    self.finish_hol(id);
                }
            }
            _ => {}
        }
        if depleted {
            self.kill(id);
            return;
        }
        self.medium_update(id);
        self.try_hol(id);
    }

    fn finish_hol(&mut self, id: UavId) {
        let node = &mut self.nodes[id as usize];
        node.hol = None;
        node.dcf.reset(&self.mac);
        if let Some(h) = node.ack_timer.take() {
            self.kernel.cancel(h);
        }
    }

    pub(crate) fn on_ack_timeout(&mut self, id: UavId) {
        let node = &mut self.nodes[id as usize];
        node.ack_timer = None;
        let Some(hol) = node.hol.as_mut() else { return };
        if !hol.awaiting_ack {
            return;
        }
        hol.awaiting_ack = false;
        if node.dcf.failed(&self.mac) {
            self.stats.retries += 1;
            self.begin_access(id);
            return;
        }
        let hol = node.hol.take().expect("hol");
        node.dcf.reset(&self.mac);
        let lost = hol.next_hop.expect("unicast");
        if let QueueItem::Data(pkt) = &hol.item {
            let reason = if self.nodes[lost as usize].alive { DropReason::RetryExhausted } else { DropReason::DeadNode };
            self.drop_packet(id, pkt, reason);
        }
        self.link_lost(id, lost);
        self.try_hol(id);
    }

    /// Schedules the ACK for a data frame received intact.
    pub(crate) fn on_data_received(&mut self, id: UavId, frame: Rc<Frame>) {
        let now = self.now();
        if !self.cfg.mac.ack {
            self.accept(id, AckDuty { data: frame, arrived_at: now });
            return;
        }
        let node = &mut self.nodes[id as usize];
        if node.ack_duty.is_some() {
            self.stats.acks_skipped += 1;
            return;
        }
        if let Body::Data { pkt, .. } = &frame.body {
            let p = node.motion.position;
            let detail = format!("from={} frame={}", frame.from, frame.id);
            let rec = pkt.rec as u64;
            node.ack_duty = Some(AckDuty { data: frame, arrived_at: now });
            self.emit(TraceKind::MacRx, Some(id), Some(rec), Some(p), detail);
            self.kernel.schedule(now + self.mac.sifs, Ev::SendAck(id)).expect("future");
        }
    }

    pub(crate) fn on_send_ack(&mut self, id: UavId) {
        let now = self.now();
        let node = &self.nodes[id as usize];
        let Some(duty) = node.ack_duty.as_ref() else { return };
        if !node.alive || node.transmitting.is_some() {
            self.stats.acks_skipped += 1;
            self.nodes[id as usize].ack_duty = None;
            return;
        }
        let data = duty.data.clone();
        let Body::Data { pkt, .. } = &data.body else { unreachable!("duty holds data") };
        let feedback = if self.cfg.routing_protocol == RoutingProtocol::QRouting {
            if pkt.dst == id {
                0.0
            } else {
                let live: Vec<UavId> = node.neighbors.live(now, self.ttl).map(|n| n.uav_id).collect();
                node.q.best_estimate(pkt.dst, &live)
            }
        } else {
            0.0
        };
        let frame = Frame {
            id: self.new_frame_id(),
            from: id,
            to: Some(data.from),
            start: now,
            airtime: SimTime::airtime(self.cfg.ack_bits(), self.cfg.channel.bit_rate),
            body: Body::Ack { data_frame: data.id, feedback },
        };
        self.start_tx(frame);
    }

    /// Our ACK is fully on the air: the hop is complete from this side.
    fn accept(&mut self, id: UavId, duty: AckDuty) {
        let now = self.now();
        let Body::Data { pkt, hol_since } = &duty.data.body else { unreachable!("duty holds data") };
        if !self.nodes[id as usize].accepted.insert((pkt.rec, pkt.hop_index)) {
            self.stats.duplicate_data += 1;
            return;
        }
        let tx_start = duty.data.start;
        let transmission = duty.data.airtime;
        let hop = DelayBreakdown {
            queuing: *hol_since - pkt.ingress,
            contention: tx_start - *hol_since,
            transmission,
            propagation: duty.arrived_at - tx_start - transmission,
            ack_overhead: now - duty.arrived_at,
        };
        debug_assert_eq!(hop.total(), now - pkt.ingress);
        let rec = &mut self.metrics.records[pkt.rec];
        rec.hop_delays.push(hop);
        let p = self.nodes[id as usize].motion.position;
        if pkt.dst == id {
            self.metrics.record_delivered(pkt.rec, now);
            self.emit(TraceKind::Deliver, Some(id), Some(pkt.rec as u64), Some(p), format!("hops={}", pkt.hop_index + 1));
            return;
        }
        rec.hops.push(id);
        let mut next = pkt.clone();
        next.hop_index += 1;
        next.ingress = now;
        if !next.route.is_empty() {
            next.route.remove(0);
        }
        self.enqueue_data(id, next);
    }

    pub(crate) fn on_ack_received(&mut self, id: UavId, frame: &Frame) {
        let now = self.now();
        let Body::Ack { data_frame, feedback } = frame.body else { return };
        let node = &mut self.nodes[id as usize];
        let Some(hol) = node.hol.as_ref() else { return };
        if !hol.awaiting_ack || hol.frame_id != data_frame {
            return;
        }
        let window = AckWindow { sent_at: hol.sent_at + self.t_data, timeout: self.mac.ack_timeout };
        if window.resolve(Some(now)).verdict != crate::mac::AckVerdict::Acked {
            return;
        }
        let next_hop = hol.next_hop.expect("unicast");
        let (rec, dst, ingress) = match &hol.item {
            QueueItem::Data(p) => (p.rec, p.dst, p.ingress),
            _ => unreachable!("only data is acknowledged"),
        };
        if self.cfg.routing_protocol == RoutingProtocol::QRouting {
            let observed = (now - ingress).as_secs_f64();
            q_routing_update(&mut node.q, dst, next_hop, observed, feedback);
        }
        let p = node.motion.position;
        self.finish_hol(id);
        self.emit(TraceKind::Ack, Some(id), Some(rec as u64), Some(p), format!("from={next_hop}"));
        self.try_hol(id);
    }
}
