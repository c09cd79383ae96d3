use std::rc::Rc;

use super::{Body, DataPacket, Ev, Frame, QueueItem, Simulation};
use crate::metrics::DropReason;
use crate::routing::greedy::greedy_choice;
use crate::routing::opar::{NodeSnapshot, TopologyView};
use crate::routing::qrouting::q_routing_select;
use crate::routing::{NeighborEntry, RouteDecision, RoutingProtocol, UavId};
use crate::time::SimTime;

impl Simulation {
    pub(crate) fn on_frame(&mut self, id: UavId, frame: Rc<Frame>) {
        let now = self.now();
        match &frame.body {
            Body::Data { .. } => self.on_data_received(id, frame),
            Body::Ack { .. } => self.on_ack_received(id, &frame),
            Body::Hello { position, velocity } => {
                let entry = NeighborEntry { uav_id: frame.from, position: *position, velocity: *velocity, last_heard: now };
                self.nodes[id as usize].neighbors.upsert(entry);
            }
            Body::Advert(entries) => {
                let node = &mut self.nodes[id as usize];
                let delta = node.dsdv.process_update(entries, frame.from, now);
                self.stats.dsdv_malformed += delta.malformed as u64;
                for e in node.dsdv.entries() {
                    let last = node.dsdv_seen_seq.entry(e.destination).or_insert(0);
                    if e.sequence_number < *last {
                        self.stats.dsdv_seq_regressions += 1;
                    }
                    *last = e.sequence_number;
                }
                if !delta.is_empty() {
                    self.trigger_advert(id);
                }
            }
        }
    }

    fn trigger_advert(&mut self, id: UavId) {
        let node = &mut self.nodes[id as usize];
        if node.advert_pending || !node.alive {
            return;
        }
        node.advert_pending = true;
        self.enqueue_control(id, QueueItem::Advert);
    }

    pub(crate) fn on_hello_timer(&mut self, id: UavId) {
        let now = self.now();
        if !self.nodes[id as usize].alive {
            return;
        }
        let expired = self.nodes[id as usize].neighbors.evict_expired(now, self.ttl);
        for lost in expired {
            self.link_lost(id, lost);
        }
        let node = &mut self.nodes[id as usize];
        if !node.hello_pending {
            node.hello_pending = true;
            self.enqueue_control(id, QueueItem::Hello);
        }
        let next = now + SimTime::from_secs_f64(self.cfg.routing.hello_interval);
        self.kernel.schedule(next, Ev::Hello(id)).expect("future");
    }

    pub(crate) fn on_dsdv_dump(&mut self, id: UavId) {
        let now = self.now();
        if !self.nodes[id as usize].alive {
            return;
        }
        self.nodes[id as usize].dsdv.bump_own_sequence(now);
        self.trigger_advert(id);
        let next = now + SimTime::from_secs_f64(self.cfg.routing.dsdv_dump_interval);
        self.kernel.schedule(next, Ev::DsdvDump(id)).expect("future");
    }

    /// Reaction to a neighbor that stopped answering or went silent.
    pub(crate) fn link_lost(&mut self, id: UavId, lost: UavId) {
        let now = self.now();
        let node = &mut self.nodes[id as usize];
        match self.cfg.routing_protocol {
            RoutingProtocol::Greedy | RoutingProtocol::QRouting => {
                node.neighbors.remove(lost);
            }
            RoutingProtocol::Dsdv => {
                node.neighbors.remove(lost);
                if !node.dsdv.handle_link_break(lost, now).is_empty() {
                    self.trigger_advert(id);
                }
            }
            RoutingProtocol::Opar => {
                let key = (id.min(lost), id.max(lost));
                let hold = SimTime::from_secs_f64(self.cfg.routing.opar_link_holddown);
                self.failed_links.insert(key, now + hold);
            }
        }
    }

    /// Next-hop selection for a packet reaching the head of line at `id`.
    pub(crate) fn route(&mut self, id: UavId, pkt: &mut DataPacket) -> Result<UavId, DropReason> {
        let now = self.now();
        if pkt.hop_index >= self.cfg.routing.max_hops {
            return Err(DropReason::TtlExceeded);
        }
        let me = self.nodes[id as usize].motion.position;
        let next = match self.cfg.routing_protocol {
            RoutingProtocol::Greedy => {
                let node = &self.nodes[id as usize];
                let own = me.distance(pkt.dst_pos);
                let bound = pkt.bound.min(own);
                let live: Vec<&NeighborEntry> = node.neighbors.live(now, self.ttl).collect();
                if live.is_empty() {
                    return Err(DropReason::NoRoute);
                }
                let Some((n, d)) = greedy_choice(bound, live, pkt.dst, pkt.dst_pos, &pkt.visited) else {
                    return Err(DropReason::LocalMinimum);
                };
                let rec = &mut self.metrics.records[pkt.rec];
                if rec.progress.is_empty() {
                    rec.progress.push(bound);
                }
                rec.progress.push(d);
                pkt.bound = d;
                n
            }
            RoutingProtocol::Dsdv => {
                let Some(n) = self.nodes[id as usize].dsdv.next_hop(pkt.dst) else {
                    return Err(DropReason::NoRoute);
                };
                if n == id || pkt.visited.contains(&n) {
                    return Err(DropReason::RoutingLoop);
                }
                n
            }
            RoutingProtocol::Opar => {
                let broken = match pkt.route.get(1) {
                    Some(&n) => {
                        self.cfg.routing.opar_repair
                            && (!self.nodes[n as usize].alive
                                || self.nodes[n as usize].motion.position.distance(me) > self.range
                                || self.link_failed(id, n, now))
                    }
                    None => true,
                };
                if broken {
                    pkt.route = self.opar_path(id, pkt.dst, &pkt.visited).ok_or(DropReason::NoRoute)?;
                }
                let n = pkt.route[1];
                if pkt.visited.contains(&n) {
                    return Err(DropReason::RoutingLoop);
                }
                n
            }
            RoutingProtocol::QRouting => {
                let node = &mut self.nodes[id as usize];
                let cands: Vec<UavId> = node
                    .neighbors
                    .live(now, self.ttl)
                    .map(|n| n.uav_id)
                    .filter(|n| !pkt.visited.contains(n))
                    .collect();
                match q_routing_select(&node.q, pkt.dst, &cands, &mut node.rng_routing, self.cfg.routing.q_epsilon) {
                    RouteDecision::Forward(n) => n,
                    _ => return Err(DropReason::NoRoute),
                }
            }
        };
        pkt.visited.push(id);
        Ok(next)
    }

    fn link_failed(&self, a: UavId, b: UavId, now: SimTime) -> bool {
        self.failed_links.get(&(a.min(b), a.max(b))).is_some_and(|&until| until > now)
    }

    /// Ground-truth path from `src` to `dst` over live UAVs, avoiding recently failed links.
    fn opar_path(&mut self, src: UavId, dst: UavId, exclude: &[UavId]) -> Option<Vec<UavId>> {
        let now = self.now();
        self.failed_links.retain(|_, until| *until > now);
        let snap: Vec<NodeSnapshot> = self
            .nodes
            .iter()
            .filter(|n| n.alive && !exclude.contains(&n.id))
            .map(|n| NodeSnapshot { id: n.id, position: n.motion.position, velocity: n.motion.velocity() })
            .collect();
        let mut view = TopologyView::new(&snap, self.range);
        for &(a, b) in self.failed_links.keys() {
            view.remove_link(a, b);
        }
        let path = view.compute_path(src, dst, self.cfg.routing.opar_hop_time)?;
        (path.len() >= 2).then_some(path)
    }
}
