use std::rc::Rc;

use super::{Arrival, Body, Ev, Frame, Simulation};
use crate::channel::{propagation_delay, received_power};
use crate::energy::{comm_energy, EnergyCategory};
use crate::mac::{DcfStep, MacProtocol};
use crate::routing::UavId;
use crate::time::SimTime;
use crate::trace::TraceKind;

impl Simulation {
    pub(crate) fn new_frame_id(&mut self) -> u64 {
        self.next_frame_id += 1;
        self.next_frame_id
    }

    /// Puts `frame` on the air from its sender's current position.
    pub(crate) fn start_tx(&mut self, frame: Frame) {
        let now = self.now();
        let tx = frame.from;
        let air = frame.airtime;
        let frame = Rc::new(frame);
        let pos = self.nodes[tx as usize].motion.position;
        let detail = match &frame.body {
            Body::Data { .. } => {
                self.metrics.data_tx_count += 1;
                format!("data to={} attempt_frame={}", frame.to.unwrap_or(u32::MAX), frame.id)
            }
            Body::Ack { data_frame, .. } => {
                self.metrics.ack_tx_count += 1;
                format!("ack to={} for_frame={}", frame.to.unwrap_or(u32::MAX), data_frame)
            }
            Body::Hello { .. } => {
                self.metrics.control_tx_count += 1;
                "hello".to_string()
            }
            Body::Advert(e) => {
                self.metrics.control_tx_count += 1;
                format!("advert entries={}", e.len())
            }
        };
        let pkt = match &frame.body {
            Body::Data { pkt, .. } => Some(pkt.rec as u64),
            _ => None,
        };
        self.emit(TraceKind::MacTx, Some(tx), pkt, Some(pos), detail);
        self.stats.frames_sent += 1;

        let joules = comm_energy(self.cfg.tx_power, air.as_secs_f64());
        self.nodes[tx as usize].energy.debit(joules, EnergyCategory::Comm);

        let node = &mut self.nodes[tx as usize];
        for a in &mut node.arrivals {
            if !a.corrupted {
                a.corrupted = true;
                self.stats.half_duplex_losses += 1;
            }
        }
        node.transmitting = Some(frame.clone());
        node.tx_until = now + air;
        self.kernel.schedule(now + air, Ev::TxEnd(tx)).expect("future");

        for j in 0..self.nodes.len() {
            if j == tx as usize || !self.nodes[j].alive {
                continue;
            }
            let rx_pos = self.nodes[j].motion.position;
            let Ok(power) = received_power(self.cfg.tx_power, pos, rx_pos, &self.cfg.channel) else {
                continue;
            };
            if power < self.cfg.channel.sensitivity_floor {
                continue;
            }
            let prop = propagation_delay(pos, rx_pos);
            let slot = match self.free_slots.pop() {
                Some(s) => {
                    self.pending_arrivals[s as usize] = Some((frame.clone(), power));
                    s
                }
                None => {
                    self.pending_arrivals.push(Some((frame.clone(), power)));
                    (self.pending_arrivals.len() - 1) as u32
                }
            };
            let rx = j as UavId;
            self.kernel.schedule(now + prop, Ev::ArrivalStart { rx, slot }).expect("future");
            self.kernel.schedule(now + prop + air, Ev::ArrivalEnd { rx, frame: frame.id }).expect("future");
        }
        self.medium_update(tx);
    }

    pub(crate) fn on_arrival_start(&mut self, rx: UavId, slot: u32) {
        let (frame, power) = self.pending_arrivals[slot as usize].take().expect("slot filled");
        self.free_slots.push(slot);
        let node = &mut self.nodes[rx as usize];
        if !node.alive {
            return;
        }
        let corrupted = node.transmitting.is_some();
        if corrupted {
            self.stats.half_duplex_losses += 1;
        }
        node.arrivals.push(Arrival { frame, power, peak_interference: 0.0, corrupted });
        // Interference only rises when a signal starts, so checking every
        // start captures the worst case over each reception window.
        let total: f64 = node.arrivals.iter().map(|a| a.power).sum();
        let k = node.arrivals.len();
        for i in 0..k {
            let others: f64 = node.arrivals.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, a)| a.power).sum();
            debug_assert!(others <= total);
            let a = &mut node.arrivals[i];
            if others > a.peak_interference {
                a.peak_interference = others;
            }
        }
        self.medium_update(rx);
    }

    pub(crate) fn on_arrival_end(&mut self, rx: UavId, frame_id: u64) {
        let node = &mut self.nodes[rx as usize];
        let Some(i) = node.arrivals.iter().position(|a| a.frame.id == frame_id) else {
            return;
        };
        let a = node.arrivals.swap_remove(i);
        let alive = node.alive;
        self.medium_update(rx);
        if !alive {
            return;
        }
        let c = &self.cfg.channel;
        let sinr = a.power / (c.noise_power + a.peak_interference);
        let addressed = a.frame.to.is_none_or(|to| to == rx);
        if !addressed {
            return;
        }
        if a.corrupted || sinr < c.sinr_threshold_linear() {
            self.stats.receptions_failed += 1;
            return;
        }
        self.stats.receptions_ok += 1;
        self.on_frame(rx, a.frame);
    }

    pub(crate) fn sensed_power(&self, id: UavId) -> f64 {
        self.nodes[id as usize].arrivals.iter().map(|a| a.power).sum()
    }

    /// Recomputes the carrier-sense state and forwards edges to the DCF.
    pub(crate) fn medium_update(&mut self, id: UavId) {
        let now = self.now();
        let busy = self.nodes[id as usize].transmitting.is_some()
            || self.sensed_power(id) >= self.cfg.channel.carrier_sense_threshold;
        let node = &mut self.nodes[id as usize];
        if busy == node.busy {
            return;
        }
        node.busy = busy;
        if !busy {
            node.idle_since = now;
        }
        if self.mac.protocol != MacProtocol::CsmaCa || node.hol.is_none() {
            return;
        }
        if busy {
            if node.dcf.medium_busy(now, &self.mac) {
                if let Some(h) = node.mac_timer.take() {
                    self.kernel.cancel(h);
                }
            }
        } else if let DcfStep::Timer(t) = node.dcf.medium_idle(now, &self.mac) {
            self.arm_mac_timer(id, t);
        }
    }

    pub(crate) fn arm_mac_timer(&mut self, id: UavId, t: SimTime) {
        if let Some(h) = self.nodes[id as usize].mac_timer.take() {
            self.kernel.cancel(h);
        }
        let h = self.kernel.schedule(t, Ev::MacTimer(id)).expect("future");
        self.nodes[id as usize].mac_timer = Some(h);
    }
}
