//! Destination-sequenced distance-vector tables.
//!
//! Even sequence numbers are originated by the destination itself; odd ones
//! mark a route broken by some node on the path. A fresher sequence number
//! always wins, and among equal numbers the shorter metric wins.

use std::collections::BTreeMap;

use crate::routing::UavId;
use crate::time::SimTime;

/// Metrics at or beyond this are treated as unreachable.
pub const INFINITE_METRIC: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsdvEntry {
    pub destination: UavId,
    pub next_hop: UavId,
    /// `None` means unreachable.
    pub metric: Option<u32>,
    pub sequence_number: u64,
    pub installed_at: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdvertEntry {
    pub destination: UavId,
    pub metric: Option<u32>,
    pub sequence_number: u64,
}

/// Result of applying one advertisement.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DsdvDelta {
    pub changed: Vec<UavId>,
    pub malformed: usize,
    /// Our own sequence number had to jump past a stale "broken" report.
    pub own_seq_bumped: bool,
}

impl DsdvDelta {
    pub fn is_empty(&self) -> bool {
        self.changed.is_empty() && !self.own_seq_bumped
    }
}

#[derive(Debug, Clone)]
pub struct DsdvTable {
    owner: UavId,
    routes: BTreeMap<UavId, DsdvEntry>,
    pub malformed_total: u64,
}

impl DsdvTable {
    pub fn new(owner: UavId, now: SimTime) -> Self {
        let mut routes = BTreeMap::new();
        routes.insert(
            owner,
            DsdvEntry { destination: owner, next_hop: owner, metric: Some(0), sequence_number: 0, installed_at: now },
        );
        DsdvTable { owner, routes, malformed_total: 0 }
    }

    pub fn owner(&self) -> UavId {
        self.owner
    }

    pub fn get(&self, dst: UavId) -> Option<&DsdvEntry> {
        self.routes.get(&dst)
    }

    pub fn entries(&self) -> impl Iterator<Item = &DsdvEntry> {
        self.routes.values()
    }

    pub fn own_sequence(&self) -> u64 {
        self.routes[&self.owner].sequence_number
    }

    /// Advances our own (even) sequence number before a periodic dump.
    pub fn bump_own_sequence(&mut self, now: SimTime) {
        let e = self.routes.get_mut(&self.owner).expect("self route");
        e.sequence_number += 2;
        e.installed_at = now;
    }

    /// Full-table advertisement.
    pub fn advert(&self) -> Vec<AdvertEntry> {
        self.routes
            .values()
            .map(|e| AdvertEntry { destination: e.destination, metric: e.metric, sequence_number: e.sequence_number })
            .collect()
    }

    /// Reachable next hop toward `dst`, if any.
    pub fn next_hop(&self, dst: UavId) -> Option<UavId> {
        self.routes.get(&dst).filter(|e| e.metric.is_some()).map(|e| e.next_hop)
    }

    /// Applies an advertisement heard from `sender`.
    pub fn process_update(&mut self, advert: &[AdvertEntry], sender: UavId, now: SimTime) -> DsdvDelta {
        let mut delta = DsdvDelta::default();
        for a in advert {
            let odd = a.sequence_number % 2 == 1;
            let malformed = match a.metric {
                Some(m) => odd || m >= INFINITE_METRIC,
                None => !odd,
            };
            if malformed {
                delta.malformed += 1;
                continue;
            }
            if a.destination == self.owner {
                // Someone reports us broken with a fresher number: out-number it.
                let own = self.routes.get_mut(&self.owner).expect("self route");
                if a.sequence_number > own.sequence_number {
                    own.sequence_number = (a.sequence_number + 1) & !1;
                    own.installed_at = now;
                    delta.own_seq_bumped = true;
                }
                continue;
            }
            let metric = a.metric.map(|m| m + 1).filter(|&m| m < INFINITE_METRIC);
            let adopt = match self.routes.get(&a.destination) {
                None => metric.is_some(),
                Some(cur) => {
                    a.sequence_number > cur.sequence_number
                        || (a.sequence_number == cur.sequence_number
                            && match (metric, cur.metric) {
                                (Some(m), Some(c)) => m < c,
                                (Some(_), None) => true,
                                _ => false,
                            })
                }
            };
            if !adopt {
                continue;
            }
            let new = DsdvEntry {
                destination: a.destination,
                next_hop: sender,
                metric,
                sequence_number: a.sequence_number,
                installed_at: now,
            };
            let changed = self
                .routes
                .get(&a.destination)
                .is_none_or(|cur| cur.metric != new.metric || cur.next_hop != new.next_hop || cur.sequence_number != new.sequence_number);
            self.routes.insert(a.destination, new);
            if changed {
                delta.changed.push(a.destination);
            }
        }
        self.malformed_total += delta.malformed as u64;
        delta
    }

    /// Marks every route through `lost` as broken (odd sequence number).
    pub fn handle_link_break(&mut self, lost: UavId, now: SimTime) -> Vec<UavId> {
        let mut changed = Vec::new();
        for e in self.routes.values_mut() {
            if e.destination != self.owner && e.next_hop == lost && e.metric.is_some() {
                e.metric = None;
                e.sequence_number += 1;
                e.installed_at = now;
                changed.push(e.destination);
            }
        }
        changed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const D: UavId = 9;
    const S: UavId = 2;

    fn adv(metric: Option<u32>, seq: u64) -> AdvertEntry {
        AdvertEntry { destination: D, metric, sequence_number: seq }
    }

    #[test]
    fn adopts_into_empty_table() {
        let mut t = DsdvTable::new(0, SimTime::ZERO);
        let d = t.process_update(&[adv(Some(1), 100)], S, SimTime::ZERO);
        assert_eq!(d.changed, vec![D]);
        let e = t.get(D).unwrap();
        assert_eq!((e.next_hop, e.metric, e.sequence_number), (S, Some(2), 100));
    }

    #[test]
    fn equal_seq_better_metric() {
        let mut t = DsdvTable::new(0, SimTime::ZERO);
        t.process_update(&[adv(Some(2), 100)], 5, SimTime::ZERO);
        assert_eq!(t.get(D).unwrap().metric, Some(3));
        t.process_update(&[adv(Some(1), 100)], S, SimTime::ZERO);
        let e = t.get(D).unwrap();
        assert_eq!((e.next_hop, e.metric), (S, Some(2)));
    }

    #[test]
    fn stale_seq_ignored() {
        let mut t = DsdvTable::new(0, SimTime::ZERO);
        t.process_update(&[adv(Some(1), 102)], 5, SimTime::ZERO);
        let d = t.process_update(&[adv(Some(0), 100)], S, SimTime::ZERO);
        assert!(d.changed.is_empty());
        assert_eq!(t.get(D).unwrap().sequence_number, 102);
    }

    #[test]
    fn link_break_and_recovery() {
        let mut t = DsdvTable::new(0, SimTime::ZERO);
        t.process_update(&[adv(Some(0), 100)], S, SimTime::ZERO);
        assert_eq!(t.handle_link_break(S, SimTime::ZERO), vec![D]);
        let e = t.get(D).unwrap();
        assert_eq!((e.metric, e.sequence_number), (None, 101));
        assert_eq!(t.next_hop(D), None);
        assert!(t.handle_link_break(7, SimTime::ZERO).is_empty());
        t.process_update(&[adv(Some(0), 102)], 4, SimTime::ZERO);
        assert_eq!(t.next_hop(D), Some(4));
    }

    #[test]
    fn broken_route_propagates_unreachable() {
        let mut t = DsdvTable::new(0, SimTime::ZERO);
        t.process_update(&[adv(Some(0), 100)], S, SimTime::ZERO);
        t.process_update(&[adv(None, 101)], S, SimTime::ZERO);
        assert_eq!(t.get(D).unwrap().metric, None);
    }

    #[test]
    fn malformed_entries_counted() {
        let mut t = DsdvTable::new(0, SimTime::ZERO);
        let d = t.process_update(&[adv(Some(1), 101), adv(None, 100)], S, SimTime::ZERO);
        assert_eq!(d.malformed, 2);
        assert!(t.get(D).is_none());
    }

    #[test]
    fn own_sequence_outnumbers_broken_report() {
        let mut t = DsdvTable::new(0, SimTime::ZERO);
        let d = t.process_update(&[AdvertEntry { destination: 0, metric: None, sequence_number: 7 }], S, SimTime::ZERO);
        assert!(d.own_seq_bumped);
        assert_eq!(t.own_sequence(), 8);
    }

    proptest! {
        #[test]
        fn installed_sequence_never_decreases(
            ops in prop::collection::vec((0u32..4, 0u32..5, prop::option::of(0u32..6), 0u64..40, any::<bool>()), 1..200)
        ) {
            let mut t = DsdvTable::new(0, SimTime::ZERO);
            let mut last: BTreeMap<UavId, u64> = BTreeMap::new();
            for (sender, dst, metric, seq, brk) in ops {
                let sender = sender + 1;
                let dst = dst + 1;
                if brk {
                    t.handle_link_break(sender, SimTime::ZERO);
                } else {
                    let seq = if metric.is_some() { seq & !1 } else { seq | 1 };
                    t.process_update(&[AdvertEntry { destination: dst, metric, sequence_number: seq }], sender, SimTime::ZERO);
                }
                for e in t.entries() {
                    let prev = last.insert(e.destination, e.sequence_number).unwrap_or(0);
                    prop_assert!(e.sequence_number >= prev);
                }
            }
        }
    }
}
