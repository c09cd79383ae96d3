use std::collections::BTreeMap;

use crate::geometry::Vector3;
use crate::routing::UavId;
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborEntry {
    pub uav_id: UavId,
    pub position: Vector3,
    pub velocity: Vector3,
    pub last_heard: SimTime,
}

/// Neighbors learned from hello beacons, keyed by id (ordered for determinism).
#[derive(Debug, Clone, Default)]
pub struct NeighborTable {
    entries: BTreeMap<UavId, NeighborEntry>,
}

impl NeighborTable {
    pub fn upsert(&mut self, entry: NeighborEntry) {
        self.entries.insert(entry.uav_id, entry);
    }

    pub fn get(&self, id: UavId) -> Option<&NeighborEntry> {
        self.entries.get(&id)
    }

    pub fn remove(&mut self, id: UavId) -> Option<NeighborEntry> {
        self.entries.remove(&id)
    }

    /// Drops entries not heard for more than `ttl`; returns the evicted ids.
    pub fn evict_expired(&mut self, now: SimTime, ttl: SimTime) -> Vec<UavId> {
        let stale: Vec<UavId> = self
            .entries
            .values()
            .filter(|e| now.saturating_sub(e.last_heard) > ttl)
            .map(|e| e.uav_id)
            .collect();
        for id in &stale {
            self.entries.remove(id);
        }
        stale
    }

    /// Entries that are still fresh at `now`.
    pub fn live(&self, now: SimTime, ttl: SimTime) -> impl Iterator<Item = &NeighborEntry> {
        self.entries.values().filter(move |e| now.saturating_sub(e.last_heard) <= ttl)
    }

    pub fn contains_live(&self, id: UavId, now: SimTime, ttl: SimTime) -> bool {
        self.entries
            .get(&id)
            .is_some_and(|e| now.saturating_sub(e.last_heard) <= ttl)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &NeighborEntry> {
        self.entries.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expiry() {
        let mut t = NeighborTable::default();
        t.upsert(NeighborEntry { uav_id: 3, position: Vector3::ZERO, velocity: Vector3::ZERO, last_heard: SimTime::ZERO });
        let ttl = SimTime::from_millis(1250);
        assert!(t.evict_expired(SimTime::from_millis(1250), ttl).is_empty());
        assert_eq!(t.evict_expired(SimTime::from_millis(1251), ttl), vec![3]);
        assert!(t.is_empty());
    }
}
