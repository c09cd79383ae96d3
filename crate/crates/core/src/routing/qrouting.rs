//! Q-routing: per-(destination, neighbor) estimates of remaining delivery time.

use std::collections::BTreeMap;

use rand::Rng;

use crate::routing::{RouteDecision, UavId};

#[derive(Debug, Clone)]
pub struct QTable {
    /// `q[dst][neighbor]`, seconds. Unseen pairs read as `initial`.
    q: BTreeMap<UavId, BTreeMap<UavId, f64>>,
    pub learning_rate: f64,
    pub initial: f64,
}

impl QTable {
    pub fn new(learning_rate: f64) -> Self {
        QTable { q: BTreeMap::new(), learning_rate, initial: 0.0 }
    }

    pub fn get(&self, dst: UavId, neighbor: UavId) -> f64 {
        self.q.get(&dst).and_then(|m| m.get(&neighbor)).copied().unwrap_or(self.initial)
    }

    pub fn set(&mut self, dst: UavId, neighbor: UavId, value: f64) {
        self.q.entry(dst).or_default().insert(neighbor, value);
    }

    /// Best estimate this node can offer upstream for `dst` over `neighbors`.
    pub fn best_estimate(&self, dst: UavId, neighbors: &[UavId]) -> f64 {
        neighbors
            .iter()
            .map(|&n| self.get(dst, n))
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
            .unwrap_or(self.initial)
    }
}

/// ε-greedy choice: argmin of `q[dst][n]` (ties to the lowest id) with
/// probability `1-ε`, otherwise a uniformly random neighbor.
pub fn q_routing_select<R: Rng + ?Sized>(
    q: &QTable,
    dst: UavId,
    neighbors: &[UavId],
    rng: &mut R,
    epsilon: f64,
) -> RouteDecision {
    if neighbors.is_empty() {
        return RouteDecision::NoRoute;
    }
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        return RouteDecision::Forward(neighbors[rng.random_range(0..neighbors.len())]);
    }
    let mut best: Option<(UavId, f64)> = None;
    for &n in neighbors {
        let v = q.get(dst, n);
        match best {
            Some((bid, bv)) if bv < v || (bv == v && bid < n) => {}
            _ => best = Some((n, v)),
        }
    }
    RouteDecision::Forward(best.expect("non-empty").0)
}

/// Moves `q[dst][chosen]` toward `observed_hop_delay + neighbor_best_estimate`.
pub fn q_routing_update(q: &mut QTable, dst: UavId, chosen: UavId, observed_hop_delay: f64, neighbor_best_estimate: f64) {
    let old = q.get(dst, chosen);
    let target = observed_hop_delay + neighbor_best_estimate;
    q.set(dst, chosen, (old + q.learning_rate * (target - old)).max(0.0));
}
