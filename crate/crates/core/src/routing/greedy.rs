//! Geographic greedy forwarding.

use crate::geometry::Vector3;
use crate::routing::{NeighborEntry, RouteDecision, UavId};

/// Picks the neighbor strictly closer to `dst_pos` than `self_pos` that
/// minimizes the remaining distance. The destination wins outright when it is
/// a neighbor; no strictly-closer neighbor means a local minimum.
pub fn greedy_next_hop<'a, I>(self_pos: Vector3, neighbors: I, dst: UavId, dst_pos: Vector3) -> RouteDecision
where
    I: IntoIterator<Item = &'a NeighborEntry>,
{
    match greedy_choice(self_pos.distance(dst_pos), neighbors, dst, dst_pos, &[]) {
        Some((id, _)) => RouteDecision::Forward(id),
        None => RouteDecision::NoRoute,
    }
}

/// Core of greedy selection against an explicit progress bound.
///
/// A candidate must be strictly closer than `bound` and not in `exclude`.
/// Returns the chosen id together with the distance used for the decision
/// (zero for the destination itself). Ties go to the lower id.
pub fn greedy_choice<'a, I>(
    bound: f64,
    neighbors: I,
    dst: UavId,
    dst_pos: Vector3,
    exclude: &[UavId],
) -> Option<(UavId, f64)>
where
    I: IntoIterator<Item = &'a NeighborEntry>,
{
    let mut best: Option<(UavId, f64)> = None;
    for n in neighbors {
        if n.uav_id == dst {
            return Some((dst, 0.0));
        }
        if exclude.contains(&n.uav_id) {
            continue;
        }
        let d = n.position.distance(dst_pos);
        if d >= bound {
            continue;
        }
        match best {
            Some((_, bd)) if bd <= d => {}
            _ => best = Some((n.uav_id, d)),
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::SimTime;

    fn n(id: UavId, x: f64) -> NeighborEntry {
        NeighborEntry { uav_id: id, position: Vector3::new(x, 0.0, 0.0), velocity: Vector3::ZERO, last_heard: SimTime::ZERO }
    }

    #[test]
    fn destination_neighbor_wins() {
        let t = [n(1, 50.0), n(9, 200.0)];
        assert_eq!(greedy_next_hop(Vector3::ZERO, &t, 9, Vector3::new(200.0, 0.0, 0.0)), RouteDecision::Forward(9));
    }

    #[test]
    fn picks_closest_to_destination() {
        // dst at x=0; self at 120 m, neighbors at 150 m and 90 m from dst
        let dst_pos = Vector3::ZERO;
        let t = [n(1, 150.0), n(2, 90.0)];
        assert_eq!(greedy_next_hop(Vector3::new(120.0, 0.0, 0.0), &t, 7, dst_pos), RouteDecision::Forward(2));
    }

    #[test]
    fn local_minimum() {
        let t = [n(1, 150.0), n(2, 130.0)];
        assert_eq!(greedy_next_hop(Vector3::new(120.0, 0.0, 0.0), &t, 7, Vector3::ZERO), RouteDecision::NoRoute);
    }

    #[test]
    fn exclusion_and_bound() {
        let t = [n(1, 10.0), n(2, 20.0)];
        assert_eq!(greedy_choice(100.0, &t, 7, Vector3::ZERO, &[1]), Some((2, 20.0)));
        assert_eq!(greedy_choice(15.0, &t, 7, Vector3::ZERO, &[1]), None);
    }
}
