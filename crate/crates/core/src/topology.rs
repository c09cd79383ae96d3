//! Virtual-force cooperative motion and connectivity statistics.

use rand::Rng;

use crate::geometry::{Bounds, Vector3};
use crate::mobility::{enforce_bounds, BoundaryPolicy, MotionState};

#[derive(Debug, Clone, PartialEq)]
pub struct ForceParams {
    /// Spring rest length d₀ (m).
    pub desired_distance: f64,
    /// Spring constant k.
    pub spring_gain: f64,
    /// Commanded speed per unit force (m/s).
    pub speed_gain: f64,
    pub max_step_speed: f64,
    /// Seconds between control updates.
    pub control_interval: f64,
    pub interaction_radius: f64,
}

impl Default for ForceParams {
    fn default() -> Self {
        ForceParams {
            desired_distance: 174.4,
            spring_gain: 1.0,
            speed_gain: 0.05,
            max_step_speed: 10.0,
            control_interval: 0.5,
            interaction_radius: 249.1,
        }
    }
}

/// Spring force exerted on a node at `self_pos` by one neighbor.
///
/// Positive `(d - d₀)` pulls toward the neighbor, negative pushes away.
/// Coincident nodes repel along a random unit vector with magnitude `k·d₀`.
pub fn pairwise_force<R: Rng + ?Sized>(self_pos: Vector3, other: Vector3, p: &ForceParams, rng: &mut R) -> Vector3 {
    let delta = other - self_pos;
    match delta.normalized() {
        Some(u) => u * (p.spring_gain * (delta.norm() - p.desired_distance)),
        None => random_unit(rng) * (p.spring_gain * p.desired_distance),
    }
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vector3 {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n2 = v.norm_squared();
        if n2 > 1e-6 && n2 <= 1.0 {
            return v * (1.0 / n2.sqrt());
        }
    }
}

/// Net virtual force from all neighbors; zero with no neighbors.
pub fn virtual_force<R: Rng + ?Sized>(self_pos: Vector3, neighbors: &[Vector3], p: &ForceParams, rng: &mut R) -> Vector3 {
    neighbors
        .iter()
        .fold(Vector3::ZERO, |acc, &n| acc + pairwise_force(self_pos, n, p, rng))
}

/// Moves along `force` for one control interval at a saturated speed.
pub fn apply_control_step(state: &MotionState, force: Vector3, p: &ForceParams, bounds: &Bounds) -> MotionState {
    let mut next = state.clone();
    let Some(u) = force.normalized() else {
        next.speed = 0.0;
        return next;
    };
    let speed = (force.norm() * p.speed_gain).min(p.max_step_speed);
    let (pos, _) = enforce_bounds(state.position + u * (speed * p.control_interval), bounds, BoundaryPolicy::Clamp);
    next.position = pos;
    next.speed = speed;
    let horiz = (u.x * u.x + u.y * u.y).sqrt();
    next.direction = crate::mobility::wrap_angle(u.y.atan2(u.x));
    next.pitch = u.z.atan2(horiz);
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnectivityStats {
    pub component_count: usize,
    pub edge_count: usize,
    pub largest_component_size: usize,
}

/// Components of the unit-disk graph with edges where distance ≤ `range`.
pub fn connectivity_stats(positions: &[Vector3], range: f64) -> ConnectivityStats {
    let n = positions.len();
    let mut label = vec![usize::MAX; n];
    let mut edges = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if positions[i].distance(positions[j]) <= range {
                edges += 1;
            }
        }
    }
    let mut sizes = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let c = sizes.len();
        let mut stack = vec![start];
        label[start] = c;
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for v in 0..n {
                if label[v] == usize::MAX && positions[u].distance(positions[v]) <= range {
                    label[v] = c;
                    stack.push(v);
                }
            }
        }
        sizes.push(size);
    }
    ConnectivityStats {
        component_count: sizes.len(),
        edge_count: edges,
        largest_component_size: sizes.into_iter().max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(1)
    }

    fn p() -> ForceParams {
        ForceParams { desired_distance: 100.0, ..Default::default() }
    }

    #[test]
    fn equilibrium_at_rest_length() {
        let f = virtual_force(Vector3::ZERO, &[Vector3::new(100.0, 0.0, 0.0)], &p(), &mut rng());
        assert_eq!(f, Vector3::ZERO);
    }

    #[test]
    fn no_neighbors_no_force() {
        assert_eq!(virtual_force(Vector3::ZERO, &[], &p(), &mut rng()), Vector3::ZERO);
    }

    #[test]
    fn symmetric_pair_cancels() {
        let nb = [Vector3::new(150.0, 0.0, 0.0), Vector3::new(-150.0, 0.0, 0.0)];
        let f = virtual_force(Vector3::ZERO, &nb, &p(), &mut rng());
        assert!(f.norm() < 1e-12);
        let single = pairwise_force(Vector3::ZERO, nb[0], &p(), &mut rng());
        assert!((single.norm() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_nodes_repel() {
        let f = pairwise_force(Vector3::ZERO, Vector3::ZERO, &p(), &mut rng());
        assert!((f.norm() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn zero_force_keeps_position() {
        let s = MotionState::at_rest(Vector3::new(10.0, 10.0, 10.0));
        let n = apply_control_step(&s, Vector3::ZERO, &p(), &Bounds::default());
        assert_eq!(n.position, s.position);
    }

    #[test]
    fn speed_saturates() {
        let s = MotionState::at_rest(Vector3::new(300.0, 300.0, 50.0));
        let n = apply_control_step(&s, Vector3::new(1e9, 0.0, 0.0), &p(), &Bounds::default());
        assert_eq!(n.speed, 10.0);
        assert!((n.position.x - 305.0).abs() < 1e-9);
    }

    #[test]
    fn stretched_pair_approaches() {
        // Two-body integration: separation 1.5·d₀ shrinks after one step.
        let pp = p();
        let a = MotionState::at_rest(Vector3::new(200.0, 300.0, 50.0));
        let b = MotionState::at_rest(Vector3::new(350.0, 300.0, 50.0));
        let fa = virtual_force(a.position, &[b.position], &pp, &mut rng());
        let fb = virtual_force(b.position, &[a.position], &pp, &mut rng());
        let a2 = apply_control_step(&a, fa, &pp, &Bounds::default());
        let b2 = apply_control_step(&b, fb, &pp, &Bounds::default());
        let before = a.position.distance(b.position);
        let after = a2.position.distance(b2.position);
        // each moves min(50·0.05, 10)·0.5 = 1.25 m inward
        assert!((before - after - 2.5).abs() < 1e-9);
    }

    #[test]
    fn connectivity_examples() {
        let far: Vec<Vector3> = (0..5).map(|i| Vector3::new(i as f64 * 500.0, 0.0, 0.0)).collect();
        assert_eq!(connectivity_stats(&far, 249.0).component_count, 5);
        let chain: Vec<Vector3> = (0..5).map(|i| Vector3::new(i as f64 * 200.0, 0.0, 0.0)).collect();
        let s = connectivity_stats(&chain, 249.0);
        assert_eq!((s.component_count, s.edge_count, s.largest_component_size), (1, 4, 5));
    }

    proptest! {
        #[test]
        fn antisymmetric(ax in -500.0f64..500.0, ay in -500.0f64..500.0, bx in -500.0f64..500.0, by in -500.0f64..500.0) {
            prop_assume!((ax - bx).abs() + (ay - by).abs() > 1e-6);
            let a = Vector3::new(ax, ay, 0.0);
            let b = Vector3::new(bx, by, 0.0);
            let fab = pairwise_force(a, b, &p(), &mut rng());
            let fba = pairwise_force(b, a, &p(), &mut rng());
            prop_assert!((fab + fba).norm() < 1e-9);
        }
    }
}
