//! Predictive path selection over a global topology snapshot.
//!
//! Links are annotated with their predicted residual lifetime under constant
//! velocities. A path of `L` hops is lifetime-feasible when every link on it
//! survives at least `L` times the per-hop traversal estimate. Among feasible
//! paths the fewest hops win, then the shortest total geometric length.

use crate::geometry::Vector3;
use crate::routing::UavId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSnapshot {
    pub id: UavId,
    pub position: Vector3,
    pub velocity: Vector3,
}

/// Time until two nodes currently within `range` drift apart beyond it.
///
/// Returns `f64::INFINITY` when the relative velocity is zero, and 0 when the
/// pair is already at (or past) the range.
pub fn link_lifetime(p_i: Vector3, v_i: Vector3, p_j: Vector3, v_j: Vector3, range: f64) -> f64 {
    let r = p_j - p_i;
    let w = v_j - v_i;
    let a = w.norm_squared();
    let c = r.norm_squared() - range * range;
    if c >= 0.0 {
        return if c == 0.0 && a == 0.0 { f64::INFINITY } else { 0.0 };
    }
    if a == 0.0 {
        return f64::INFINITY;
    }
    let b = 2.0 * r.dot(w);
    let disc = (b * b - 4.0 * a * c).sqrt();
    // larger root of a t² + b t + c = 0, written to avoid cancellation
    if b >= 0.0 {
        -2.0 * c / (b + disc)
    } else {
        (-b + disc) / (2.0 * a)
    }
}

/// Link-lifetime-annotated adjacency for a snapshot.
pub struct TopologyView {
    nodes: Vec<NodeSnapshot>,
    /// `lifetime[i][j]` for linked pairs, `None` when out of range.
    lifetime: Vec<Vec<Option<f64>>>,
    length: Vec<Vec<f64>>,
}

impl TopologyView {
    pub fn new(nodes: &[NodeSnapshot], range: f64) -> Self {
        let n = nodes.len();
        let mut lifetime = vec![vec![None; n]; n];
        let mut length = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = nodes[i].position.distance(nodes[j].position);
                length[i][j] = d;
                length[j][i] = d;
                if d <= range {
                    let lt = link_lifetime(nodes[i].position, nodes[i].velocity, nodes[j].position, nodes[j].velocity, range);
                    lifetime[i][j] = Some(lt);
                    lifetime[j][i] = Some(lt);
                }
            }
        }
        TopologyView { nodes: nodes.to_vec(), lifetime, length }
    }

    fn index_of(&self, id: UavId) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn has_link(&self, a: UavId, b: UavId) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.lifetime[i][j].is_some(),
            _ => false,
        }
    }

    /// Drops the link between `a` and `b` from the view.
    pub fn remove_link(&mut self, a: UavId, b: UavId) {
        if let (Some(i), Some(j)) = (self.index_of(a), self.index_of(b)) {
            self.lifetime[i][j] = None;
            self.lifetime[j][i] = None;
        }
    }

    /// Lexicographic (hops, length) shortest path using only links whose
    /// lifetime is at least `min_lifetime`.
    fn best_path(&self, src: usize, dst: usize, min_lifetime: f64) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut cost: Vec<Option<(u32, f64)>> = vec![None; n];
        let mut prev = vec![usize::MAX; n];
        let mut done = vec![false; n];
        cost[src] = Some((0, 0.0));
        loop {
            let mut u = None;
            for i in 0..n {
                if done[i] {
                    continue;
                }
                if let Some(c) = cost[i] {
                    match u {
                        Some((_, bc)) if !lex_less(c, bc) => {}
                        _ => u = Some((i, c)),
                    }
                }
            }
            let Some((u, cu)) = u else { break };
            if u == dst {
                break;
            }
            done[u] = true;
            for v in 0..n {
                if done[v] {
                    continue;
                }
                let Some(lt) = self.lifetime[u][v] else { continue };
                if lt < min_lifetime {
                    continue;
                }
                let cand = (cu.0 + 1, cu.1 + self.length[u][v]);
                if cost[v].is_none_or(|cv| lex_less(cand, cv)) {
                    cost[v] = Some(cand);
                    prev[v] = u;
                }
            }
        }
        cost[dst]?;
        let mut path = vec![dst];
        let mut cur = dst;
        while cur != src {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// Min-hop lifetime-feasible path from `src` to `dst` (inclusive of both),
    /// falling back to the unconstrained min-hop path.
    pub fn compute_path(&self, src: UavId, dst: UavId, hop_traversal: f64) -> Option<Vec<UavId>> {
        let s = self.index_of(src)?;
        let d = self.index_of(dst)?;
        if s == d {
            return Some(vec![src]);
        }
        let n = self.nodes.len();
        for hops in 1..n {
            let need = hop_traversal * hops as f64;
            if let Some(p) = self.best_path(s, d, need) {
                if p.len() - 1 <= hops {
                    return Some(p.into_iter().map(|i| self.nodes[i].id).collect());
                }
            } else {
                break;
            }
        }
        self.best_path(s, d, f64::NEG_INFINITY)
            .map(|p| p.into_iter().map(|i| self.nodes[i].id).collect())
    }
}

fn lex_less(a: (u32, f64), b: (u32, f64)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Convenience wrapper: build the view and compute one path.
pub fn opar_compute_path(
    nodes: &[NodeSnapshot],
    range: f64,
    src: UavId,
    dst: UavId,
    hop_traversal: f64,
) -> Option<Vec<UavId>> {
    TopologyView::new(nodes, range).compute_path(src, dst, hop_traversal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn still(id: UavId, x: f64, y: f64) -> NodeSnapshot {
        NodeSnapshot { id, position: Vector3::new(x, y, 50.0), velocity: Vector3::ZERO }
    }

    #[test]
    fn lifetime_equal_velocities_is_infinite() {
        let v = Vector3::new(3.0, 1.0, 0.0);
        assert_eq!(link_lifetime(Vector3::ZERO, v, Vector3::new(100.0, 0.0, 0.0), v, 249.0), f64::INFINITY);
    }

    #[test]
    fn lifetime_head_on_separation() {
        // 200 m apart, separating at 10 m/s relative, 49 m of slack
        let t = link_lifetime(
            Vector3::ZERO,
            Vector3::new(-5.0, 0.0, 0.0),
            Vector3::new(200.0, 0.0, 0.0),
            Vector3::new(5.0, 0.0, 0.0),
            249.0,
        );
        assert!((t - 4.9).abs() < 1e-12, "{t}");
    }

    #[test]
    fn lifetime_at_range_separating_is_zero() {
        let t = link_lifetime(Vector3::ZERO, Vector3::ZERO, Vector3::new(249.0, 0.0, 0.0), Vector3::new(1.0, 0.0, 0.0), 249.0);
        assert_eq!(t, 0.0);
    }

    #[test]
    fn lifetime_matches_brute_force() {
        let (pi, vi) = (Vector3::new(10.0, 20.0, 30.0), Vector3::new(3.0, -7.0, 1.0));
        let (pj, vj) = (Vector3::new(150.0, 40.0, 60.0), Vector3::new(-4.0, 9.0, 0.5));
        let t = link_lifetime(pi, vi, pj, vj, 249.0);
        // march forward in 1 µs steps from just before the predicted root
        let sep = |t: f64| (pi + vi * t).distance(pj + vj * t);
        assert!(sep(t - 1e-6) < 249.0 && sep(t + 1e-6) > 249.0);
    }

    #[test]
    fn chain_path() {
        let nodes = [still(0, 0.0, 0.0), still(1, 200.0, 0.0), still(2, 400.0, 0.0)];
        assert_eq!(opar_compute_path(&nodes, 249.0, 0, 2, 0.05), Some(vec![0, 1, 2]));
    }

    #[test]
    fn fewer_hops_preferred() {
        // 0 -> 1 -> 5 (2 hops) versus 0 -> 2 -> 3 -> 5 (3 hops)
        let nodes = [
            still(0, 0.0, 0.0),
            still(1, 200.0, 0.0),
            still(5, 400.0, 0.0),
            still(2, 100.0, -200.0),
            still(3, 300.0, -200.0),
        ];
        assert_eq!(opar_compute_path(&nodes, 249.0, 0, 5, 0.05), Some(vec![0, 1, 5]));
    }

    #[test]
    fn short_lived_link_avoided() {
        // Node 1 is racing away from node 5: the 1-5 link dies after 10 ms.
        let mut n1 = still(1, 200.0, 0.0);
        n1.velocity = Vector3::new(-100.0, 0.0, 0.0);
        let nodes = [
            still(0, 0.0, 0.0),
            n1,
            still(5, 200.0 + 248.0, 0.0),
            still(2, 100.0, -150.0),
            still(3, 250.0, -150.0),
        ];
        let lt = link_lifetime(n1.position, n1.velocity, nodes[2].position, Vector3::ZERO, 249.0);
        assert!((lt - 0.01).abs() < 1e-9);
        assert_eq!(opar_compute_path(&nodes, 249.0, 0, 5, 0.05), Some(vec![0, 2, 3, 5]));
        // with a negligible traversal estimate the 2-hop path is feasible again
        assert_eq!(opar_compute_path(&nodes, 249.0, 0, 5, 0.001), Some(vec![0, 1, 5]));
    }

    #[test]
    fn disconnected_is_none() {
        let nodes = [still(0, 0.0, 0.0), still(1, 500.0, 0.0)];
        assert_eq!(opar_compute_path(&nodes, 249.0, 0, 1, 0.05), None);
    }
}
