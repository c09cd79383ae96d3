//! Experiment drivers and independent oracles used by the acceptance suite.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::config::{MotionDriver, ScenarioConfig};
use crate::error::Error;
use crate::geometry::Vector3;
use crate::mac::MacProtocol;
use crate::metrics::{delay_breakdown, Terminal};
use crate::rng::derive_seed;
use crate::routing::RoutingProtocol;
use crate::scenario::{run_scenario, Metrics, Summary};
use crate::sim::{SimStats, Simulation};
use crate::time::SimTime;
use crate::topology::{connectivity_stats, ConnectivityStats};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub tolerance: String,
    pub pass: bool,
}

impl OracleResult {
    pub fn numeric(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        OracleResult {
            name: name.into(),
            expected: format!("{expected:?}"),
            observed: format!("{observed:?}"),
            tolerance: format!("{tolerance:?}"),
            pass: (expected - observed).abs() <= tolerance,
        }
    }

    pub fn ordinal(name: impl Into<String>, relation: impl Into<String>, observed: impl Into<String>, pass: bool) -> Self {
        OracleResult {
            name: name.into(),
            expected: relation.into(),
            observed: observed.into(),
            tolerance: "ordinal".into(),
            pass,
        }
    }
}

pub fn oracle_csv(results: &[OracleResult]) -> String {
    let mut s = String::from("name,expected,observed,tolerance,pass\n");
    for r in results {
        let _ = writeln!(s, "{},{},{},{},{}", r.name, r.expected, r.observed, r.tolerance, r.pass);
    }
    s
}

/// Unit-disk graph over `positions`.
pub fn geometric_graph(positions: &[Vector3], range: f64) -> Vec<Vec<usize>> {
    let n = positions.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if positions[i].distance(positions[j]) <= range {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    adj
}

/// Number of links on a shortest path, or `None` if `dst` is unreachable.
pub fn bfs_shortest_path(adj: &[Vec<usize>], src: usize, dst: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut q = VecDeque::from([src]);
    dist[src] = 0;
    while let Some(u) = q.pop_front() {
        if u == dst {
            return Some(dist[u]);
        }
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    None
}

/// Smallest `k` with `dst` in the `k`-step reachable set, from boolean matrix powers.
pub fn reachability_hops(adj: &[Vec<usize>], src: usize, dst: usize) -> Option<usize> {
    let n = adj.len();
    let mut a = vec![vec![false; n]; n];
    for (i, row) in adj.iter().enumerate() {
        for &j in row {
            a[i][j] = true;
        }
    }
    let mut reach: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
    for k in 0..n {
        if reach[src][dst] {
            return Some(k);
        }
        let mut next = reach.clone();
        for i in 0..n {
            for m in 0..n {
                if !reach[i][m] {
                    continue;
                }
                for j in 0..n {
                    next[i][j] |= a[m][j];
                }
            }
        }
        reach = next;
    }
    reach[src][dst].then_some(n)
}

/// Spearman rank correlation with average ranks for ties. `None` for degenerate input.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for k in i..=j {
                r[idx[k]] = avg;
            }
            i = j + 1;
        }
        r
    }
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx * vy).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlohaResult {
    pub offered_load: f64,
    pub frames_sent: u64,
    pub successes: u64,
    pub success_ratio: f64,
    pub expected: f64,
}

/// Ten unacknowledged pure-ALOHA emitters around a silent sink at aggregate load `g`.
pub fn aloha_config(g: f64, min_frames: u64, seed: u64) -> ScenarioConfig {
    let emitters = 10usize;
    let mut cfg = ScenarioConfig::new(RoutingProtocol::Opar, 0.0);
    let frame = SimTime::airtime(cfg.packet.data_bits(), cfg.channel.bit_rate).as_secs_f64();
    let per_node = g / (emitters as f64 * frame);
    cfg.duration = (min_frames as f64 / (emitters as f64 * per_node) * 1.05).ceil();
    cfg.seed = seed;
    cfg.n_uavs = emitters + 1;
    let centre = Vector3::new(300.0, 300.0, 50.0);
    cfg.positions = (0..emitters)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / emitters as f64;
            centre + Vector3::new(100.0 * a.cos(), 100.0 * a.sin(), 0.0)
        })
        .chain([centre])
        .collect();
    cfg.velocity = 0.0;
    cfg.mobility.speed_spread = 0.0;
    cfg.mac.protocol = MacProtocol::Aloha;
    cfg.mac.ack = false;
    cfg.mac.retry_limit = 0;
    cfg.mac.queue_capacity = usize::MAX;
    cfg.traffic.rate = per_node;
    cfg.traffic.sources = emitters;
    cfg.traffic.destination = Some(emitters);
    cfg.traffic.start = 0.0;
    cfg.battery = 1e12;
    cfg
}

pub fn aloha_experiment(g: f64, min_frames: u64, seed: u64) -> Result<AlohaResult, Error> {
    let cfg = aloha_config(g, min_frames, seed);
    let out = run_scenario(&cfg)?.outcome;
    let sent = out.metrics.data_tx_count;
    let ok = out.metrics.delivered_count;
    Ok(AlohaResult {
        offered_load: g,
        frames_sent: sent,
        successes: ok,
        success_ratio: ok as f64 / sent.max(1) as f64,
        expected: (-2.0 * g).exp(),
    })
}

/// One replication inside a protocol comparison.
#[derive(Debug, Clone)]
pub struct CompareRun {
    pub protocol: RoutingProtocol,
    pub velocity: f64,
    pub replication: u32,
    pub seed: u64,
    pub metrics: Metrics,
    pub stats: SimStats,
    pub delivered: u64,
    /// Delivered packets whose per-hop components do not add up to the end-to-end delay.
    pub reconciliation_failures: u64,
    /// Delivered greedy packets whose distance-to-destination ever failed to shrink.
    pub progress_violations: u64,
    pub loops: u64,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub protocols: Vec<RoutingProtocol>,
    pub velocities: Vec<f64>,
    pub runs: Vec<CompareRun>,
}

impl Comparison {
    fn cell(&self, p: RoutingProtocol, v: f64, k: usize) -> Summary {
        let xs: Vec<f64> = self
            .runs
            .iter()
            .filter(|r| r.protocol == p && r.velocity == v)
            .filter_map(|r| r.metrics.values()[k])
            .collect();
        Summary::of(&xs)
    }

    pub fn pdr(&self, p: RoutingProtocol, v: f64) -> Summary {
        self.cell(p, v, 0)
    }

    pub fn delay(&self, p: RoutingProtocol, v: f64) -> Summary {
        self.cell(p, v, 1)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("protocol,velocity,replications");
        for m in Metrics::NAMES {
            let _ = write!(s, ",{m}_mean,{m}_std");
        }
        s.push('\n');
        for &p in &self.protocols {
            for &v in &self.velocities {
                let reps = self.runs.iter().filter(|r| r.protocol == p && r.velocity == v).count();
                let _ = write!(s, "{},{v:?},{reps}", p.name());
                for k in 0..5 {
                    let c = self.cell(p, v, k);
                    let _ = write!(s, ",{:?},{:?}", c.mean, c.std);
                }
                s.push('\n');
            }
        }
        s
    }

    /// Ordinal checks: OPAR best PDR and lowest delay per velocity, PDR falling with velocity.
    pub fn verdicts(&self) -> Vec<OracleResult> {
        let mut out = Vec::new();
        let opar = RoutingProtocol::Opar;
        for &v in &self.velocities {
            let best = self.pdr(opar, v).mean;
            for &p in self.protocols.iter().filter(|&&p| p != opar) {
                let other = self.pdr(p, v).mean;
                out.push(OracleResult::ordinal(
                    format!("pdr opar>={} @{v}", p.name()),
                    ">=",
                    format!("{best:.4} vs {other:.4}"),
                    best >= other,
                ));
            }
            let d = self.delay(opar, v).mean;
            for &p in self.protocols.iter().filter(|&&p| p != opar) {
                let other = self.delay(p, v).mean;
                out.push(OracleResult::ordinal(
                    format!("delay opar<{} @{v}", p.name()),
                    "<",
                    format!("{d:.5} vs {other:.5}"),
                    d < other,
                ));
            }
        }
        for &p in &self.protocols {
            let means: Vec<f64> = self.velocities.iter().map(|&v| self.pdr(p, v).mean).collect();
            let rho = spearman(&self.velocities, &means);
            out.push(OracleResult::ordinal(
                format!("spearman pdr~velocity {}", p.name()),
                "<0",
                rho.map_or("undefined".into(), |r| format!("{r:.3}")),
                rho.is_some_and(|r| r < 0.0),
            ));
        }
        out
    }
}

/// Runs every protocol at every velocity with `reps` replications.
pub fn compare_protocols(cfg: &ScenarioConfig, velocities: &[f64], reps: u32) -> Result<Comparison, Error> {
    compare_protocols_with(cfg, &[RoutingProtocol::Greedy, RoutingProtocol::Dsdv, RoutingProtocol::Opar], velocities, reps)
}

pub fn compare_protocols_with(
    cfg: &ScenarioConfig,
    protocols: &[RoutingProtocol],
    velocities: &[f64],
    reps: u32,
) -> Result<Comparison, Error> {
    let mut jobs = Vec::new();
    // Seeds follow the sweep grid; every protocol sees the same seed in a cell.
    for &p in protocols {
        for (vi, &v) in velocities.iter().enumerate() {
            for r in 0..reps {
                let mut c = cfg.clone();
                c.routing_protocol = p;
                c.velocity = v;
                c.seed = derive_seed(cfg.seed, vi as u64, r as u64);
                c.trace = false;
                jobs.push((r, c));
            }
        }
    }
    let runs: Result<Vec<CompareRun>, Error> = jobs
        .into_par_iter()
        .map(|(replication, c)| {
            let res = run_scenario(&c)?;
            let l = &res.outcome.metrics;
            let delivered: Vec<_> = l.records.iter().filter(|r| r.terminal == Terminal::Delivered).collect();
            let reconciliation_failures = delivered
                .iter()
                .filter(|r| match (delay_breakdown(r), r.delivered_at) {
                    (Ok(b), Some(at)) => b.total() != at - r.generated_at,
                    _ => true,
                })
                .count() as u64;
            let progress_violations = if c.routing_protocol == RoutingProtocol::Greedy {
                delivered.iter().filter(|r| r.progress.windows(2).any(|w| w[1] >= w[0])).count() as u64
            } else {
                0
            };
            let loops = delivered.iter().filter(|r| !r.loop_free()).count() as u64;
            Ok(CompareRun {
                protocol: c.routing_protocol,
                velocity: c.velocity,
                replication,
                seed: c.seed,
                metrics: res.report.metrics,
                stats: res.report.stats,
                delivered: delivered.len() as u64,
                reconciliation_failures,
                progress_violations,
                loops,
            })
        })
        .collect();
    Ok(Comparison { protocols: protocols.to_vec(), velocities: velocities.to_vec(), runs: runs? })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectivitySample {
    pub seed: u64,
    pub start: ConnectivityStats,
    pub end: ConnectivityStats,
}

/// Runs virtual-force topology control from random starts and samples the graph at both ends.
pub fn connectivity_experiment(cfg: &ScenarioConfig, seeds: u32) -> Vec<ConnectivitySample> {
    (0..seeds)
        .into_par_iter()
        .map(|r| {
            let mut c = cfg.clone();
            c.motion = MotionDriver::TopologyControl;
            c.seed = derive_seed(cfg.seed, 0, r as u64);
            c.trace = false;
            let range = c.max_range();
            let sim = Simulation::new(&c);
            let start = connectivity_stats(&sim.positions(), range);
            let out = sim.run().expect("topology run");
            let end = connectivity_stats(&out.final_positions, range);
            ConnectivitySample { seed: c.seed, start, end }
        })
        .collect()
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}
