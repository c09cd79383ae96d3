//! Running configured scenarios, single or swept, and writing their outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{ConfigError, ScenarioConfig};
use crate::error::Error;
use crate::metrics::{self, DropReason, MetricsLedger};
use crate::rng::derive_seed;
use crate::sim::{SimOutcome, SimStats, Simulation};

/// The five headline metrics. `None` where the quantity is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub pdr: Option<f64>,
    pub e2e_delay: Option<f64>,
    pub throughput: f64,
    pub routing_load: Option<f64>,
    pub hop_count: Option<f64>,
}

impl Metrics {
    pub const NAMES: [&'static str; 5] = ["pdr", "e2e_delay", "throughput", "routing_load", "hop_count"];

    pub fn from_ledger(l: &MetricsLedger) -> Self {
        Metrics {
            pdr: metrics::pdr(l),
            e2e_delay: metrics::avg_e2e_delay(l),
            throughput: metrics::avg_throughput(l),
            routing_load: metrics::routing_load(l),
            hop_count: metrics::avg_hop_count(l),
        }
    }

    pub fn values(&self) -> [Option<f64>; 5] {
        [self.pdr, self.e2e_delay, Some(self.throughput), self.routing_load, self.hop_count]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyTotals {
    pub propulsion: f64,
    pub comm: f64,
    pub residual: f64,
    pub depleted_uavs: usize,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub metrics: Metrics,
    pub generated: u64,
    pub delivered: u64,
    pub drops: BTreeMap<&'static str, u64>,
    pub energy: EnergyTotals,
    pub stats: SimStats,
    /// Host time spent; kept out of [`RunReport::to_text`] so reports stay reproducible.
    pub wall_clock_secs: f64,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:?}"))
}

impl RunReport {
    /// Flat `key = value` report. The config block parses back with [`crate::parse_config`].
    pub fn to_text(&self) -> String {
        let mut s = String::from("# config\n");
        s.push_str(&self.config.echo());
        s.push_str("# results\n");
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "# {k} = {v}");
        };
        kv("seed", self.seed.to_string());
        for (name, v) in Metrics::NAMES.iter().zip(self.metrics.values()) {
            kv(name, opt(v));
        }
        kv("generated", self.generated.to_string());
        kv("delivered", self.delivered.to_string());
        for r in DropReason::ALL {
            kv(&format!("drops.{}", r.name()), self.drops.get(r.name()).copied().unwrap_or(0).to_string());
        }
        kv("energy.propulsion_j", format!("{:?}", self.energy.propulsion));
        kv("energy.comm_j", format!("{:?}", self.energy.comm));
        kv("energy.residual_j", format!("{:?}", self.energy.residual));
        kv("energy.depleted_uavs", self.energy.depleted_uavs.to_string());
        let st = &self.stats;
        kv("frames_sent", st.frames_sent.to_string());
        kv("receptions_ok", st.receptions_ok.to_string());
        kv("receptions_failed", st.receptions_failed.to_string());
        kv("retries", st.retries.to_string());
        kv("events_executed", st.events_executed.to_string());
        s
    }
}

/// A finished run: its report plus raw outcome for callers that want more.
pub struct RunResult {
    pub report: RunReport,
    pub outcome: SimOutcome,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunResult, Error> {
    cfg.validate()?;
    let started = Instant::now();
    let outcome = Simulation::new(cfg).run()?;
    let energy = EnergyTotals {
        propulsion: outcome.energy.iter().map(|e| e.spent_propulsion).sum(),
        comm: outcome.energy.iter().map(|e| e.spent_comm).sum(),
        residual: outcome.energy.iter().map(|e| e.residual).sum(),
        depleted_uavs: outcome.energy.iter().filter(|e| e.depleted).count(),
    };
    let l = &outcome.metrics;
    let report = RunReport {
        config: cfg.clone(),
        seed: cfg.seed,
        metrics: Metrics::from_ledger(l),
        generated: l.generated_count,
        delivered: l.delivered_count,
        drops: l.drop_histogram(),
        energy,
        stats: outcome.stats.clone(),
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    Ok(RunResult { report, outcome })
}

/// Writes `report.txt` and, when traced, `trace.jsonl` into `dir`.
pub fn write_outputs(result: &RunResult, dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let report = dir.join("report.txt");
    fs::write(&report, result.report.to_text()).map_err(|e| Error::io(&report, e))?;
    if let Some(trace) = &result.outcome.trace {
        let path = dir.join("trace.jsonl");
        fs::write(&path, trace).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Fails early when `dir` cannot hold output files.
pub fn check_writable(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".uavsim-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    let _ = fs::remove_file(&probe);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    /// Replications in which the metric was defined.
    pub n: usize,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Summary { mean: f64::NAN, std: f64::NAN, n };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Summary { mean, std, n }
    }
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub value: String,
    pub value_index: usize,
    pub seeds: Vec<u64>,
    pub runs: Vec<Metrics>,
    pub summary: [Summary; 5],
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub param: String,
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut s = format!("{},replications", self.param);
        for m in Metrics::NAMES {
            let _ = write!(s, ",{m}_mean,{m}_std");
        }
        s.push('\n');
        for c in &self.cells {
            let _ = write!(s, "{},{}", c.value, c.runs.len());
            for m in &c.summary {
                let _ = write!(s, ",{:?},{:?}", m.mean, m.std);
            }
            s.push('\n');
        }
        s
    }
}

/// Runs `reps` replications of `cfg` for each value of `param`, in parallel.
pub fn sweep(cfg: &ScenarioConfig, param: &str, values: &[String], reps: u32) -> Result<SweepReport, Error> {
    let mut jobs = Vec::new();
    for (vi, v) in values.iter().enumerate() {
        let mut c = cfg.clone();
        c.set(param, v)?;
        if c.get(param).is_none() {
            return Err(ConfigError::UnknownKey(param.to_string()).into());
        }
        for r in 0..reps {
            let mut c = c.clone();
            c.seed = derive_seed(cfg.seed, vi as u64, r as u64);
            c.trace = false;
            c.validate()?;
            jobs.push((vi, c));
        }
    }
    let results: Vec<Result<(usize, u64, Metrics), Error>> = jobs
        .into_par_iter()
        .map(|(vi, c)| run_scenario(&c).map(|r| (vi, c.seed, r.report.metrics)))
        .collect();
    let mut cells: Vec<SweepCell> = values
        .iter()
        .enumerate()
        .map(|(vi, v)| SweepCell { value: v.trim().to_string(), value_index: vi, seeds: vec![], runs: vec![], summary: Default::default() })
        .collect();
    for r in results {
        let (vi, seed, m) = r?;
        cells[vi].seeds.push(seed);
        cells[vi].runs.push(m);
    }
    for c in &mut cells {
        for k in 0..5 {
            let xs: Vec<f64> = c.runs.iter().filter_map(|m| m.values()[k]).collect();
            c.summary[k] = Summary::of(&xs);
        }
    }
    Ok(SweepReport { param: param.to_string(), cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_uses_sample_std() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std - 1.2909944487358056).abs() < 1e-12);
        assert_eq!(Summary::of(&[7.0]).std, 0.0);
        assert!(Summary::of(&[]).mean.is_nan());
    }
}
