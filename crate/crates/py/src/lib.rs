//! Python bindings: scenario configs, single runs, sweeps, the protocol
//! comparison and a handful of channel/energy helpers.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use uavsim::channel;
use uavsim::energy;
use uavsim::geometry::Vector3;
use uavsim::harness;
use uavsim::rng;
use uavsim::routing::RoutingProtocol;
use uavsim::scenario::{self, Metrics, RunResult};
use uavsim::time::SimTime;
use uavsim::{Error, ScenarioConfig};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Config(c) => PyValueError::new_err(c.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::Kernel(k) => PyRuntimeError::new_err(k.to_string()),
    }
}

fn metrics_dict(m: &Metrics) -> BTreeMap<&'static str, Option<f64>> {
    Metrics::NAMES.iter().copied().zip(m.values()).collect()
}

/// A scenario configuration. Keys are the flat dotted names of the config file.
#[pyclass(name = "Config", from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: ScenarioConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (routing = "opar", duration = 100.0))]
    fn new(routing: &str, duration: f64) -> PyResult<Self> {
        let proto = RoutingProtocol::parse(routing)
            .ok_or_else(|| PyValueError::new_err(format!("unknown routing protocol `{routing}`")))?;
        Ok(PyConfig { inner: ScenarioConfig::new(proto, duration) })
    }

    /// Parses config-file text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        uavsim::parse_config(text)
            .map(|inner| PyConfig { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn get(&self, key: &str) -> PyResult<String> {
        self.inner.get(key).ok_or_else(|| PyValueError::new_err(format!("unknown key `{key}`")))
    }

    fn set(&mut self, key: &str, value: &str) -> PyResult<()> {
        self.inner.set(key, value).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn keys() -> Vec<&'static str> {
        ScenarioConfig::keys().collect()
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Every key with its value, in config-file form.
    fn echo(&self) -> String {
        self.inner.echo()
    }

    /// Maximum interference-free link distance (m).
    fn max_range(&self) -> f64 {
        self.inner.max_range()
    }

    fn __repr__(&self) -> String {
        format!(
            "Config(routing={}, duration={}, n_uavs={}, seed={})",
            self.inner.routing_protocol.name(),
            self.inner.duration,
            self.inner.n_uavs,
            self.inner.seed
        )
    }
}

/// Outcome of one simulation run.
#[pyclass(name = "RunResult")]
struct PyRunResult {
    inner: RunResult,
}

#[pymethods]
impl PyRunResult {
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.report.seed
    }

    /// pdr, e2e_delay, throughput, routing_load, hop_count; None where undefined.
    #[getter]
    fn metrics(&self) -> BTreeMap<&'static str, Option<f64>> {
        metrics_dict(&self.inner.report.metrics)
    }

    #[getter]
    fn generated(&self) -> u64 {
        self.inner.report.generated
    }

    #[getter]
    fn delivered(&self) -> u64 {
        self.inner.report.delivered
    }

    #[getter]
    fn drops(&self) -> BTreeMap<&'static str, u64> {
        self.inner.report.drops.clone()
    }

    #[getter]
    fn energy(&self) -> BTreeMap<&'static str, f64> {
        let e = &self.inner.report.energy;
        BTreeMap::from([
            ("propulsion_j", e.propulsion),
            ("comm_j", e.comm),
            ("residual_j", e.residual),
            ("depleted_uavs", e.depleted_uavs as f64),
        ])
    }

    #[getter]
    fn frames_sent(&self) -> u64 {
        self.inner.report.stats.frames_sent
    }

    #[getter]
    fn wall_clock_secs(&self) -> f64 {
        self.inner.report.wall_clock_secs
    }

    /// Per delivered packet: (packet_id, src, dst, e2e delay in seconds, relay count).
    fn deliveries(&self) -> Vec<(u64, u32, u32, f64, usize)> {
        self.inner
            .outcome
            .metrics
            .records
            .iter()
            .filter(|r| r.is_delivered())
            .map(|r| {
                let d = r.delivered_at.expect("delivered") - r.generated_at;
                (r.packet_id, r.src, r.dst, d.as_secs_f64(), r.hops.len())
            })
            .collect()
    }

    /// The flat key-value report.
    fn report(&self) -> String {
        self.inner.report.to_text()
    }

    /// JSON-lines trace bytes, or None when tracing was off.
    fn trace<'py>(&self, py: Python<'py>) -> Option<Bound<'py, PyBytes>> {
        self.inner.outcome.trace.as_deref().map(|t| PyBytes::new(py, t))
    }

    /// Writes report.txt (and trace.jsonl if traced) into `directory`.
    fn write(&self, directory: &str) -> PyResult<()> {
        scenario::write_outputs(&self.inner, std::path::Path::new(directory)).map_err(py_err)
    }
}

/// Runs one scenario to completion. The GIL is released while simulating.
#[pyfunction]
#[pyo3(signature = (config, seed = None, trace = None))]
fn run(py: Python<'_>, config: &PyConfig, seed: Option<u64>, trace: Option<bool>) -> PyResult<PyRunResult> {
    let mut cfg = config.inner.clone();
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = trace {
        cfg.trace = t;
    }
    let inner = py.detach(move || scenario::run_scenario(&cfg)).map_err(py_err)?;
    Ok(PyRunResult { inner })
}

/// Replicated parameter sweep. Returns one dict per value with the seeds,
/// the per-replication metrics and their mean/std summary.
#[pyfunction]
#[pyo3(signature = (config, param, values, reps = 1))]
fn sweep<'py>(
    py: Python<'py>,
    config: &PyConfig,
    param: &str,
    values: Vec<String>,
    reps: u32,
) -> PyResult<Vec<Bound<'py, pyo3::types::PyDict>>> {
    use pyo3::types::PyDict;
    let cfg = config.inner.clone();
    let param_owned = param.to_string();
    let report = py.detach(move || scenario::sweep(&cfg, &param_owned, &values, reps)).map_err(py_err)?;
    report
        .cells
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("value", &c.value)?;
            d.set_item("seeds", c.seeds.clone())?;
            d.set_item("runs", c.runs.iter().map(metrics_dict).collect::<Vec<_>>())?;
            for (name, s) in Metrics::NAMES.iter().zip(&c.summary) {
                d.set_item(format!("{name}_mean"), s.mean)?;
                d.set_item(format!("{name}_std"), s.std)?;
            }
            Ok(d)
        })
        .collect()
}

type Verdict = (String, String, String, bool);

/// Greedy vs DSDV vs OPAR across velocities. Returns (table_csv, verdicts)
/// where each verdict is (name, expected, observed, pass).
#[pyfunction]
#[pyo3(signature = (config, velocities, reps = 10))]
fn compare(
    py: Python<'_>,
    config: &PyConfig,
    velocities: Vec<f64>,
    reps: u32,
) -> PyResult<(String, Vec<Verdict>)> {
    let cfg = config.inner.clone();
    let cmp = py.detach(move || harness::compare_protocols(&cfg, &velocities, reps)).map_err(py_err)?;
    let verdicts = cmp.verdicts().into_iter().map(|v| (v.name, v.expected, v.observed, v.pass)).collect();
    Ok((cmp.to_csv(), verdicts))
}

/// Received power (W) at `rx` from a transmitter of power `p_t` at `tx`.
#[pyfunction]
fn received_power(config: &PyConfig, p_t: f64, tx: (f64, f64, f64), rx: (f64, f64, f64)) -> PyResult<f64> {
    let v = |p: (f64, f64, f64)| Vector3::new(p.0, p.1, p.2);
    channel::received_power(p_t, v(tx), v(rx), &config.inner.channel).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Propulsion power (W) at forward speed `v` with the config's rotor constants.
#[pyfunction]
fn propulsion_power(config: &PyConfig, v: f64) -> PyResult<f64> {
    energy::propulsion_power(v, &config.inner.energy).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Radiated energy (J) for a transmission of `seconds` at power `p_t`.
#[pyfunction]
fn comm_energy(p_t: f64, seconds: f64) -> f64 {
    energy::comm_energy(p_t, seconds)
}

/// Frame airtime in integer nanoseconds.
#[pyfunction]
fn airtime_ns(bits: u64, bit_rate: f64) -> u64 {
    SimTime::airtime(bits, bit_rate).as_nanos()
}

/// Seed used for replication `replication` of sweep value `value_index`.
#[pyfunction]
fn derive_seed(root: u64, value_index: u64, replication: u64) -> u64 {
    rng::derive_seed(root, value_index, replication)
}

#[pymodule]
fn uavsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConfig>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(received_power, m)?)?;
    m.add_function(wrap_pyfunction!(propulsion_power, m)?)?;
    m.add_function(wrap_pyfunction!(comm_energy, m)?)?;
    m.add_function(wrap_pyfunction!(airtime_ns, m)?)?;
    m.add_function(wrap_pyfunction!(derive_seed, m)?)?;
    Ok(())
}
