pub mod channel;
pub mod config;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod kernel;
pub mod mac;
pub mod metrics;
pub mod mobility;
pub mod rng;
pub mod routing;
pub mod scenario;
pub mod sim;
pub mod time;
pub mod topology;
pub mod trace;

pub use config::{parse_config, ScenarioConfig};
pub use sim::{SimOutcome, SimStats, Simulation};
pub use error::Error;
pub use scenario::{run_scenario, sweep, RunReport, SweepReport};
