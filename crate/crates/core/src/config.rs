//! Scenario configuration: flat `section.key = value` text.
//!
//! Every key has a default except `routing` and `duration`, which must be
//! present in parsed text. Unknown keys are rejected. [`ScenarioConfig::echo`]
//! writes every key and parses back to an equal config.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::channel::{max_comm_range, ChannelParams};
use crate::energy::EnergyParams;
use crate::geometry::{Bounds, Vector3};
use crate::mac::{default_ack_timeout, MacParams, MacProtocol};
use crate::mobility::{BoundaryPolicy, MobilityModel, MobilityParams};
use crate::routing::RoutingProtocol;
use crate::time::SimTime;
use crate::topology::ForceParams;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("`{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrafficKind {
    Poisson,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionDriver {
    Mobility,
    TopologyControl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficConfig {
    pub kind: TrafficKind,
    /// Packets per second per source.
    pub rate: f64,
    /// Number of sources (lowest ids); 0 means every UAV.
    pub sources: usize,
    /// Fixed destination for every packet; `None` draws one per packet.
    pub destination: Option<usize>,
    /// Seconds before the first packet may be generated.
    pub start: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutingConfig {
    pub hello_interval: f64,
    /// `None`: 2.5 hello intervals.
    pub neighbor_ttl: Option<f64>,
    pub dsdv_dump_interval: f64,
    pub q_learning_rate: f64,
    pub q_epsilon: f64,
    pub max_hops: u32,
    /// Per-hop traversal estimate used by the lifetime constraint (s).
    pub opar_hop_time: f64,
    /// Recompute the source route at a relay whose next link has broken.
    pub opar_repair: bool,
    /// How long OPAR avoids a link after it exhausted MAC retries, seconds.
    pub opar_link_holddown: f64,
    pub hello_bytes: u64,
    pub advert_base_bytes: u64,
    pub advert_entry_bytes: u64,
    pub q_ack_extra_bytes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacConfig {
    pub protocol: MacProtocol,
    pub slot: SimTime,
    pub sifs: SimTime,
    pub difs: SimTime,
    pub cw_min: u32,
    pub cw_max: u32,
    pub retry_limit: u32,
    /// `None`: derived from SIFS, ACK airtime and the maximum range.
    pub ack_timeout: Option<SimTime>,
    pub aloha_max_backoff: SimTime,
    pub immediate_access: bool,
    pub forced_backoff: Option<u32>,
    /// Unicast data is acknowledged and retried.
    pub ack: bool,
    pub queue_capacity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityConfig {
    pub model: MobilityModel,
    pub update_interval: f64,
    pub alpha: f64,
    /// Speeds are confined to `velocity ± speed_spread`.
    pub speed_spread: f64,
    pub speed_sigma: f64,
    pub direction_sigma: f64,
    pub pitch_sigma: f64,
    pub pitch_range: f64,
    pub waypoint_arrival_radius: f64,
    pub pause_time: f64,
    pub boundary: BoundaryPolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyConfig {
    /// `None`: 0.7 of the maximum range.
    pub desired_distance: Option<f64>,
    pub spring_gain: f64,
    pub speed_gain: f64,
    pub max_step_speed: f64,
    pub control_interval: f64,
    /// `None`: the maximum range.
    pub interaction_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketSizes {
    pub payload_bytes: u64,
    pub ip_header_bytes: u64,
    pub mac_header_bytes: u64,
    pub phy_header_bytes: u64,
    pub ack_bytes: u64,
}

impl PacketSizes {
    pub fn data_bits(&self) -> u64 {
        8 * (self.payload_bytes + self.ip_header_bytes + self.mac_header_bytes + self.phy_header_bytes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub routing_protocol: RoutingProtocol,
    pub duration: f64,
    pub n_uavs: usize,
    /// Nominal UAV speed (m/s).
    pub velocity: f64,
    pub seed: u64,
    pub replications: u32,
    pub bounds: Bounds,
    /// Explicit initial positions; empty means uniform random placement.
    pub positions: Vec<Vector3>,
    pub traffic: TrafficConfig,
    pub routing: RoutingConfig,
    pub mac: MacConfig,
    pub motion: MotionDriver,
    pub mobility: MobilityConfig,
    pub topology: TopologyConfig,
    pub channel: ChannelParams,
    pub tx_power: f64,
    pub energy: EnergyParams,
    pub battery: f64,
    pub energy_sample_interval: f64,
    pub packet: PacketSizes,
    pub trace: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let mac = MacParams::default();
        ScenarioConfig {
            routing_protocol: RoutingProtocol::Greedy,
            duration: 100.0,
            n_uavs: 15,
            velocity: 10.0,
            seed: 0,
            replications: 1,
            bounds: Bounds::default(),
            positions: Vec::new(),
            traffic: TrafficConfig { kind: TrafficKind::Poisson, rate: 5.0, sources: 0, destination: None, start: 1.0 },
            routing: RoutingConfig {
                hello_interval: 0.5,
                neighbor_ttl: None,
                dsdv_dump_interval: 1.0,
                q_learning_rate: 0.5,
                q_epsilon: 0.05,
                max_hops: 15,
                opar_hop_time: 0.05,
                opar_repair: false,
                opar_link_holddown: 1.25,
                hello_bytes: 50,
                advert_base_bytes: 50,
                advert_entry_bytes: 12,
                q_ack_extra_bytes: 8,
            },
            mac: MacConfig {
                protocol: mac.protocol,
                slot: mac.slot,
                sifs: mac.sifs,
                difs: mac.difs,
                cw_min: mac.cw_min,
                cw_max: mac.cw_max,
                retry_limit: mac.retry_limit,
                ack_timeout: None,
                aloha_max_backoff: mac.aloha_max_backoff,
                immediate_access: mac.immediate_access,
                forced_backoff: None,
                ack: true,
                queue_capacity: mac.queue_capacity,
            },
            motion: MotionDriver::Mobility,
            mobility: {
                let m = MobilityParams::default();
                MobilityConfig {
                    model: m.model,
                    update_interval: m.update_interval,
                    alpha: m.alpha,
                    speed_spread: 3.0,
                    speed_sigma: m.speed_sigma,
                    direction_sigma: m.direction_sigma,
                    pitch_sigma: m.pitch_sigma,
                    pitch_range: m.pitch_range,
                    waypoint_arrival_radius: m.waypoint_arrival_radius,
                    pause_time: m.pause_time,
                    boundary: m.boundary,
                }
            },
            topology: TopologyConfig {
                desired_distance: None,
                spring_gain: 1.0,
                speed_gain: 0.05,
                max_step_speed: 10.0,
                control_interval: 0.5,
                interaction_radius: None,
            },
            channel: ChannelParams::default(),
            tx_power: 0.1,
            energy: EnergyParams::default(),
            battery: 50_000.0,
            energy_sample_interval: 1.0,
            packet: PacketSizes {
                payload_bytes: 1024,
                ip_header_bytes: 20,
                mac_header_bytes: 14,
                phy_header_bytes: 24,
                ack_bytes: 30,
            },
            trace: false,
        }
    }
}

impl ScenarioConfig {
    pub fn new(routing: RoutingProtocol, duration: f64) -> Self {
        ScenarioConfig { routing_protocol: routing, duration, ..Default::default() }
    }

    pub fn max_range(&self) -> f64 {
        max_comm_range(&self.channel, self.tx_power)
    }

    pub fn ack_bits(&self) -> u64 {
        let extra = if self.routing_protocol == RoutingProtocol::QRouting { self.routing.q_ack_extra_bytes } else { 0 };
        8 * (self.packet.ack_bytes + extra)
    }

    pub fn neighbor_ttl(&self) -> f64 {
        self.routing.neighbor_ttl.unwrap_or(2.5 * self.routing.hello_interval)
    }

    pub fn mac_params(&self) -> MacParams {
        let m = &self.mac;
        let ack_air = SimTime::airtime(self.ack_bits(), self.channel.bit_rate);
        MacParams {
            protocol: m.protocol,
            slot: m.slot,
            sifs: m.sifs,
            difs: m.difs,
            cw_min: m.cw_min,
            cw_max: m.cw_max,
            retry_limit: m.retry_limit,
            ack_timeout: m.ack_timeout.unwrap_or_else(|| default_ack_timeout(m.sifs, ack_air, self.max_range())),
            aloha_max_backoff: m.aloha_max_backoff,
            immediate_access: m.immediate_access,
            forced_backoff: m.forced_backoff,
            queue_capacity: m.queue_capacity,
        }
    }

    pub fn mobility_params(&self) -> MobilityParams {
        let m = &self.mobility;
        MobilityParams {
            model: m.model,
            update_interval: m.update_interval,
            alpha: m.alpha,
            mean_speed: self.velocity,
            min_speed: (self.velocity - m.speed_spread).max(0.0),
            max_speed: self.velocity + m.speed_spread,
            speed_sigma: m.speed_sigma,
            direction_sigma: m.direction_sigma,
            pitch_sigma: m.pitch_sigma,
            pitch_range: m.pitch_range,
            waypoint_arrival_radius: m.waypoint_arrival_radius,
            pause_time: m.pause_time,
            bounds: self.bounds,
            boundary: m.boundary,
        }
    }

    pub fn force_params(&self) -> ForceParams {
        let t = &self.topology;
        let range = self.max_range();
        ForceParams {
            desired_distance: t.desired_distance.unwrap_or(0.7 * range),
            spring_gain: t.spring_gain,
            speed_gain: t.speed_gain,
            max_step_speed: t.max_step_speed,
            control_interval: t.control_interval,
            interaction_radius: t.interaction_radius.unwrap_or(range),
        }
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let field = FIELDS.iter().find(|f| f.key == key).ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
        (field.set)(self, value.trim()).map_err(|m| invalid(key, m))
    }

    /// Current text form of one key.
    pub fn get(&self, key: &str) -> Option<String> {
        FIELDS.iter().find(|f| f.key == key).map(|f| (f.get)(self))
    }

    pub fn keys() -> impl Iterator<Item = &'static str> {
        FIELDS.iter().map(|f| f.key)
    }

    /// Every key with its current value, one `key = value` per line.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        for f in FIELDS {
            let _ = writeln!(s, "{} = {}", f.key, (f.get)(self));
        }
        s
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| if v > 0.0 && v.is_finite() { Ok(()) } else { Err(invalid(key, "must be positive")) };
        let non_negative =
            |key: &str, v: f64| if v >= 0.0 && v.is_finite() { Ok(()) } else { Err(invalid(key, "must be non-negative")) };
        non_negative("duration", self.duration)?;
        non_negative("velocity", self.velocity)?;
        if self.n_uavs == 0 {
            return Err(invalid("n_uavs", "must be at least 1"));
        }
        if !self.positions.is_empty() && self.positions.len() != self.n_uavs {
            return Err(invalid("placement.positions", format!("expected {} positions", self.n_uavs)));
        }
        if let Some(p) = self.positions.iter().find(|p| !self.bounds.contains(**p)) {
            return Err(invalid("placement.positions", format!("{p:?} lies outside the map")));
        }
        positive("map.x", self.bounds.x)?;
        positive("map.y", self.bounds.y)?;
        positive("map.z", self.bounds.z)?;
        non_negative("traffic.rate", self.traffic.rate)?;
        non_negative("traffic.start", self.traffic.start)?;
        non_negative("routing.opar_link_holddown", self.routing.opar_link_holddown)?;
        if self.traffic.destination.is_some_and(|d| d >= self.n_uavs) {
            return Err(invalid("traffic.destination", "no such UAV"));
        }
        if self.traffic.sources > self.n_uavs {
            return Err(invalid("traffic.sources", "exceeds n_uavs"));
        }
        positive("routing.hello_interval", self.routing.hello_interval)?;
        if let Some(t) = self.routing.neighbor_ttl {
            positive("routing.neighbor_ttl", t)?;
        }
        positive("routing.dsdv_dump_interval", self.routing.dsdv_dump_interval)?;
        if !(self.routing.q_learning_rate > 0.0 && self.routing.q_learning_rate <= 1.0) {
            return Err(invalid("routing.q_learning_rate", "must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.routing.q_epsilon) {
            return Err(invalid("routing.q_epsilon", "must lie in [0, 1]"));
        }
        if self.routing.max_hops == 0 {
            return Err(invalid("routing.max_hops", "must be at least 1"));
        }
        non_negative("routing.opar_hop_time", self.routing.opar_hop_time)?;
        if self.mac.cw_min > self.mac.cw_max {
            return Err(invalid("mac.cw_min", "exceeds mac.cw_max"));
        }
        if self.mac.slot == SimTime::ZERO {
            return Err(invalid("mac.slot", "must be positive"));
        }
        if self.mac.queue_capacity == 0 {
            return Err(invalid("mac.queue_capacity", "must be at least 1"));
        }
        positive("mobility.update_interval", self.mobility.update_interval)?;
        if !(0.0..=1.0).contains(&self.mobility.alpha) {
            return Err(invalid("mobility.alpha", "must lie in [0, 1]"));
        }
        for (k, v) in [
            ("mobility.speed_spread", self.mobility.speed_spread),
            ("mobility.speed_sigma", self.mobility.speed_sigma),
            ("mobility.direction_sigma", self.mobility.direction_sigma),
            ("mobility.pitch_sigma", self.mobility.pitch_sigma),
            ("mobility.pitch_range", self.mobility.pitch_range),
            ("mobility.waypoint_arrival_radius", self.mobility.waypoint_arrival_radius),
            ("mobility.pause_time", self.mobility.pause_time),
            ("topology.spring_gain", self.topology.spring_gain),
            ("topology.speed_gain", self.topology.speed_gain),
            ("topology.max_step_speed", self.topology.max_step_speed),
        ] {
            non_negative(k, v)?;
        }
        if let Some(d) = self.topology.desired_distance {
            positive("topology.desired_distance", d)?;
        }
        if let Some(r) = self.topology.interaction_radius {
            positive("topology.interaction_radius", r)?;
        }
        positive("topology.control_interval", self.topology.control_interval)?;
        for (k, v) in [
            ("channel.carrier_frequency", self.channel.carrier_frequency),
            ("channel.noise_power", self.channel.noise_power),
            ("channel.bit_rate", self.channel.bit_rate),
            ("channel.bandwidth", self.channel.bandwidth),
            ("channel.path_loss_exponent", self.channel.path_loss_exponent),
            ("channel.sensitivity_floor", self.channel.sensitivity_floor),
            ("channel.carrier_sense_threshold", self.channel.carrier_sense_threshold),
            ("channel.tx_power", self.tx_power),
            ("energy.p0", self.energy.p0),
            ("energy.pi", self.energy.pi),
            ("energy.u_tip", self.energy.u_tip),
            ("energy.v0", self.energy.v0),
            ("energy.d0_drag", self.energy.d0_drag),
            ("energy.rho", self.energy.rho),
            ("energy.solidity", self.energy.s_solidity),
            ("energy.disc_area", self.energy.disc_area),
            ("energy.sample_interval", self.energy_sample_interval),
        ] {
            positive(k, v)?;
        }
        if !self.channel.sinr_threshold_db.is_finite() {
            return Err(invalid("channel.sinr_threshold_db", "must be finite"));
        }
        non_negative("energy.battery", self.battery)?;
        if self.packet.ack_bytes == 0 {
            return Err(invalid("packet.ack_bytes", "must be positive"));
        }
        Ok(())
    }
}

/// Parses configuration text, filling defaults and validating ranges.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: i + 1, message: format!("expected `key = value`, got `{line}`") });
        };
        let k = k.trim();
        if !seen.insert(k.to_string()) {
            return Err(ConfigError::Syntax { line: i + 1, message: format!("duplicate key `{k}`") });
        }
        cfg.set(k, v)?;
    }
    for required in ["routing", "duration"] {
        if !seen.contains(required) {
            return Err(ConfigError::Missing(required));
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

trait Value: Sized {
    fn show(&self) -> String;
    fn read(s: &str) -> Result<Self, String>;
}

impl Value for f64 {
    fn show(&self) -> String {
        format!("{self:?}")
    }
    fn read(s: &str) -> Result<Self, String> {
        let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("`{s}` is not finite"))
        }
    }
}

macro_rules! int_value {
    ($($t:ty),*) => {$(
        impl Value for $t {
            fn show(&self) -> String {
                self.to_string()
            }
            fn read(s: &str) -> Result<Self, String> {
                s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))
            }
        }
    )*};
}
int_value!(u32, u64, usize);

impl Value for bool {
    fn show(&self) -> String {
        self.to_string()
    }
    fn read(s: &str) -> Result<Self, String> {
        s.parse().map_err(|_| format!("`{s}` is not true/false"))
    }
}

/// Durations are written in seconds.
impl Value for SimTime {
    fn show(&self) -> String {
        let ns = self.as_nanos();
        let frac = format!("{:09}", ns % 1_000_000_000);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            format!("{}.0", ns / 1_000_000_000)
        } else {
            format!("{}.{frac}", ns / 1_000_000_000)
        }
    }
    fn read(s: &str) -> Result<Self, String> {
        let v = f64::read(s)?;
        if v < 0.0 {
            return Err("must be non-negative".into());
        }
        Ok(SimTime::from_secs_f64(v))
    }
}

impl<T: Value> Value for Option<T> {
    fn show(&self) -> String {
        match self {
            Some(v) => v.show(),
            None => "auto".into(),
        }
    }
    fn read(s: &str) -> Result<Self, String> {
        if s == "auto" {
            Ok(None)
        } else {
            T::read(s).map(Some)
        }
    }
}

/// `x,y,z; x,y,z; ...`
impl Value for Vec<Vector3> {
    fn show(&self) -> String {
        self.iter().map(|p| format!("{:?},{:?},{:?}", p.x, p.y, p.z)).collect::<Vec<_>>().join("; ")
    }
    fn read(s: &str) -> Result<Self, String> {
        s.split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                let c: Vec<f64> = t.split(',').map(|x| f64::read(x.trim())).collect::<Result<_, _>>()?;
                match c[..] {
                    [x, y, z] => Ok(Vector3::new(x, y, z)),
                    _ => Err(format!("`{t}` is not an x,y,z triple")),
                }
            })
            .collect()
    }
}

macro_rules! enum_value {
    ($t:ty { $($name:literal => $variant:expr),* $(,)? }) => {
        impl Value for $t {
            fn show(&self) -> String {
                $(if *self == $variant { return $name.to_string(); })*
                unreachable!()
            }
            fn read(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok($variant),)*
                    _ => Err(format!("`{}` is not one of: {}", s, [$($name),*].join(", "))),
                }
            }
        }
    };
}
enum_value!(RoutingProtocol {
    "greedy" => RoutingProtocol::Greedy,
    "dsdv" => RoutingProtocol::Dsdv,
    "opar" => RoutingProtocol::Opar,
    "q_routing" => RoutingProtocol::QRouting,
});
enum_value!(MacProtocol { "csma_ca" => MacProtocol::CsmaCa, "aloha" => MacProtocol::Aloha });
enum_value!(TrafficKind { "poisson" => TrafficKind::Poisson, "uniform" => TrafficKind::Uniform });
enum_value!(MotionDriver { "mobility" => MotionDriver::Mobility, "topology_control" => MotionDriver::TopologyControl });
enum_value!(MobilityModel {
    "gauss_markov" => MobilityModel::GaussMarkov,
    "random_walk" => MobilityModel::RandomWalk,
    "random_waypoint" => MobilityModel::RandomWaypoint,
});
enum_value!(BoundaryPolicy { "reflect" => BoundaryPolicy::Reflect, "clamp" => BoundaryPolicy::Clamp });

struct Field {
    key: &'static str,
    get: fn(&ScenarioConfig) -> String,
    set: fn(&mut ScenarioConfig, &str) -> Result<(), String>,
}

macro_rules! fields {
    ($($key:literal => $($path:ident).+;)*) => {
        &[$(Field {
            key: $key,
            get: |c| Value::show(&c.$($path).+),
            set: |c, v| {
                c.$($path).+ = Value::read(v)?;
                Ok(())
            },
        }),*]
    };
}

static FIELDS: &[Field] = fields! {
    "routing" => routing_protocol;
    "duration" => duration;
    "n_uavs" => n_uavs;
    "velocity" => velocity;
    "seed" => seed;
    "replications" => replications;
    "motion" => motion;
    "trace" => trace;
    "map.x" => bounds.x;
    "map.y" => bounds.y;
    "map.z" => bounds.z;
    "placement.positions" => positions;
    "traffic.kind" => traffic.kind;
    "traffic.rate" => traffic.rate;
    "traffic.sources" => traffic.sources;
    "traffic.start" => traffic.start;
    "traffic.destination" => traffic.destination;
    "routing.hello_interval" => routing.hello_interval;
    "routing.neighbor_ttl" => routing.neighbor_ttl;
    "routing.dsdv_dump_interval" => routing.dsdv_dump_interval;
    "routing.q_learning_rate" => routing.q_learning_rate;
    "routing.q_epsilon" => routing.q_epsilon;
    "routing.max_hops" => routing.max_hops;
    "routing.opar_hop_time" => routing.opar_hop_time;
    "routing.opar_repair" => routing.opar_repair;
    "routing.opar_link_holddown" => routing.opar_link_holddown;
    "routing.hello_bytes" => routing.hello_bytes;
    "routing.advert_base_bytes" => routing.advert_base_bytes;
    "routing.advert_entry_bytes" => routing.advert_entry_bytes;
    "routing.q_ack_extra_bytes" => routing.q_ack_extra_bytes;
    "mac" => mac.protocol;
    "mac.slot" => mac.slot;
    "mac.sifs" => mac.sifs;
    "mac.difs" => mac.difs;
    "mac.cw_min" => mac.cw_min;
    "mac.cw_max" => mac.cw_max;
    "mac.retry_limit" => mac.retry_limit;
    "mac.ack_timeout" => mac.ack_timeout;
    "mac.aloha_max_backoff" => mac.aloha_max_backoff;
    "mac.immediate_access" => mac.immediate_access;
    "mac.forced_backoff" => mac.forced_backoff;
    "mac.ack" => mac.ack;
    "mac.queue_capacity" => mac.queue_capacity;
    "mobility.model" => mobility.model;
    "mobility.update_interval" => mobility.update_interval;
    "mobility.alpha" => mobility.alpha;
    "mobility.speed_spread" => mobility.speed_spread;
    "mobility.speed_sigma" => mobility.speed_sigma;
    "mobility.direction_sigma" => mobility.direction_sigma;
    "mobility.pitch_sigma" => mobility.pitch_sigma;
    "mobility.pitch_range" => mobility.pitch_range;
    "mobility.waypoint_arrival_radius" => mobility.waypoint_arrival_radius;
    "mobility.pause_time" => mobility.pause_time;
    "mobility.boundary" => mobility.boundary;
    "topology.desired_distance" => topology.desired_distance;
    "topology.spring_gain" => topology.spring_gain;
    "topology.speed_gain" => topology.speed_gain;
    "topology.max_step_speed" => topology.max_step_speed;
    "topology.control_interval" => topology.control_interval;
    "topology.interaction_radius" => topology.interaction_radius;
    "channel.carrier_frequency" => channel.carrier_frequency;
    "channel.noise_power" => channel.noise_power;
    "channel.sinr_threshold_db" => channel.sinr_threshold_db;
    "channel.bit_rate" => channel.bit_rate;
    "channel.bandwidth" => channel.bandwidth;
    "channel.path_loss_exponent" => channel.path_loss_exponent;
    "channel.sensitivity_floor" => channel.sensitivity_floor;
    "channel.carrier_sense_threshold" => channel.carrier_sense_threshold;
    "channel.tx_power" => tx_power;
    "energy.p0" => energy.p0;
    "energy.pi" => energy.pi;
    "energy.u_tip" => energy.u_tip;
    "energy.v0" => energy.v0;
    "energy.d0_drag" => energy.d0_drag;
    "energy.rho" => energy.rho;
    "energy.solidity" => energy.s_solidity;
    "energy.disc_area" => energy.disc_area;
    "energy.battery" => battery;
    "energy.sample_interval" => energy_sample_interval;
    "packet.payload_bytes" => packet.payload_bytes;
    "packet.ip_header_bytes" => packet.ip_header_bytes;
    "packet.mac_header_bytes" => packet.mac_header_bytes;
    "packet.phy_header_bytes" => packet.phy_header_bytes;
    "packet.ack_bytes" => packet.ack_bytes;
};
