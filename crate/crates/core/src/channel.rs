//! Free-space path loss, propagation delay and SINR-based reception.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vector3;
use crate::time::SimTime;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("transmitter and receiver are co-located")]
    DegenerateGeometry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub carrier_frequency: f64,
    pub noise_power: f64,
    pub sinr_threshold_db: f64,
    pub bit_rate: f64,
    pub bandwidth: f64,
    pub path_loss_exponent: f64,
    /// Signals weaker than this are not detected at all.
    pub sensitivity_floor: f64,
    /// Aggregate received power at which the medium is sensed busy.
    pub carrier_sense_threshold: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            carrier_frequency: 2.4e9,
            noise_power: 4e-11,
            sinr_threshold_db: 6.0,
            bit_rate: 2e6,
            bandwidth: 22e6,
            path_loss_exponent: 2.0,
            sensitivity_floor: 4e-11,
            carrier_sense_threshold: 4e-11,
        }
    }
}

impl ChannelParams {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    pub fn sinr_threshold_linear(&self) -> f64 {
        db_to_linear(self.sinr_threshold_db)
    }

    /// Path gain at distance `d` (omnidirectional antennas, unit gain).
    pub fn path_gain(&self, d: f64) -> f64 {
        (self.wavelength() / (4.0 * std::f64::consts::PI * d)).powf(self.path_loss_exponent)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Friis received power `p_t · (λ / 4πd)^n`.
pub fn received_power(p_t: f64, tx_pos: Vector3, rx_pos: Vector3, c: &ChannelParams) -> Result<f64, ChannelError> {
    let d = tx_pos.distance(rx_pos);
    if d == 0.0 {
        return Err(ChannelError::DegenerateGeometry);
    }
    Ok(p_t * c.path_gain(d))
}

/// Line-of-flight delay `d / c₀`, rounded to the nearest nanosecond.
pub fn propagation_delay(tx_pos: Vector3, rx_pos: Vector3) -> SimTime {
    SimTime::from_secs_f64(tx_pos.distance(rx_pos) / SPEED_OF_LIGHT)
}

/// Largest interference-free distance at which the SINR threshold is still met.
pub fn max_comm_range(c: &ChannelParams, p_t: f64) -> f64 {
    let required = c.sinr_threshold_linear() * c.noise_power;
    c.wavelength() / (4.0 * std::f64::consts::PI) * (p_t / required).powf(1.0 / c.path_loss_exponent)
}

/// An on-air emission.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub tx_id: u32,
    pub frame_id: u64,
    pub tx_power: f64,
    pub tx_position: Vector3,
    pub start: SimTime,
    pub end: SimTime,
}

impl Transmission {
    pub fn overlaps(&self, start: SimTime, end: SimTime) -> bool {
        self.start < end && start < self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Success,
    SinrFailure,
    BelowSensitivity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceptionOutcome {
    pub verdict: Verdict,
    pub min_sinr_db: f64,
    pub interferer_ids: Vec<u64>,
}

/// An interfering signal already converted to received power at the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferer {
    pub frame_id: u64,
    pub power: f64,
    pub start: SimTime,
    pub end: SimTime,
}

/// Peak summed interference power over the window `[start, end)`.
///
/// The sum is piecewise constant and only rises at an interferer's start, so
/// the maximum is attained at `start` or at some interferer start inside the window.
pub fn peak_interference(start: SimTime, end: SimTime, interferers: &[Interferer]) -> f64 {
    let active_at = |t: SimTime| -> f64 {
        interferers
            .iter()
            .filter(|i| i.start <= t && t < i.end)
            .map(|i| i.power)
            .sum()
    };
    let mut peak = active_at(start);
    for i in interferers {
        if i.start > start && i.start < end {
            peak = peak.max(active_at(i.start));
        }
    }
    peak
}

/// Worst-case SINR verdict for a signal received at `signal_power` over `[start, end)`.
pub fn judge_reception(
    signal_power: f64,
    start: SimTime,
    end: SimTime,
    interferers: &[Interferer],
    c: &ChannelParams,
) -> ReceptionOutcome {
    let overlapping: Vec<Interferer> = interferers
        .iter()
        .filter(|i| i.start < end && start < i.end)
        .copied()
        .collect();
    let interference = peak_interference(start, end, &overlapping);
    let sinr = signal_power / (c.noise_power + interference);
    let min_sinr_db = linear_to_db(sinr);
    let verdict = if signal_power < c.sensitivity_floor {
        Verdict::BelowSensitivity
    } else if sinr >= c.sinr_threshold_linear() {
        Verdict::Success
    } else {
        Verdict::SinrFailure
    };
    ReceptionOutcome {
        verdict,
        min_sinr_db,
        interferer_ids: overlapping.iter().map(|i| i.frame_id).collect(),
    }
}

/// Evaluates reception of `target` at `rx_pos` against every concurrent emission.
///
/// Transmissions from the receiver itself and the target itself are excluded
/// from the interference sum. Propagation offsets are ignored here; the
/// windows are taken as emitted.
pub fn evaluate_reception(
    target: &Transmission,
    rx_id: u32,
    rx_pos: Vector3,
    concurrent: &[Transmission],
    c: &ChannelParams,
) -> Result<ReceptionOutcome, ChannelError> {
    let signal = received_power(target.tx_power, target.tx_position, rx_pos, c)?;
    let mut interferers = Vec::new();
    for t in concurrent {
        if t.frame_id == target.frame_id || t.tx_id == rx_id {
            continue;
        }
        interferers.push(Interferer {
            frame_id: t.frame_id,
            power: received_power(t.tx_power, t.tx_position, rx_pos, c)?,
            start: t.start,
            end: t.end,
        });
    }
    Ok(judge_reception(signal, target.start, target.end, &interferers, c))
}
