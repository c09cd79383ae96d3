//! Medium access: CSMA/CA (DCF) and pure ALOHA.
//!
//! [`Dcf`] is a self-contained state machine. The owner reports medium
//! busy/idle transitions and timer expiries; the machine answers with the
//! next timer deadline or a request to transmit. It never touches the event
//! queue itself, which keeps it testable without a running simulation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MacProtocol {
    CsmaCa,
    Aloha,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacParams {
    pub protocol: MacProtocol,
    pub slot: SimTime,
    pub sifs: SimTime,
    pub difs: SimTime,
    pub cw_min: u32,
    pub cw_max: u32,
    pub retry_limit: u32,
    pub ack_timeout: SimTime,
    pub aloha_max_backoff: SimTime,
    /// Skip the backoff on a first attempt when the medium was already idle for DIFS.
    pub immediate_access: bool,
    /// Test hook: use this backoff instead of a random draw.
    pub forced_backoff: Option<u32>,
    pub queue_capacity: usize,
}

impl Default for MacParams {
    fn default() -> Self {
        MacParams {
            protocol: MacProtocol::CsmaCa,
            slot: SimTime::from_micros(20),
            sifs: SimTime::from_micros(10),
            difs: SimTime::from_micros(50),
            cw_min: 31,
            cw_max: 1023,
            retry_limit: 5,
            ack_timeout: default_ack_timeout(SimTime::from_micros(10), SimTime::from_micros(120), 249.1),
            aloha_max_backoff: SimTime::from_millis(30),
            immediate_access: true,
            forced_backoff: None,
            queue_capacity: 100,
        }
    }
}

/// SIFS + ACK airtime + two max-range propagation delays + 10 µs guard.
pub fn default_ack_timeout(sifs: SimTime, ack_airtime: SimTime, max_range_m: f64) -> SimTime {
    let prop = SimTime::from_secs_f64(max_range_m / crate::channel::SPEED_OF_LIGHT);
    sifs + ack_airtime + prop + prop + SimTime::from_micros(10)
}

/// Uniform integer backoff in `[0, cw]`.
pub fn next_backoff<R: Rng + ?Sized>(cw: u32, rng: &mut R) -> u32 {
    if cw == 0 {
        0
    } else {
        rng.random_range(0..=cw)
    }
}

/// Binary exponential growth 31 → 63 → 127 …, capped at `cw_max`.
pub fn next_cw(cw: u32, cw_max: u32) -> u32 {
    (2 * (cw + 1) - 1).min(cw_max)
}

/// Transmission start on a channel that stays idle: DIFS then `k` slots.
pub fn csma_ca_start(now: SimTime, backoff_slots: u32, p: &MacParams) -> SimTime {
    now + p.difs + p.slot * backoff_slots as u64
}

/// Pure ALOHA start time: immediately on the first attempt, after a uniform
/// delay in `[0, aloha_max_backoff]` on retries.
pub fn aloha_send<R: Rng + ?Sized>(now: SimTime, attempt: u32, rng: &mut R, p: &MacParams) -> SimTime {
    if attempt == 0 {
        return now;
    }
    let max = p.aloha_max_backoff.as_nanos();
    now + SimTime::from_nanos(if max == 0 { 0 } else { rng.random_range(0..=max) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AckVerdict {
    Acked,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AckOutcome {
    pub verdict: AckVerdict,
    pub rtt: Option<SimTime>,
}

/// The interval during which an ACK for a completed data frame is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AckWindow {
    pub sent_at: SimTime,
    pub timeout: SimTime,
}

impl AckWindow {
    pub fn deadline(&self) -> SimTime {
        self.sent_at + self.timeout
    }

    /// First instant at which the timeout is declared.
    pub fn expiry(&self) -> SimTime {
        self.deadline() + SimTime::from_nanos(1)
    }

    pub fn resolve(&self, ack_at: Option<SimTime>) -> AckOutcome {
        match ack_at {
            Some(t) if t >= self.sent_at && t <= self.deadline() => {
                AckOutcome { verdict: AckVerdict::Acked, rtt: Some(t - self.sent_at) }
            }
            _ => AckOutcome { verdict: AckVerdict::Timeout, rtt: None },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MacPhase {
    Idle,
    /// Waiting for the medium to stay idle for DIFS.
    Deferring,
    /// Counting down backoff slots.
    Backoff,
    Transmitting,
    AwaitingAck,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacTxState {
    pub attempt: u32,
    pub cw: u32,
    pub backoff_remaining: u32,
    pub phase: MacPhase,
}

/// What the medium looks like from one node right now.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MediumView {
    pub busy: bool,
    pub idle_since: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcfStep {
    /// Arm (or re-arm) the single access timer at this instant.
    Timer(SimTime),
    /// Nothing to schedule; wait for a medium transition.
    Wait,
    Transmit,
}

/// Distributed coordination function for one node's head-of-line frame.
#[derive(Debug, Clone)]
pub struct Dcf {
    pub state: MacTxState,
    countdown_from: SimTime,
}

impl Dcf {
    pub fn new(cw_min: u32) -> Self {
        Dcf {
            state: MacTxState { attempt: 0, cw: cw_min, backoff_remaining: 0, phase: MacPhase::Idle },
            countdown_from: SimTime::ZERO,
        }
    }

    /// Starts channel access for the current attempt.
    pub fn begin<R: Rng + ?Sized>(&mut self, now: SimTime, medium: MediumView, p: &MacParams, rng: &mut R) -> DcfStep {
        let idle_for_difs = !medium.busy && now.saturating_sub(medium.idle_since) >= p.difs;
        let k = match p.forced_backoff {
            Some(k) => k,
            None if self.state.attempt == 0 && p.immediate_access && idle_for_difs => 0,
            None => next_backoff(self.state.cw, rng),
        };
        self.state.backoff_remaining = k;
        self.state.phase = MacPhase::Deferring;
        if medium.busy {
            DcfStep::Wait
        } else {
            DcfStep::Timer(now + p.difs)
        }
    }

    /// The medium turned busy. Returns true if an armed timer must be cancelled.
    pub fn medium_busy(&mut self, now: SimTime, p: &MacParams) -> bool {
        match self.state.phase {
            MacPhase::Deferring => true,
            MacPhase::Backoff => {
                let elapsed = (now - self.countdown_from).as_nanos() / p.slot.as_nanos().max(1);
                self.state.backoff_remaining = self.state.backoff_remaining.saturating_sub(elapsed as u32);
                self.state.phase = MacPhase::Deferring;
                true
            }
            _ => false,
        }
    }

    /// The medium turned idle.
    pub fn medium_idle(&mut self, now: SimTime, p: &MacParams) -> DcfStep {
        match self.state.phase {
            MacPhase::Deferring => DcfStep::Timer(now + p.difs),
            _ => DcfStep::Wait,
        }
    }

    /// The armed timer fired.
    pub fn timer_fired(&mut self, now: SimTime, p: &MacParams) -> DcfStep {
        match self.state.phase {
            MacPhase::Deferring if self.state.backoff_remaining == 0 => {
                self.state.phase = MacPhase::Transmitting;
                DcfStep::Transmit
            }
            MacPhase::Deferring => {
                self.state.phase = MacPhase::Backoff;
                self.countdown_from = now;
                DcfStep::Timer(now + p.slot * self.state.backoff_remaining as u64)
            }
            MacPhase::Backoff => {
                self.state.backoff_remaining = 0;
                self.state.phase = MacPhase::Transmitting;
                DcfStep::Transmit
            }
            _ => DcfStep::Wait,
        }
    }

    pub fn transmitting(&mut self) {
        self.state.phase = MacPhase::Transmitting;
    }

    pub fn awaiting_ack(&mut self) {
        self.state.phase = MacPhase::AwaitingAck;
    }

    /// Records a failed attempt. Returns false once the retry limit is exhausted.
    pub fn failed(&mut self, p: &MacParams) -> bool {
        self.state.attempt += 1;
        self.state.cw = next_cw(self.state.cw, p.cw_max);
        self.state.phase = MacPhase::Idle;
        self.state.attempt <= p.retry_limit
    }

    /// Resets for the next head-of-line frame.
    pub fn reset(&mut self, p: &MacParams) {
        self.state = MacTxState { attempt: 0, cw: p.cw_min, backoff_remaining: 0, phase: MacPhase::Idle };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn idle_since_zero() -> MediumView {
        MediumView { busy: false, idle_since: SimTime::ZERO }
    }

    #[test]
    fn idle_channel_zero_backoff_is_difs() {
        let p = MacParams::default();
        let now = SimTime::from_millis(3);
        assert_eq!(csma_ca_start(now, 0, &p), now + SimTime::from_micros(50));
        let mut d = Dcf::new(p.cw_min);
        let mut r = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(d.begin(now, idle_since_zero(), &p, &mut r), DcfStep::Timer(now + p.difs));
        assert_eq!(d.timer_fired(now + p.difs, &p), DcfStep::Transmit);
    }

    #[test]
    fn idle_channel_seven_slots() {
        let p = MacParams { forced_backoff: Some(7), ..Default::default() };
        let now = SimTime::from_millis(3);
        assert_eq!(csma_ca_start(now, 7, &p), now + SimTime::from_micros(190));
        let mut d = Dcf::new(p.cw_min);
        let mut r = ChaCha8Rng::seed_from_u64(0);
        let DcfStep::Timer(t1) = d.begin(now, idle_since_zero(), &p, &mut r) else { panic!() };
        let DcfStep::Timer(t2) = d.timer_fired(t1, &p) else { panic!() };
        assert_eq!(t2, now + SimTime::from_micros(190));
        assert_eq!(d.timer_fired(t2, &p), DcfStep::Transmit);
    }

    #[test]
    fn backoff_freezes_and_resumes() {
        let p = MacParams { forced_backoff: Some(10), ..Default::default() };
        let mut d = Dcf::new(p.cw_min);
        let mut r = ChaCha8Rng::seed_from_u64(0);
        let t0 = SimTime::from_millis(1);
        let DcfStep::Timer(t1) = d.begin(t0, idle_since_zero(), &p, &mut r) else { panic!() };
        d.timer_fired(t1, &p);
        // busy after 3.5 slots: 3 whole slots consumed
        assert!(d.medium_busy(t1 + SimTime::from_micros(70), &p));
        assert_eq!(d.state.backoff_remaining, 7);
        let resume = SimTime::from_millis(2);
        assert_eq!(d.medium_idle(resume, &p), DcfStep::Timer(resume + p.difs));
        let DcfStep::Timer(t3) = d.timer_fired(resume + p.difs, &p) else { panic!() };
        assert_eq!(t3, resume + p.difs + SimTime::from_micros(140));
    }

    #[test]
    fn busy_medium_draws_backoff_even_first_attempt() {
        let p = MacParams::default();
        let mut d = Dcf::new(p.cw_min);
        let mut r = ChaCha8Rng::seed_from_u64(3);
        let step = d.begin(SimTime::from_millis(1), MediumView { busy: true, idle_since: SimTime::ZERO }, &p, &mut r);
        assert_eq!(step, DcfStep::Wait);
        assert!(d.state.backoff_remaining <= 31);
    }

    #[test]
    fn cw_ladder() {
        let mut cw = 31;
        let mut seen = vec![cw];
        for _ in 0..7 {
            cw = next_cw(cw, 1023);
            seen.push(cw);
        }
        assert_eq!(seen, vec![31, 63, 127, 255, 511, 1023, 1023, 1023]);
    }

    #[test]
    fn retry_limit_allows_five_retries() {
        let p = MacParams::default();
        let mut d = Dcf::new(p.cw_min);
        let mut allowed = 0;
        while d.failed(&p) {
            allowed += 1;
        }
        assert_eq!(allowed, 5);
        assert_eq!(d.state.attempt, p.retry_limit + 1);
    }

    #[test]
    fn backoff_draws() {
        let mut r = ChaCha8Rng::seed_from_u64(11);
        assert_eq!(next_backoff(0, &mut r), 0);
        let n = 100_000;
        let mut sum = 0u64;
        for _ in 0..n {
            let k = next_backoff(31, &mut r);
            assert!(k <= 31);
            sum += k as u64;
        }
        let mean = sum as f64 / n as f64;
        assert!((mean - 15.5).abs() < 0.3, "{mean}");
    }

    #[test]
    fn aloha_timing() {
        let p = MacParams::default();
        let mut r = ChaCha8Rng::seed_from_u64(5);
        let now = SimTime::from_secs(2);
        assert_eq!(aloha_send(now, 0, &mut r, &p), now);
        let p10 = MacParams { aloha_max_backoff: SimTime::from_millis(10), ..p };
        for _ in 0..1000 {
            let t = aloha_send(now, 1, &mut r, &p10);
            assert!(t >= now && t <= now + SimTime::from_millis(10));
        }
    }

    #[test]
    fn ack_window_boundaries() {
        let p = MacParams::default();
        let w = AckWindow { sent_at: SimTime::from_millis(1), timeout: p.ack_timeout };
        let prop = SimTime::from_nanos(300);
        let ack_at = w.sent_at + p.sifs + SimTime::from_micros(120) + prop + prop;
        assert_eq!(w.resolve(Some(ack_at)).verdict, AckVerdict::Acked);
        assert_eq!(w.resolve(Some(w.deadline())).verdict, AckVerdict::Acked);
        assert_eq!(w.resolve(Some(w.deadline() + SimTime::from_nanos(1))).verdict, AckVerdict::Timeout);
        assert_eq!(w.resolve(None).verdict, AckVerdict::Timeout);
    }

    #[test]
    fn default_ack_timeout_is_about_142us() {
        let t = MacParams::default().ack_timeout;
        assert!(t > SimTime::from_micros(141) && t < SimTime::from_micros(142), "{t}");
    }
}
