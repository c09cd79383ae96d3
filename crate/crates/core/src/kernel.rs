//! Future-event list with insertion-order tie-breaking.
//!
//! Events are ordered by `(fire_at, seq)` where `seq` is a per-kernel
//! insertion counter, so equal timestamps execute in the order they were
//! scheduled. The kernel is pull-style: callers either drive it with
//! [`Kernel::pop_until`] or hand a closure to [`Kernel::run_until`].

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use thiserror::Error;

use crate::time::SimTime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("causality violation: event requested at {requested} but clock is at {now}")]
    CausalityViolation { now: SimTime, requested: SimTime },
    #[error("event #{seq} at {at} failed: {message}")]
    EventFault { at: SimTime, seq: u64, message: String },
}

/// Opaque handle to one scheduled event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventHandle {
    seq: u64,
}

impl EventHandle {
    pub fn seq(&self) -> u64 {
        self.seq
    }
}

struct Entry<E> {
    fire_at: SimTime,
    seq: u64,
    action: E,
}

impl<E> PartialEq for Entry<E> {
    fn eq(&self, other: &Self) -> bool {
        (self.fire_at, self.seq) == (other.fire_at, other.seq)
    }
}
impl<E> Eq for Entry<E> {}
impl<E> PartialOrd for Entry<E> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<E> Ord for Entry<E> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.fire_at, self.seq).cmp(&(other.fire_at, other.seq))
    }
}

/// Bookkeeping totals; `scheduled == executed + cancelled + pending` always holds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KernelStats {
    pub scheduled: u64,
    pub executed: u64,
    pub cancelled: u64,
}

pub struct Kernel<E> {
    now: SimTime,
    next_seq: u64,
    heap: BinaryHeap<Reverse<Entry<E>>>,
    live: HashSet<u64>,
    stats: KernelStats,
}

impl<E> Default for Kernel<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E> Kernel<E> {
    pub fn new() -> Self {
        Kernel {
            now: SimTime::ZERO,
            next_seq: 0,
            heap: BinaryHeap::new(),
            live: HashSet::new(),
            stats: KernelStats::default(),
        }
    }

    /// Timestamp of the event being executed (or the last one), 0 before the run.
    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn stats(&self) -> KernelStats {
        self.stats
    }

    pub fn pending(&self) -> usize {
        self.live.len()
    }

    pub fn schedule(&mut self, at: SimTime, action: E) -> Result<EventHandle, KernelError> {
        if at < self.now {
            return Err(KernelError::CausalityViolation { now: self.now, requested: at });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Entry { fire_at: at, seq, action }));
        self.live.insert(seq);
        self.stats.scheduled += 1;
        Ok(EventHandle { seq })
    }

    /// Schedules `action` at `now + delay`; never violates causality.
    pub fn schedule_in(&mut self, delay: SimTime, action: E) -> EventHandle {
        let at = self.now + delay;
        self.schedule(at, action).expect("relative schedule is never in the past")
    }

    /// Returns true iff the event had not yet fired and now never will.
    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        if self.live.remove(&handle.seq) {
            self.stats.cancelled += 1;
            true
        } else {
            false
        }
    }

    /// Pops the next live event with `fire_at <= t_end`, advancing the clock to it.
    pub fn pop_until(&mut self, t_end: SimTime) -> Option<(SimTime, EventHandle, E)> {
        loop {
            let top = self.heap.peek()?;
            if top.0.fire_at > t_end {
                return None;
            }
            let Reverse(entry) = self.heap.pop().expect("peeked");
            if !self.live.remove(&entry.seq) {
                continue;
            }
            self.now = entry.fire_at;
            self.stats.executed += 1;
            return Some((entry.fire_at, EventHandle { seq: entry.seq }, entry.action));
        }
    }

    /// Moves the clock forward to `t` without executing anything.
    pub fn advance_to(&mut self, t: SimTime) {
        if t > self.now {
            self.now = t;
        }
    }

    /// Executes every event with `fire_at <= t_end` in `(fire_at, seq)` order,
    /// then leaves the clock at `t_end`.
    pub fn run_until<F>(&mut self, t_end: SimTime, mut handler: F) -> Result<SimTime, KernelError>
    where
        F: FnMut(&mut Kernel<E>, E) -> Result<(), String>,
    {
        if t_end < self.now {
            return Err(KernelError::CausalityViolation { now: self.now, requested: t_end });
        }
        while let Some((at, handle, action)) = self.pop_until(t_end) {
            handler(self, action).map_err(|message| KernelError::EventFault {
                at,
                seq: handle.seq,
                message,
            })?;
        }
        self.advance_to(t_end);
        Ok(self.now)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn collect(k: &mut Kernel<&'static str>, t_end: SimTime) -> Vec<&'static str> {
        let mut out = Vec::new();
        k.run_until(t_end, |_, a| {
            out.push(a);
            Ok(())
        })
        .unwrap();
        out
    }

    #[test]
    fn equal_timestamps_run_in_insertion_order() {
        let mut k = Kernel::new();
        k.schedule(SimTime::from_nanos(100), "A").unwrap();
        k.schedule(SimTime::from_nanos(100), "B").unwrap();
        assert_eq!(collect(&mut k, SimTime::from_secs(1)), vec!["A", "B"]);
    }

    #[test]
    fn past_schedule_is_rejected() {
        let mut k: Kernel<()> = Kernel::new();
        k.advance_to(SimTime::from_nanos(100));
        let err = k.schedule(SimTime::from_nanos(50), ()).unwrap_err();
        assert_eq!(
            err,
            KernelError::CausalityViolation {
                now: SimTime::from_nanos(100),
                requested: SimTime::from_nanos(50)
            }
        );
    }

    #[test]
    fn cancelled_event_never_fires() {
        let mut k = Kernel::new();
        let h = k.schedule(SimTime::from_nanos(100), "A").unwrap();
        assert!(k.cancel(h));
        assert!(!k.cancel(h));
        assert!(collect(&mut k, SimTime::from_secs(1)).is_empty());
    }

    #[test]
    fn cancel_after_fire_is_false() {
        let mut k = Kernel::new();
        let h = k.schedule(SimTime::from_nanos(10), "A").unwrap();
        collect(&mut k, SimTime::from_nanos(10));
        assert!(!k.cancel(h));
    }

    #[test]
    fn empty_queue_runs_to_end() {
        let mut k: Kernel<()> = Kernel::new();
        assert_eq!(k.now(), SimTime::ZERO);
        let end = k.run_until(SimTime::from_secs(1), |_, _| Ok(())).unwrap();
        assert_eq!(end, SimTime::from_secs(1));
    }

    #[test]
    fn mixed_order_example() {
        let mut k = Kernel::new();
        k.schedule(SimTime::from_nanos(10), "first10").unwrap();
        k.schedule(SimTime::from_nanos(5), "five").unwrap();
        k.schedule(SimTime::from_nanos(10), "second10").unwrap();
        assert_eq!(collect(&mut k, SimTime::from_secs(1)), vec!["five", "first10", "second10"]);
    }

    #[test]
    fn future_event_stays_pending() {
        let mut k = Kernel::new();
        k.schedule(SimTime::from_secs(2), "late").unwrap();
        assert!(collect(&mut k, SimTime::from_secs(1)).is_empty());
        assert_eq!(k.pending(), 1);
        assert_eq!(k.now(), SimTime::from_secs(1));
    }

    #[test]
    fn now_inside_event() {
        let mut k = Kernel::new();
        k.schedule(SimTime::from_micros(4328), ()).unwrap();
        let mut seen = SimTime::ZERO;
        k.run_until(SimTime::from_secs(60), |k, _| {
            seen = k.now();
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.as_nanos(), 4_328_000);
        assert_eq!(k.now().as_nanos(), 60_000_000_000);
    }

    #[test]
    fn handler_fault_identifies_event() {
        let mut k = Kernel::new();
        k.schedule(SimTime::from_nanos(7), ()).unwrap();
        let err = k.run_until(SimTime::from_secs(1), |_, _| Err("boom".into())).unwrap_err();
        assert_eq!(
            err,
            KernelError::EventFault { at: SimTime::from_nanos(7), seq: 0, message: "boom".into() }
        );
    }

    proptest! {
        #[test]
        fn execution_follows_time_then_seq(
            times in prop::collection::vec(0u64..50, 1..60),
            cancel_mask in prop::collection::vec(any::<bool>(), 60),
            t_end in 0u64..60,
        ) {
            let mut k = Kernel::new();
            let mut handles = Vec::new();
            for (i, &t) in times.iter().enumerate() {
                handles.push(k.schedule(SimTime::from_nanos(t), (t, i)).unwrap());
            }
            for (h, &c) in handles.iter().zip(&cancel_mask) {
                if c { k.cancel(*h); }
            }
            let mut log = Vec::new();
            k.run_until(SimTime::from_nanos(t_end), |_, a| { log.push(a); Ok(()) }).unwrap();
            let mut sorted = log.clone();
            sorted.sort();
            prop_assert_eq!(&log, &sorted);
            prop_assert!(log.iter().all(|(t, _)| *t <= t_end));
            let s = k.stats();
            prop_assert_eq!(s.scheduled, s.executed + s.cancelled + k.pending() as u64);
        }
    }
}
