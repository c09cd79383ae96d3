//! Random 3D mobility models: Gauss-Markov, random walk and random waypoint.
//!
//! Every step is a pure function of the previous [`MotionState`], the model
//! parameters and a caller-supplied RNG, followed by the boundary policy.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::geometry::{Bounds, Vector3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MobilityModel {
    GaussMarkov,
    RandomWalk,
    RandomWaypoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPolicy {
    #[default]
    Reflect,
    Clamp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityParams {
    pub model: MobilityModel,
    /// Seconds between updates.
    pub update_interval: f64,
    /// Gauss-Markov memory factor.
    pub alpha: f64,
    pub mean_speed: f64,
    pub min_speed: f64,
    pub max_speed: f64,
    pub speed_sigma: f64,
    pub direction_sigma: f64,
    pub pitch_sigma: f64,
    /// Random walk pitch is drawn from `[-pitch_range, pitch_range]`.
    pub pitch_range: f64,
    pub waypoint_arrival_radius: f64,
    pub pause_time: f64,
    pub bounds: Bounds,
    pub boundary: BoundaryPolicy,
}

impl Default for MobilityParams {
    fn default() -> Self {
        MobilityParams {
            model: MobilityModel::GaussMarkov,
            update_interval: 0.1,
            alpha: 0.85,
            mean_speed: 10.0,
            min_speed: 7.0,
            max_speed: 13.0,
            speed_sigma: 1.0,
            direction_sigma: 0.1,
            pitch_sigma: 0.05,
            pitch_range: PI / 18.0,
            waypoint_arrival_radius: 5.0,
            pause_time: 0.0,
            bounds: Bounds::default(),
            boundary: BoundaryPolicy::Reflect,
        }
    }
}

/// Kinematic state of one UAV.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionState {
    pub position: Vector3,
    pub speed: f64,
    /// Azimuth in `[0, 2π)`.
    pub direction: f64,
    /// Elevation in `[-π/2, π/2]`.
    pub pitch: f64,
    /// Gauss-Markov mean heading; reflected together with the heading at walls.
    pub mean_direction: f64,
    pub mean_pitch: f64,
    pub waypoint: Option<Vector3>,
    pub pause_remaining: f64,
}

impl MotionState {
    pub fn at_rest(position: Vector3) -> Self {
        MotionState {
            position,
            speed: 0.0,
            direction: 0.0,
            pitch: 0.0,
            mean_direction: 0.0,
            mean_pitch: 0.0,
            waypoint: None,
            pause_remaining: 0.0,
        }
    }

    /// A random initial state inside `p.bounds` with speed near `p.mean_speed`.
    pub fn random<R: Rng + ?Sized>(p: &MobilityParams, rng: &mut R) -> Self {
        let position = uniform_in_box(&p.bounds, rng);
        let direction = rng.random_range(0.0..TAU);
        MotionState {
            position,
            speed: p.mean_speed.clamp(p.min_speed, p.max_speed),
            direction,
            pitch: 0.0,
            mean_direction: direction,
            mean_pitch: 0.0,
            waypoint: None,
            pause_remaining: 0.0,
        }
    }

    pub fn velocity(&self) -> Vector3 {
        Vector3::from_heading(self.direction, self.pitch) * self.speed
    }
}

pub fn uniform_in_box<R: Rng + ?Sized>(b: &Bounds, rng: &mut R) -> Vector3 {
    Vector3::new(
        rng.random::<f64>() * b.x,
        rng.random::<f64>() * b.y,
        rng.random::<f64>() * b.z,
    )
}

/// Axes on which the position was mirrored back into the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Reflection {
    pub axes: [bool; 3],
}

impl Reflection {
    pub fn any(&self) -> bool {
        self.axes.iter().any(|&a| a)
    }

    /// Negates the velocity components on the reflected axes.
    pub fn apply_to_velocity(&self, v: Vector3) -> Vector3 {
        let mut out = v;
        for axis in 0..3 {
            if self.axes[axis] {
                out.set_component(axis, -v.component(axis));
            }
        }
        out
    }

    /// Same as [`Self::apply_to_velocity`], expressed on azimuth/elevation angles.
    pub fn apply_to_heading(&self, direction: f64, pitch: f64) -> (f64, f64) {
        let mut d = direction;
        let mut p = pitch;
        if self.axes[0] {
            d = PI - d;
        }
        if self.axes[1] {
            d = -d;
        }
        if self.axes[2] {
            p = -p;
        }
        (wrap_angle(d), p)
    }
}

/// Brings `pos` back inside `bounds`.
///
/// `Reflect` mirrors about each violated face (repeatedly, for steps longer
/// than the box) and reports the reflected axes; `Clamp` projects onto the box.
pub fn enforce_bounds(pos: Vector3, bounds: &Bounds, policy: BoundaryPolicy) -> (Vector3, Reflection) {
    let mut out = pos;
    let mut refl = Reflection::default();
    for axis in 0..3 {
        let hi = bounds.extent(axis);
        let mut v = pos.component(axis);
        match policy {
            BoundaryPolicy::Clamp => {
                v = v.clamp(0.0, hi);
            }
            BoundaryPolicy::Reflect => {
                let mut flips = 0u32;
                while v < 0.0 || v > hi {
                    v = if v < 0.0 { -v } else { 2.0 * hi - v };
                    flips += 1;
                    if flips > 64 {
                        v = v.clamp(0.0, hi);
                        break;
                    }
                }
                refl.axes[axis] = flips % 2 == 1;
            }
        }
        out.set_component(axis, v);
    }
    (out, refl)
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Signed angular difference `a - b` folded into `(-π, π]`.
fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

fn advance(state: &mut MotionState, p: &MobilityParams) {
    let step = state.velocity() * p.update_interval;
    let (pos, refl) = enforce_bounds(state.position + step, &p.bounds, p.boundary);
    state.position = pos;
    if refl.any() {
        let (d, pi) = refl.apply_to_heading(state.direction, state.pitch);
        state.direction = d;
        state.pitch = pi;
        let (md, mp) = refl.apply_to_heading(state.mean_direction, state.mean_pitch);
        state.mean_direction = md;
        state.mean_pitch = mp;
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// First-order autoregressive update of speed, heading and pitch, then one
/// interval of straight flight.
pub fn gauss_markov_step<R: Rng + ?Sized>(s: &MotionState, p: &MobilityParams, rng: &mut R) -> MotionState {
    let a = p.alpha;
    let shock = (1.0 - a * a).max(0.0).sqrt();
    let (ws, wd, wp) = (normal(rng), normal(rng), normal(rng));

    let mut next = s.clone();
    next.speed = (a * s.speed + (1.0 - a) * p.mean_speed + p.speed_sigma * shock * ws)
        .clamp(p.min_speed, p.max_speed);
    let dir_offset = a * angle_diff(s.direction, s.mean_direction) + p.direction_sigma * shock * wd;
    next.direction = wrap_angle(s.mean_direction + dir_offset);
    next.pitch = (a * s.pitch + (1.0 - a) * s.mean_pitch + p.pitch_sigma * shock * wp)
        .clamp(-FRAC_PI_2, FRAC_PI_2);
    advance(&mut next, p);
    next
}

/// Fresh uniform heading, pitch and speed every interval.
pub fn random_walk_step<R: Rng + ?Sized>(s: &MotionState, p: &MobilityParams, rng: &mut R) -> MotionState {
    let mut next = s.clone();
    next.direction = rng.random_range(0.0..TAU);
    next.pitch = if p.pitch_range > 0.0 {
        rng.random_range(-p.pitch_range..=p.pitch_range)
    } else {
        0.0
    };
    next.speed = if p.max_speed > p.min_speed {
        rng.random_range(p.min_speed..=p.max_speed)
    } else {
        p.min_speed
    };
    advance(&mut next, p);
    next
}

/// Straight flight toward the current waypoint; a new waypoint (and speed) is
/// drawn once the UAV is within the arrival radius, after the optional pause.
pub fn random_waypoint_step<R: Rng + ?Sized>(
    s: &MotionState,
    p: &MobilityParams,
    rng: &mut R,
) -> MotionState {
    let mut next = s.clone();
    if next.pause_remaining > 0.0 {
        next.pause_remaining = (next.pause_remaining - p.update_interval).max(0.0);
        next.speed = 0.0;
        return next;
    }
    let arrived = match next.waypoint {
        None => true,
        Some(wp) => next.position.distance(wp) <= p.waypoint_arrival_radius,
    };
    if arrived {
        if next.waypoint.is_some() && p.pause_time > 0.0 {
            next.waypoint = None;
            next.pause_remaining = p.pause_time;
            next.speed = 0.0;
            return next;
        }
        next.waypoint = Some(uniform_in_box(&p.bounds, rng));
        next.speed = if p.max_speed > p.min_speed {
            rng.random_range(p.min_speed..=p.max_speed)
        } else {
            p.min_speed
        };
    }
    let wp = next.waypoint.expect("waypoint set above");
    let to_wp = wp - next.position;
    let dist = to_wp.norm();
    if let Some(u) = to_wp.normalized() {
        let step = (next.speed * p.update_interval).min(dist);
        next.position += u * step;
        let horiz = (u.x * u.x + u.y * u.y).sqrt();
        next.direction = wrap_angle(u.y.atan2(u.x));
        next.pitch = u.z.atan2(horiz);
    }
    next
}

/// Dispatches on `p.model`.
pub fn step<R: Rng + ?Sized>(s: &MotionState, p: &MobilityParams, rng: &mut R) -> MotionState {
    match p.model {
        MobilityModel::GaussMarkov => gauss_markov_step(s, p, rng),
        MobilityModel::RandomWalk => random_walk_step(s, p, rng),
        MobilityModel::RandomWaypoint => random_waypoint_step(s, p, rng),
    }
}
