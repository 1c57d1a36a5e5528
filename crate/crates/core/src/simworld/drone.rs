//! Drone motion along the orbit circle and positional drift.

use nalgebra::Vector3;
use rand::Rng;
use rand_distr::StandardNormal;

use super::config::SimConfig;
use crate::angle::{normalize_deg, wrap_180};

#[derive(Debug, Clone, PartialEq)]
pub struct DroneState {
    /// Commanded position on the orbit, degrees around the subject.
    pub azimuth_deg: f64,
    /// Signed speed along the orbit, m/s; positive is counter-clockwise.
    pub arc_velocity: f64,
    /// Where the drone believes it is: on the orbit circle.
    pub ideal_position: Vector3<f64>,
    /// `ideal_position + drift_offset`.
    pub true_position: Vector3<f64>,
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    pub drift_offset: Vector3<f64>,
}

impl DroneState {
    pub fn at_rest(azimuth_deg: f64) -> Self {
        Self {
            azimuth_deg: normalize_deg(azimuth_deg),
            arc_velocity: 0.0,
            ideal_position: Vector3::zeros(),
            true_position: Vector3::zeros(),
            yaw_deg: 0.0,
            pitch_deg: 0.0,
            drift_offset: Vector3::zeros(),
        }
    }

    /// Sets the commanded position and re-applies the current drift.
    pub fn place(&mut self, ideal: Vector3<f64>) {
        self.ideal_position = ideal;
        self.true_position = ideal + self.drift_offset;
    }
}

/// Point on the orbit circle around `center_xy` at the given height.
pub fn orbit_position(
    center_xy: [f64; 2],
    azimuth_deg: f64,
    radius: f64,
    height: f64,
) -> Vector3<f64> {
    let (s, c) = azimuth_deg.to_radians().sin_cos();
    Vector3::new(center_xy[0] + radius * c, center_xy[1] + radius * s, height)
}

#[derive(Debug, Clone, Copy)]
struct Limits {
    v_max: f64,
    a_acc: f64,
    a_dec: f64,
}

const SNAP: f64 = 1e-12;

/// Advances a 1-D point toward `goal` for `duration` seconds under the
/// time-optimal rule: brake at `a_dec` when the stopping distance reaches
/// the remaining distance (or when moving away), cruise at `v_max`,
/// otherwise accelerate at `a_acc`. Each phase is integrated in closed form,
/// so the result does not depend on how `duration` is split.
fn advance(mut x: f64, mut v: f64, goal: f64, duration: f64, lim: Limits) -> (f64, f64) {
    let mut remaining = duration;
    for _ in 0..32 {
        if remaining <= 0.0 {
            break;
        }
        let r = goal - x;
        if r.abs() <= SNAP && v.abs() <= SNAP {
            return (goal, 0.0);
        }
        let dir = if r > SNAP {
            1.0
        } else if r < -SNAP {
            -1.0
        } else {
            -v.signum()
        };
        let dist = dir * r;
        let vel = dir * v;

        let (h, acc, stops) = if vel < 0.0 {
            let t_stop = -vel / lim.a_dec;
            (remaining.min(t_stop), lim.a_dec, remaining >= t_stop)
        } else if vel * vel / (2.0 * lim.a_dec) >= dist - SNAP {
            let t_stop = vel / lim.a_dec;
            (remaining.min(t_stop), -lim.a_dec, remaining >= t_stop)
        } else if vel < lim.v_max {
            let to_cruise = (lim.v_max - vel) / lim.a_acc;
            // time until the stopping distance catches up with the remaining distance
            let (a, k) = (lim.a_acc, lim.a_dec);
            let qa = a * (a + k);
            let qb = 2.0 * vel * (a + k);
            let qc = vel * vel - 2.0 * k * dist;
            let to_brake = (-qb + (qb * qb - 4.0 * qa * qc).max(0.0).sqrt()) / (2.0 * qa);
            (remaining.min(to_cruise).min(to_brake), lim.a_acc, false)
        } else {
            let brake_dist = lim.v_max * lim.v_max / (2.0 * lim.a_dec);
            (remaining.min((dist - brake_dist) / lim.v_max), 0.0, false)
        };
        let vel0 = if acc == 0.0 { lim.v_max } else { vel };
        let moved = vel0 * h + 0.5 * acc * h * h;
        let vel1 = if stops {
            0.0
        } else {
            (vel0 + acc * h).clamp(-lim.v_max, lim.v_max)
        };
        x += dir * moved;
        v = dir * vel1;
        remaining -= h;
    }
    (x, v)
}

/// Moves the drone along the orbit toward the waypoint azimuth with a
/// trapezoidal speed profile (asymmetric acceleration and deceleration).
pub fn drone_step(
    state: &DroneState,
    waypoint_azimuth_deg: f64,
    dt: f64,
    config: &SimConfig,
) -> DroneState {
    let radius = config.radius;
    let to_go = wrap_180(waypoint_azimuth_deg - state.azimuth_deg).to_radians() * radius;
    let lim = Limits {
        v_max: config.v_max,
        a_acc: config.a_acc,
        a_dec: config.a_dec,
    };
    let (moved, v) = advance(0.0, state.arc_velocity, to_go, dt, lim);
    let azimuth = if moved == to_go {
        normalize_deg(waypoint_azimuth_deg)
    } else {
        normalize_deg(state.azimuth_deg + (moved / radius).to_degrees())
    };
    DroneState {
        azimuth_deg: azimuth,
        arc_velocity: v,
        ..state.clone()
    }
}

/// Mean-reverting random walk of the drift offset, one standard normal draw
/// per axis:
/// `d <- d * exp(-dt / tau) + sigma * sqrt(1 - exp(-2 dt / tau)) * g`.
pub fn drift_noise<R: Rng + ?Sized>(
    state: &DroneState,
    dt: f64,
    config: &SimConfig,
    rng: &mut R,
) -> DroneState {
    let decay = (-dt / config.drift_tau).exp();
    let kick = config.drift_sigma * (1.0 - decay * decay).sqrt();
    let mut drift = state.drift_offset;
    for c in drift.iter_mut() {
        let g: f64 = rng.sample(StandardNormal);
        *c = *c * decay + kick * g;
    }
    DroneState {
        drift_offset: drift,
        true_position: state.ideal_position + drift,
        ..state.clone()
    }
}
