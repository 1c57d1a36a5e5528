//! Waypoint planning on the orbit circle.
//!
//! Each command cycle the drone can only cover a limited arc. The planner
//! climbs the quality map inside that arc from the drone's current azimuth
//! and then blends the local optimum with the previous waypoint:
//! `P_t = P_{t-1} + alpha * wrap(D_t - P_{t-1})`.

use thiserror::Error;

use crate::angle::{circular_distance, normalize_deg, wrap_180};
use crate::mocap::SkeletonFrame;
use crate::viewpoint::{
    quality_map, QualityMap, SubjectState, ViewpointError, ORBIT_HEIGHT, ORBIT_RADIUS,
};

/// Slack when testing whether an azimuth lies inside a region, degrees.
const REGION_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("invalid {what}: {value}")]
    InvalidParameter { what: &'static str, value: f64 },
    #[error(transparent)]
    Viewpoint(#[from] ViewpointError),
}

/// The arc of azimuths reachable within one command cycle.
///
/// `s_dec` and `s_acc` are the flight distances available while decelerating
/// and accelerating; they satisfy `0 <= s_dec <= s_acc <= v_max * T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionRegion {
    pub center_azimuth_deg: f64,
    pub half_width_deg: f64,
    pub s_dec: f64,
    pub s_acc: f64,
    pub v_max: f64,
    pub command_cycle: f64,
    pub radius: f64,
}

impl ActionRegion {
    pub fn contains(&self, azimuth_deg: f64) -> bool {
        circular_distance(azimuth_deg, self.center_azimuth_deg) <= self.half_width_deg + REGION_EPS
    }

    /// Whether the distance chain `0 <= s_dec <= s_acc <= v_max * T` holds.
    pub fn distances_ordered(&self) -> bool {
        0.0 <= self.s_dec
            && self.s_dec <= self.s_acc
            && self.s_acc <= self.v_max * self.command_cycle
    }
}

/// Reachable region around `current_azimuth` with `s_dec = s_acc = v_max T / 2`.
pub fn action_region(
    current_azimuth: f64,
    v_max: f64,
    command_cycle: f64,
    radius: f64,
) -> Result<ActionRegion, PlannerError> {
    if !(v_max.is_finite() && v_max >= 0.0) {
        return Err(PlannerError::InvalidParameter {
            what: "v_max",
            value: v_max,
        });
    }
    if !(command_cycle.is_finite() && command_cycle > 0.0) {
        return Err(PlannerError::InvalidParameter {
            what: "T",
            value: command_cycle,
        });
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(PlannerError::InvalidParameter {
            what: "radius",
            value: radius,
        });
    }
    let s_dec = 0.5 * v_max * command_cycle;
    let s_acc = s_dec;
    let half_width_deg = ((s_dec + s_acc) / radius).to_degrees().min(180.0);
    Ok(ActionRegion {
        center_azimuth_deg: normalize_deg(current_azimuth),
        half_width_deg,
        s_dec,
        s_acc,
        v_max,
        command_cycle,
        radius,
    })
}

/// Discrete hill-climb on the sampled map, one sample per step, never
/// leaving `region`.
///
/// Starts at the sample nearest `start_azimuth` and moves to the higher of
/// its strictly better in-region neighbours (counter-clockwise on ties)
/// until none is better. If the region is too narrow to contain that sample,
/// `start_azimuth` is returned unchanged.
pub fn local_search(map: &QualityMap, region: &ActionRegion, start_azimuth: f64) -> f64 {
    let n = map.n_samples();
    let values = map.values();
    let in_region = |i: usize| region.contains(map.azimuth(i));
    let mut i = map.nearest_index(start_azimuth);
    if !in_region(i) {
        return normalize_deg(start_azimuth);
    }
    loop {
        let mut best: Option<usize> = None;
        for j in [(i + 1) % n, (i + n - 1) % n] {
            if j != i
                && in_region(j)
                && values[j] > values[i]
                && best.is_none_or(|b| values[j] > values[b])
            {
                best = Some(j);
            }
        }
        match best {
            Some(j) => i = j,
            None => return map.azimuth(i),
        }
    }
}

/// Shortest-arc exponential smoothing of the waypoint azimuth.
pub fn smooth(prev_azimuth: f64, target_azimuth: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        normalize_deg(prev_azimuth)
    } else if alpha == 1.0 {
        normalize_deg(target_azimuth)
    } else {
        normalize_deg(prev_azimuth + alpha * wrap_180(target_azimuth - prev_azimuth))
    }
}

/// A commanded camera position on the orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub azimuth_deg: f64,
    pub radius: f64,
    pub height: f64,
    pub t_command: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub v_max: f64,
    pub command_cycle: f64,
    pub alpha: f64,
    pub speed_threshold: f64,
    pub n_samples: usize,
    pub radius: f64,
    pub height: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            v_max: 2.0,
            command_cycle: 0.5,
            alpha: 0.6,
            speed_threshold: 0.2,
            n_samples: 360,
            radius: ORBIT_RADIUS,
            height: ORBIT_HEIGHT,
        }
    }
}

/// One planning cycle on a precomputed quality map.
pub fn plan_from_map(
    map: &QualityMap,
    drone_azimuth: f64,
    prev_waypoint_azimuth: f64,
    config: &PlannerConfig,
    t_command: f64,
) -> Result<Waypoint, PlannerError> {
    if !(0.0..=1.0).contains(&config.alpha) {
        return Err(PlannerError::InvalidParameter {
            what: "alpha",
            value: config.alpha,
        });
    }
    let region = action_region(
        drone_azimuth,
        config.v_max,
        config.command_cycle,
        config.radius,
    )?;
    let local = local_search(map, &region, drone_azimuth);
    Ok(Waypoint {
        azimuth_deg: smooth(prev_waypoint_azimuth, local, config.alpha),
        radius: config.radius,
        height: config.height,
        t_command,
    })
}

/// Full planning cycle: quality map, reachable region, local optimum,
/// smoothing.
pub fn plan_step(
    frame: &SkeletonFrame,
    state: &SubjectState,
    drone_azimuth: f64,
    prev_waypoint_azimuth: f64,
    config: &PlannerConfig,
) -> Result<Waypoint, PlannerError> {
    let map = quality_map(frame, state, config.speed_threshold, config.n_samples)?;
    plan_from_map(&map, drone_azimuth, prev_waypoint_azimuth, config, frame.t)
}
