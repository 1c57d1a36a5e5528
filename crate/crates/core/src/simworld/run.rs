//! The closed simulation loop for both camera strategies.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Vector2, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::camera::{aim_at, screen_error, CameraPose};
use super::config::{ConfigError, SimConfig};
use super::drone::{drift_noise, drone_step, orbit_position, DroneState};
use super::pid::pid_update;
use crate::angle::normalize_deg;
use crate::metrics::FrameRecord;
use crate::mocap::{MotionClip, SkeletonFrame};
use crate::planner::{plan_from_map, PlannerError, Waypoint};
use crate::viewpoint::{
    global_optimum, quality_map_with, subject_state_clamped, DescriptorSelector, QualityMap,
    SubjectState, ViewpointError,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("clip lasts {duration} s but a run needs at least two command cycles ({needed} s)")]
    ClipTooShort { duration: f64, needed: f64 },
    #[error(transparent)]
    Viewpoint(#[from] ViewpointError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Orbit planning with the viewpoint-quality planner.
    Proposed,
    /// Translation-only following at the initial offset.
    FollowMe,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Proposed => "proposed",
            Mode::FollowMe => "follow_me",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proposed" => Ok(Mode::Proposed),
            "follow_me" | "follow-me" => Ok(Mode::FollowMe),
            other => Err(format!(
                "unknown mode `{other}` (expected proposed or follow_me)"
            )),
        }
    }
}

/// Follow-Me baseline: keeps the horizontal world-frame offset from the
/// subject that it had at the start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FollowMe {
    pub offset_xy: Vector2<f64>,
    pub height: f64,
}

impl FollowMe {
    /// Offset of a camera placed at `azimuth_deg` on the orbit.
    pub fn at_azimuth(azimuth_deg: f64, radius: f64, height: f64) -> Self {
        let (s, c) = azimuth_deg.to_radians().sin_cos();
        Self {
            offset_xy: Vector2::new(radius * c, radius * s),
            height,
        }
    }

    pub fn position(&self, state: &SubjectState) -> Vector3<f64> {
        let p = state.centroid_xy + self.offset_xy;
        Vector3::new(p.x, p.y, self.height)
    }
}

/// Follow-Me camera pose for one frame, aimed at the joint centroid.
/// Composition corrections and drift are applied by the caller, exactly as
/// for the proposed method.
pub fn follow_me_step(
    frame: &SkeletonFrame,
    state: &SubjectState,
    follow: &FollowMe,
) -> CameraPose {
    let position = follow.position(state);
    let (yaw_deg, pitch_deg) = aim_at(position, frame.centroid(), 0.0);
    CameraPose {
        position,
        yaw_deg,
        pitch_deg,
    }
}

/// Output of one run: a record per simulation step, the quality map each
/// record was scored against, and every waypoint the planner published.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub mode: Mode,
    pub records: Vec<FrameRecord>,
    pub maps: Vec<QualityMap>,
    pub waypoints: Vec<Waypoint>,
}

/// Number of simulation steps covering `clip` at `rate` Hz, both ends included.
pub fn step_count(clip: &MotionClip, rate: f64) -> usize {
    (clip.duration() * rate + 1e-9).floor() as usize + 1
}

/// Runs the camera strategy `mode` over the whole clip.
///
/// Each step samples the subject, scores the orbit, (proposed mode only)
/// publishes a waypoint every command cycle, places and aims the camera,
/// records the frame, then advances the composition PID, the drone and the
/// drift. Both modes draw the same random sequence for a given seed.
pub fn run_simulation(
    clip: &MotionClip,
    config: &SimConfig,
    mode: Mode,
) -> Result<SimRun, SimError> {
    config.validate()?;
    let needed = 2.0 * config.command_cycle;
    if clip.duration() + 1e-9 < needed {
        return Err(SimError::ClipTooShort {
            duration: clip.duration(),
            needed,
        });
    }

    let dt = 1.0 / config.sim_rate;
    let cycle_steps = ((config.command_cycle * config.sim_rate).round() as usize).max(1);
    let intrinsics = config.intrinsics();
    let planner = config.planner();
    let mut pid = config.pid();
    let mut selector = DescriptorSelector::new(config.speed_threshold, config.hysteresis);
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);

    let start = clip.start();
    let mut drone = DroneState::at_rest(config.initial_azimuth);
    let follow = FollowMe::at_azimuth(config.initial_azimuth, config.radius, config.height);
    let mut waypoint_az = drone.azimuth_deg;
    let mut yaw_corr = config.initial_yaw_offset;
    let mut pitch_corr = 0.0;

    let n = step_count(clip, config.sim_rate);
    let mut records = Vec::with_capacity(n);
    let mut maps = Vec::with_capacity(n);
    let mut waypoints = Vec::new();

    for k in 0..n {
        let t = (start + k as f64 * dt).min(clip.end());
        let frame = clip.sample(t).map_err(ViewpointError::from)?;
        let state = subject_state_clamped(clip, t, config.subject_window)?;
        let descriptor = selector.select(state.speed());
        let map = quality_map_with(&frame, &state, descriptor, config.n_samples)?;

        let ideal = match mode {
            Mode::Proposed => {
                if k % cycle_steps == 0 {
                    let wp = plan_from_map(&map, drone.azimuth_deg, waypoint_az, &planner, t)?;
                    waypoint_az = wp.azimuth_deg;
                    waypoints.push(wp);
                }
                orbit_position(
                    state.centroid_xy.into(),
                    drone.azimuth_deg,
                    config.radius,
                    config.height,
                )
            }
            Mode::FollowMe => follow.position(&state),
        };
        drone.place(ideal);

        let target = frame.centroid();
        let (yaw, pitch) = aim_at(ideal, target, drone.yaw_deg);
        drone.yaw_deg = yaw;
        drone.pitch_deg = pitch;
        let camera = CameraPose {
            position: drone.true_position,
            yaw_deg: yaw + yaw_corr,
            pitch_deg: (pitch + pitch_corr).clamp(-90.0, 90.0),
        };
        let error = screen_error(&frame, &camera, &intrinsics);
        let rel = drone.true_position.xy() - state.centroid_xy;
        let actual_az = normalize_deg(rel.y.atan2(rel.x).to_degrees());

        records.push(FrameRecord {
            t,
            camera,
            commanded_position: ideal,
            screen_error: error.map(|(x, y)| [x, y]),
            screen_width: intrinsics.width_px,
            actual_azimuth_deg: actual_az,
            globalopt_azimuth_deg: global_optimum(&map, actual_az),
            waypoint_azimuth_deg: waypoint_az,
            descriptor,
            mode,
            visible: error.is_some(),
        });
        maps.push(map);

        if config.pid_enabled {
            if let Some(e) = error {
                let (dyaw, dpitch) = pid_update(&mut pid, e, &intrinsics, dt);
                yaw_corr -= dyaw;
                pitch_corr -= dpitch;
            }
        }
        if mode == Mode::Proposed {
            drone = drone_step(&drone, waypoint_az, dt, config);
        }
        drone = drift_noise(&drone, dt, config, &mut rng);
    }

    Ok(SimRun {
        mode,
        records,
        maps,
        waypoints,
    })
}
