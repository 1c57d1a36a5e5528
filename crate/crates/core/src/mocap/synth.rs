//! Analytic motion clips used as test stimuli.

use std::f64::consts::TAU;
use std::str::FromStr;

use nalgebra::Vector3;

use super::{JointId, MocapError, MotionClip, SkeletonFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// Rigid T-pose translating at constant velocity, facing its motion.
    StraightWalk,
    /// Rigid T-pose moving counter-clockwise on a circle, facing its motion.
    CircleWalk,
    /// Standing subject waving the right forearm, optionally turning in place.
    InPlaceWave,
    /// Motionless T-pose.
    StaticTpose,
}

impl FromStr for SynthKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "straight_walk" => Ok(SynthKind::StraightWalk),
            "circle_walk" => Ok(SynthKind::CircleWalk),
            "in_place_wave" => Ok(SynthKind::InPlaceWave),
            "static_tpose" => Ok(SynthKind::StaticTpose),
            _ => Err(format!(
                "unknown clip kind `{s}` (expected straight_walk, circle_walk, in_place_wave or static_tpose)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    /// Walking speed for `StraightWalk`, m/s.
    pub speed_mps: f64,
    /// Facing direction (and walking direction) at t = 0, degrees from +x.
    pub heading_deg: f64,
    /// `CircleWalk` radius, m.
    pub radius_m: f64,
    /// `CircleWalk` period, s.
    pub period_s: f64,
    /// `InPlaceWave` body rotation rate, deg/s.
    pub turn_rate_deg_s: f64,
    /// `InPlaceWave` forearm oscillation frequency, Hz.
    pub wave_hz: f64,
    /// Horizontal start position (circle center for `CircleWalk`).
    pub origin: [f64; 2],
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            speed_mps: 1.0,
            heading_deg: 0.0,
            radius_m: 2.0,
            period_s: 8.0,
            turn_rate_deg_s: 0.0,
            wave_hz: 0.5,
            origin: [0.0, 0.0],
        }
    }
}

/// T-pose in the body frame: facing +x, left along +y, feet on the ground.
/// The horizontal centroid is at the origin.
const TPOSE: [[f64; 3]; JointId::COUNT] = [
    [0.0, 0.0, 1.70],   // head
    [0.0, 0.0, 1.45],   // spine_shoulder
    [0.0, 0.0, 1.00],   // spine_base
    [0.0, 0.18, 1.42],  // l_shoulder
    [0.0, -0.18, 1.42], // r_shoulder
    [0.0, 0.45, 1.42],  // l_elbow
    [0.0, -0.45, 1.42], // r_elbow
    [0.0, 0.72, 1.42],  // l_hand
    [0.0, -0.72, 1.42], // r_hand
    [0.0, 0.10, 0.50],  // l_knee
    [0.0, -0.10, 0.50], // r_knee
    [0.0, 0.10, 0.05],  // l_foot
    [0.0, -0.10, 0.05], // r_foot
];

fn place(
    body: &[[f64; 3]; JointId::COUNT],
    t: f64,
    xy: [f64; 2],
    heading_deg: f64,
) -> SkeletonFrame {
    let (s, c) = heading_deg.to_radians().sin_cos();
    let joints =
        body.map(|[x, y, z]| Vector3::new(xy[0] + c * x - s * y, xy[1] + s * x + c * y, z));
    SkeletonFrame::new(t, joints)
}

/// A T-pose at `xy`, facing `heading_deg`.
pub fn tpose_frame(t: f64, xy: [f64; 2], heading_deg: f64) -> SkeletonFrame {
    place(&TPOSE, t, xy, heading_deg)
}

fn wave_body(t: f64, wave_hz: f64) -> [[f64; 3]; JointId::COUNT] {
    let mut body = TPOSE;
    let elbow = [0.0, -0.30, 1.65];
    let swing = 0.6 * (TAU * wave_hz * t).sin();
    body[JointId::RElbow.index()] = elbow;
    body[JointId::RHand.index()] = [
        0.0,
        elbow[1] - 0.28 * swing.sin(),
        elbow[2] + 0.28 * swing.cos(),
    ];
    body
}

/// Generates a deterministic clip sampled at `rate` Hz from t = 0 to
/// `duration` (inclusive when it falls on the grid).
pub fn synth_clip(
    kind: SynthKind,
    params: &SynthParams,
    duration: f64,
    rate: f64,
) -> Result<MotionClip, MocapError> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(MocapError::InvalidParameter {
            what: "duration",
            value: duration,
        });
    }
    if !(rate.is_finite() && rate > 0.0) {
        return Err(MocapError::InvalidParameter {
            what: "rate",
            value: rate,
        });
    }
    let n = ((duration * rate + 1e-9).floor() as usize).max(1);
    let [ox, oy] = params.origin;
    let frames = (0..=n)
        .map(|k| {
            let t = k as f64 / rate;
            match kind {
                SynthKind::StaticTpose => tpose_frame(t, params.origin, params.heading_deg),
                SynthKind::StraightWalk => {
                    let (s, c) = params.heading_deg.to_radians().sin_cos();
                    let d = params.speed_mps * t;
                    tpose_frame(t, [ox + c * d, oy + s * d], params.heading_deg)
                }
                SynthKind::CircleWalk => {
                    let angle = TAU * t / params.period_s;
                    let xy = [
                        ox + params.radius_m * angle.cos(),
                        oy + params.radius_m * angle.sin(),
                    ];
                    tpose_frame(t, xy, angle.to_degrees() + 90.0)
                }
                SynthKind::InPlaceWave => place(
                    &wave_body(t, params.wave_hz),
                    t,
                    params.origin,
                    params.heading_deg + params.turn_rate_deg_s * t,
                ),
            }
        })
        .collect();
    MotionClip::new(frames, rate)
}

/// Walks along `heading_deg` for the first half of `duration`, then waves
/// in place (turning at `turn_rate_deg_s`) where the walk ended.
pub fn mixed_clip(
    params: &SynthParams,
    duration: f64,
    rate: f64,
) -> Result<MotionClip, MocapError> {
    let walk_time = ((duration / 2.0 * rate).round() / rate).max(1.0 / rate);
    let wave_time = duration - walk_time - 1.0 / rate;
    if !(wave_time.is_finite() && wave_time > 0.0) {
        return Err(MocapError::InvalidParameter {
            what: "duration",
            value: duration,
        });
    }
    let walk = synth_clip(SynthKind::StraightWalk, params, walk_time, rate)?;
    let end = walk.frames().last().expect("clip has frames").centroid();
    let wave_params = SynthParams {
        origin: [end.x, end.y],
        ..params.clone()
    };
    walk.concat(&synth_clip(
        SynthKind::InPlaceWave,
        &wave_params,
        wave_time,
        rate,
    )?)
}
