//! Viewpoint quality over the subject-centered azimuth circle.
//!
//! The camera sits on a horizontal circle around the subject's centroid;
//! azimuth 0 is the +x side of the subject and angles grow counter-clockwise.
//! Two descriptors score each azimuth:
//!
//! - velocity-perpendicular: a triangular bimodal curve peaking where the
//!   line of sight is perpendicular to the horizontal motion;
//! - projection-area: the scatter (population variance) of the joints
//!   orthographically projected onto the vertical view plane.
//!
//! A speed threshold picks one descriptor per frame; the chosen curve is
//! min-max normalized into a [`QualityMap`].

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::{circular_distance, normalize_deg, wrap_90};
use crate::mocap::{JointId, MocapError, MotionClip, SkeletonFrame};

/// Fixed orbit radius, m.
pub const ORBIT_RADIUS: f64 = 2.5;
/// Fixed camera height above the ground plane, m.
pub const ORBIT_HEIGHT: f64 = 2.2;
/// Default azimuth resolution of a quality map.
pub const DEFAULT_SAMPLES: usize = 360;
/// Values within this distance of the map maximum count as maximizers.
pub const MAX_TIE_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ViewpointError {
    #[error("velocity-perpendicular quality is undefined for zero velocity")]
    ZeroVelocity,
    #[error("quality map needs at least 4 samples, got {0}")]
    TooFewSamples(usize),
    #[error("window must be positive, got {0}")]
    BadWindow(f64),
    #[error(transparent)]
    Clip(#[from] MocapError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Descriptor {
    VelocityPerp,
    ProjectionArea,
}

impl Descriptor {
    pub fn name(self) -> &'static str {
        match self {
            Descriptor::VelocityPerp => "velocity_perp",
            Descriptor::ProjectionArea => "projection_area",
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Descriptor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "velocity_perp" => Ok(Descriptor::VelocityPerp),
            "projection_area" => Ok(Descriptor::ProjectionArea),
            _ => Err(format!("unknown descriptor `{s}`")),
        }
    }
}

/// Horizontal motion of the subject's centroid over a trailing window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubjectState {
    pub centroid_xy: Vector2<f64>,
    pub centroid_z: f64,
    pub velocity_xy: Vector2<f64>,
    pub window: f64,
}

impl SubjectState {
    pub fn speed(&self) -> f64 {
        self.velocity_xy.norm()
    }
}

/// Subject state at `t` from the centroid displacement over `[t - window, t]`.
pub fn subject_state(
    clip: &MotionClip,
    t: f64,
    window: f64,
) -> Result<SubjectState, ViewpointError> {
    if !(window.is_finite() && window > 0.0) {
        return Err(ViewpointError::BadWindow(window));
    }
    let now = clip.sample(t)?.centroid();
    let before = clip.sample(t - window)?.centroid();
    Ok(SubjectState {
        centroid_xy: now.xy(),
        centroid_z: now.z,
        velocity_xy: (now.xy() - before.xy()) / window,
        window,
    })
}

/// Like [`subject_state`], but shortens the window near the clip start so
/// every time in the clip has a state. At the very first instant the window
/// looks forward instead.
pub fn subject_state_clamped(
    clip: &MotionClip,
    t: f64,
    window: f64,
) -> Result<SubjectState, ViewpointError> {
    if !(window.is_finite() && window > 0.0) {
        return Err(ViewpointError::BadWindow(window));
    }
    let available = t - clip.start();
    if available >= window {
        return subject_state(clip, t, window);
    }
    let now = clip.sample(t)?.centroid();
    let (a, b, w) = if available > 1e-9 {
        (clip.sample(t - available)?.centroid(), now, available)
    } else {
        let w = window.min(clip.duration());
        (now, clip.sample(t + w)?.centroid(), w)
    };
    Ok(SubjectState {
        centroid_xy: now.xy(),
        centroid_z: now.z,
        velocity_xy: (b.xy() - a.xy()) / w,
        window: w,
    })
}

/// Velocity-perpendicular quality in `[0, 1]`: 1 when the azimuth is
/// perpendicular to the motion, 0 when parallel, linear in between.
pub fn q_velocity_perp(azimuth_deg: f64, velocity_xy: Vector2<f64>) -> Result<f64, ViewpointError> {
    if velocity_xy.norm_squared() == 0.0 || !velocity_xy.iter().all(|c| c.is_finite()) {
        return Err(ViewpointError::ZeroVelocity);
    }
    let heading = velocity_xy.y.atan2(velocity_xy.x).to_degrees();
    Ok(1.0 - wrap_90(azimuth_deg - (heading + 90.0)).abs() / 90.0)
}

/// Projection-area descriptor (m²): `var(u) + var(v)` of the joints projected
/// onto the vertical plane facing the given azimuth, `u` horizontal and `v`
/// vertical. Viewing from opposite sides gives the same value.
pub fn q_projection_area(azimuth_deg: f64, frame: &SkeletonFrame) -> f64 {
    // opposite view directions only flip the sign of u
    let (s, c) = azimuth_deg.rem_euclid(180.0).to_radians().sin_cos();
    let n = JointId::COUNT as f64;
    // relative to the first joint, so translation drops out before rounding
    let base = frame.joints[0];
    let mut u = [0.0; JointId::COUNT];
    let mut v = [0.0; JointId::COUNT];
    for (i, p) in frame.joints.iter().enumerate() {
        let d = p - base;
        u[i] = -s * d.x + c * d.y;
        v[i] = d.z;
    }
    let variance = |xs: &[f64; JointId::COUNT]| {
        let mean = xs.iter().sum::<f64>() / n;
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
    };
    variance(&u) + variance(&v)
}

/// Normalized quality sampled at azimuths `k * 360 / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityMap {
    values: Vec<f64>,
    descriptor: Descriptor,
}

impl QualityMap {
    /// Builds a map from raw descriptor values, min-max normalizing them.
    /// A flat input becomes a uniform map of 1.0.
    pub fn from_raw(raw: Vec<f64>, descriptor: Descriptor) -> Result<Self, ViewpointError> {
        if raw.len() < 4 {
            return Err(ViewpointError::TooFewSamples(raw.len()));
        }
        let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        let values = if span > 0.0 && span.is_finite() {
            raw.iter()
                .map(|v| ((v - lo) / span).clamp(0.0, 1.0))
                .collect()
        } else {
            vec![1.0; raw.len()]
        };
        Ok(Self { values, descriptor })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn descriptor(&self) -> Descriptor {
        self.descriptor
    }

    pub fn n_samples(&self) -> usize {
        self.values.len()
    }

    /// Angular spacing between samples, degrees.
    pub fn bin_deg(&self) -> f64 {
        360.0 / self.values.len() as f64
    }

    pub fn azimuth(&self, index: usize) -> f64 {
        index as f64 * self.bin_deg()
    }

    pub fn nearest_index(&self, azimuth_deg: f64) -> usize {
        let n = self.values.len();
        ((normalize_deg(azimuth_deg) / self.bin_deg()).round() as usize) % n
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices whose value is within [`MAX_TIE_EPS`] of the maximum.
    pub fn maximizers(&self) -> Vec<usize> {
        let max = self.max_value();
        (0..self.values.len())
            .filter(|&i| self.values[i] >= max - MAX_TIE_EPS)
            .collect()
    }
}

fn sample_azimuths(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| k as f64 * 360.0 / n as f64)
}

/// Quality map for a frame using an explicitly chosen descriptor.
pub fn quality_map_with(
    frame: &SkeletonFrame,
    state: &SubjectState,
    descriptor: Descriptor,
    n_samples: usize,
) -> Result<QualityMap, ViewpointError> {
    if n_samples < 4 {
        return Err(ViewpointError::TooFewSamples(n_samples));
    }
    let raw = match descriptor {
        Descriptor::VelocityPerp => sample_azimuths(n_samples)
            .map(|a| q_velocity_perp(a, state.velocity_xy))
            .collect::<Result<Vec<_>, _>>()?,
        Descriptor::ProjectionArea => sample_azimuths(n_samples)
            .map(|a| q_projection_area(a, frame))
            .collect(),
    };
    QualityMap::from_raw(raw, descriptor)
}

/// Quality map with the speed-threshold rule: projection area below
/// `threshold_mps`, velocity-perpendicular at or above it.
pub fn quality_map(
    frame: &SkeletonFrame,
    state: &SubjectState,
    threshold_mps: f64,
    n_samples: usize,
) -> Result<QualityMap, ViewpointError> {
    let descriptor = if state.speed() < threshold_mps {
        Descriptor::ProjectionArea
    } else {
        Descriptor::VelocityPerp
    };
    quality_map_with(frame, state, descriptor, n_samples)
}

/// Descriptor choice with an optional hysteresis band around the threshold.
///
/// With `hysteresis = h > 0` the selector only switches to velocity-perp
/// above `threshold * (1 + h)` and back to projection-area below
/// `threshold * (1 - h)`. With `h = 0` it is the plain threshold rule.
#[derive(Debug, Clone)]
pub struct DescriptorSelector {
    threshold: f64,
    hysteresis: f64,
    last: Option<Descriptor>,
}

impl DescriptorSelector {
    pub fn new(threshold: f64, hysteresis: f64) -> Self {
        Self {
            threshold,
            hysteresis: hysteresis.max(0.0),
            last: None,
        }
    }

    pub fn select(&mut self, speed: f64) -> Descriptor {
        let plain = if speed < self.threshold {
            Descriptor::ProjectionArea
        } else {
            Descriptor::VelocityPerp
        };
        let chosen = match self.last {
            Some(Descriptor::ProjectionArea) if self.hysteresis > 0.0 => {
                if speed >= self.threshold * (1.0 + self.hysteresis) {
                    Descriptor::VelocityPerp
                } else {
                    Descriptor::ProjectionArea
                }
            }
            Some(Descriptor::VelocityPerp) if self.hysteresis > 0.0 => {
                if speed < self.threshold * (1.0 - self.hysteresis) {
                    Descriptor::ProjectionArea
                } else {
                    Descriptor::VelocityPerp
                }
            }
            _ => plain,
        };
        self.last = Some(chosen);
        chosen
    }
}

/// Sampled azimuth of maximal quality. Ties go to the sample nearest
/// `current_azimuth_deg`, then to the smaller azimuth.
pub fn global_optimum(map: &QualityMap, current_azimuth_deg: f64) -> f64 {
    let best = map
        .maximizers()
        .into_iter()
        .min_by(|&a, &b| {
            let da = circular_distance(map.azimuth(a), current_azimuth_deg);
            let db = circular_distance(map.azimuth(b), current_azimuth_deg);
            da.total_cmp(&db).then(a.cmp(&b))
        })
        .expect("map has samples");
    map.azimuth(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mocap::synth::tpose_frame;
    use crate::mocap::{synth_clip, SynthKind, SynthParams};
    use nalgebra::Vector3;
    use proptest::prelude::*;

    fn still(frame: &SkeletonFrame) -> SubjectState {
        let c = frame.centroid();
        SubjectState {
            centroid_xy: c.xy(),
            centroid_z: c.z,
            velocity_xy: Vector2::zeros(),
            window: 0.2,
        }
    }

    fn moving(vx: f64, vy: f64) -> SubjectState {
        SubjectState {
            centroid_xy: Vector2::zeros(),
            centroid_z: 1.0,
            velocity_xy: Vector2::new(vx, vy),
            window: 0.2,
        }
    }

    /// Brute-force orthographic projection: explicit view basis, explicit
    /// two-pass population variance.
    fn projection_oracle(az: f64, frame: &SkeletonFrame) -> f64 {
        let view = Vector3::new(-az.to_radians().cos(), -az.to_radians().sin(), 0.0);
        let up = Vector3::z();
        let right = view.cross(&up);
        let us: Vec<f64> = frame.joints.iter().map(|p| p.dot(&right)).collect();
        let vs: Vec<f64> = frame.joints.iter().map(|p| p.dot(&up)).collect();
        let var = |xs: &[f64]| {
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64
        };
        var(&us) + var(&vs)
    }

    #[test]
    fn velocity_perp_examples() {
        let v = Vector2::new(1.0, 0.0);
        assert_eq!(q_velocity_perp(90.0, v).unwrap(), 1.0);
        assert_eq!(q_velocity_perp(270.0, v).unwrap(), 1.0);
        assert_eq!(q_velocity_perp(0.0, v).unwrap(), 0.0);
        assert_eq!(q_velocity_perp(180.0, v).unwrap(), 0.0);
        assert_eq!(q_velocity_perp(45.0, v).unwrap(), 0.5);
        assert!(matches!(
            q_velocity_perp(10.0, Vector2::zeros()),
            Err(ViewpointError::ZeroVelocity)
        ));
    }

    #[test]
    fn tpose_with_arms_along_x_prefers_side_view() {
        // facing +y: arms span the x axis
        let frame = tpose_frame(0.0, [0.0, 0.0], 90.0);
        let at90 = q_projection_area(90.0, &frame);
        let at0 = q_projection_area(0.0, &frame);
        assert!(at90 > at0);
        assert!((at90 - projection_oracle(90.0, &frame)).abs() < 1e-12);
        assert!((at0 - projection_oracle(0.0, &frame)).abs() < 1e-12);
    }

    #[test]
    fn coincident_joints_have_zero_scatter() {
        let frame = SkeletonFrame::new(0.0, [Vector3::new(1.0, 2.0, 3.0); 13]);
        assert_eq!(q_projection_area(37.0, &frame), 0.0);
        let map = quality_map(&frame, &still(&frame), 0.2, 360).unwrap();
        assert!(map.values().iter().all(|&v| v == 1.0));
        assert_eq!(map.descriptor(), Descriptor::ProjectionArea);
    }

    #[test]
    fn descriptor_selection() {
        let frame = tpose_frame(0.0, [0.0, 0.0], 0.0);
        let map = quality_map(&frame, &still(&frame), 0.2, 360).unwrap();
        assert_eq!(map.descriptor(), Descriptor::ProjectionArea);
        let map = quality_map(&frame, &moving(1.0, 0.0), 0.2, 360).unwrap();
        assert_eq!(map.descriptor(), Descriptor::VelocityPerp);
        assert_eq!(map.maximizers(), vec![90, 270]);
        assert!(matches!(
            quality_map(&frame, &moving(1.0, 0.0), 0.2, 3),
            Err(ViewpointError::TooFewSamples(3))
        ));
    }

    #[test]
    fn hysteresis_band() {
        let mut sel = DescriptorSelector::new(0.2, 0.1);
        assert_eq!(sel.select(0.1), Descriptor::ProjectionArea);
        assert_eq!(sel.select(0.21), Descriptor::ProjectionArea);
        assert_eq!(sel.select(0.23), Descriptor::VelocityPerp);
        assert_eq!(sel.select(0.19), Descriptor::VelocityPerp);
        assert_eq!(sel.select(0.17), Descriptor::ProjectionArea);
        let mut plain = DescriptorSelector::new(0.2, 0.0);
        assert_eq!(plain.select(0.2), Descriptor::VelocityPerp);
        assert_eq!(plain.select(0.19), Descriptor::ProjectionArea);
    }

    #[test]
    fn global_optimum_tie_breaks() {
        let frame = tpose_frame(0.0, [0.0, 0.0], 0.0);
        let map = quality_map(&frame, &moving(1.0, 0.0), 0.2, 360).unwrap();
        assert_eq!(global_optimum(&map, 80.0), 90.0);
        assert_eq!(global_optimum(&map, 300.0), 270.0);
        assert_eq!(global_optimum(&map, 180.0), 90.0);
        let flat = QualityMap::from_raw(vec![0.3; 360], Descriptor::ProjectionArea).unwrap();
        assert_eq!(global_optimum(&flat, 123.0), 123.0);
        assert_eq!(global_optimum(&flat, 359.7), 0.0);
    }

    #[test]
    fn subject_state_examples() {
        let p = SynthParams::default();
        let clip = synth_clip(SynthKind::StaticTpose, &p, 2.0, 30.0).unwrap();
        let s = subject_state(&clip, 1.0, 0.2).unwrap();
        assert_eq!(s.velocity_xy, Vector2::zeros());

        let clip = synth_clip(SynthKind::StraightWalk, &p, 2.0, 30.0).unwrap();
        let s = subject_state(&clip, 1.5, 0.2).unwrap();
        assert!((s.velocity_xy - Vector2::new(1.0, 0.0)).norm() < 1e-6);
        assert!(subject_state(&clip, 0.1, 0.2).is_err());
        assert!(subject_state(&clip, 2.5, 0.2).is_err());

        let s = subject_state_clamped(&clip, 0.0, 0.2).unwrap();
        assert!((s.velocity_xy.x - 1.0).abs() < 1e-6);
        let s = subject_state_clamped(&clip, 0.1, 0.2).unwrap();
        assert!((s.velocity_xy.x - 1.0).abs() < 1e-6);
    }

    #[test]
    fn circle_walk_speed_within_chord_bound() {
        // chord / arc = sin(x) / x with x = pi * window / period; for
        // window = period / 20 that is 0.99589, i.e. 0.41% below the arc speed
        let p = SynthParams::default();
        let clip = synth_clip(SynthKind::CircleWalk, &p, 8.0, 120.0).unwrap();
        let arc_speed = std::f64::consts::TAU * 2.0 / 8.0;
        for window in [0.1, 0.2, 0.4] {
            for t in [1.0, 3.3, 7.9] {
                let s = subject_state(&clip, t, window).unwrap();
                let rel = (s.speed() - arc_speed).abs() / arc_speed;
                assert!(rel < 0.02, "window {window} t {t} rel {rel}");
            }
        }
    }

    fn arb_frame() -> impl Strategy<Value = SkeletonFrame> {
        prop::array::uniform13(prop::array::uniform3(-2.0f64..2.0))
            .prop_map(|js| SkeletonFrame::new(0.0, js.map(|[x, y, z]| Vector3::new(x, y, z.abs()))))
    }

    proptest! {
        #[test]
        fn projection_matches_oracle(frame in arb_frame(), az in 0.0f64..360.0) {
            prop_assert!((q_projection_area(az, &frame) - projection_oracle(az, &frame)).abs() < 1e-9);
        }

        #[test]
        fn both_descriptors_half_turn_symmetric(frame in arb_frame(), vx in -3.0f64..3.0, vy in -3.0f64..3.0, k in 0usize..180) {
            let a = k as f64;
            prop_assert!((q_projection_area(a, &frame) - q_projection_area(a + 180.0, &frame)).abs() < 1e-9);
            prop_assume!(vx.abs() + vy.abs() > 1e-6);
            let v = Vector2::new(vx, vy);
            prop_assert!((q_velocity_perp(a, v).unwrap() - q_velocity_perp(a + 180.0, v).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn projection_translation_invariant(frame in arb_frame(), dx in -50.0f64..50.0, dy in -50.0f64..50.0, az in 0.0f64..360.0) {
            let moved = frame.translated(Vector3::new(dx, dy, 0.0));
            prop_assert!((q_projection_area(az, &frame) - q_projection_area(az, &moved)).abs() < 1e-9);
        }

        #[test]
        fn velocity_perp_speed_scale_invariant(vx in -3.0f64..3.0, vy in -3.0f64..3.0, c in 0.01f64..100.0, az in 0.0f64..360.0) {
            prop_assume!(vx.abs() + vy.abs() > 1e-6);
            let v = Vector2::new(vx, vy);
            let a = q_velocity_perp(az, v).unwrap();
            let b = q_velocity_perp(az, v * c).unwrap();
            // atan2 is scale invariant up to one ulp of the heading
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn rotation_shifts_maps(frame in arb_frame(), vx in 0.5f64..3.0, vy in -3.0f64..3.0, shift in 0usize..360) {
            let phi = shift as f64;
            let c = frame.centroid();
            let rotated = frame.rotated_about_z([c.x, c.y], phi);
            let v = Vector2::new(vx, vy);
            let (s, co) = phi.to_radians().sin_cos();
            let rv = Vector2::new(co * v.x - s * v.y, s * v.x + co * v.y);
            let st = moving(vx, vy);
            let rst = SubjectState { velocity_xy: rv, ..st };
            for d in [Descriptor::ProjectionArea, Descriptor::VelocityPerp] {
                let m = quality_map_with(&frame, &st, d, 360).unwrap();
                let r = quality_map_with(&rotated, &rst, d, 360).unwrap();
                for k in 0..360 {
                    prop_assert!((m.values()[k] - r.values()[(k + shift) % 360]).abs() < 1e-6);
                }
            }
        }

        #[test]
        fn map_values_normalized(frame in arb_frame(), vx in -3.0f64..3.0, vy in -3.0f64..3.0) {
            let st = moving(vx, vy);
            let map = quality_map(&frame, &st, 0.2, 360).unwrap();
            prop_assert!(map.values().iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert_eq!(map.max_value(), 1.0);
        }
    }
}
