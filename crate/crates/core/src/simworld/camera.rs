//! Pinhole camera, aiming and screen-space error.
//!
//! Yaw is measured counter-clockwise from +x, pitch upward from the
//! horizontal. Image `u` grows to the right and `v` downward, with the
//! principal point at the image center.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::mocap::SkeletonFrame;

/// Points closer than this along the optical axis count as behind the camera.
const NEAR_PLANE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub width_px: u32,
    pub height_px: u32,
    pub hfov_deg: f64,
}

impl Default for Intrinsics {
    fn default() -> Self {
        Self {
            width_px: 1280,
            height_px: 720,
            hfov_deg: 66.0,
        }
    }
}

impl Intrinsics {
    /// Focal length in pixels (square pixels).
    pub fn focal_px(&self) -> f64 {
        0.5 * self.width_px as f64 / (0.5 * self.hfov_deg.to_radians()).tan()
    }

    pub fn vfov_deg(&self) -> f64 {
        2.0 * (0.5 * self.height_px as f64 / self.focal_px())
            .atan()
            .to_degrees()
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * self.width_px as f64, 0.5 * self.height_px as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraPose {
    pub position: Vector3<f64>,
    pub yaw_deg: f64,
    pub pitch_deg: f64,
}

impl CameraPose {
    /// Forward, right and up unit vectors of the camera frame.
    pub fn basis(&self) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
        let (sy, cy) = self.yaw_deg.to_radians().sin_cos();
        let (sp, cp) = self.pitch_deg.to_radians().sin_cos();
        let forward = Vector3::new(cp * cy, cp * sy, sp);
        let right = Vector3::new(sy, -cy, 0.0);
        let up = right.cross(&forward);
        (forward, right, up)
    }
}

/// Yaw and pitch (degrees) that put `target` on the optical axis.
///
/// When the target is straight above or below, pitch is ±90 and
/// `current_yaw_deg` is kept.
pub fn aim_at(camera: Vector3<f64>, target: Vector3<f64>, current_yaw_deg: f64) -> (f64, f64) {
    let d = target - camera;
    let horizontal = d.xy().norm();
    if horizontal < 1e-12 {
        let pitch = if d.z >= 0.0 { 90.0 } else { -90.0 };
        return (current_yaw_deg, pitch);
    }
    (
        d.y.atan2(d.x).to_degrees(),
        d.z.atan2(horizontal).to_degrees(),
    )
}

/// Pinhole projection; `None` when the point is at or behind the camera plane.
pub fn project(
    point: Vector3<f64>,
    pose: &CameraPose,
    intrinsics: &Intrinsics,
) -> Option<(f64, f64)> {
    let (forward, right, up) = pose.basis();
    let d = point - pose.position;
    let depth = d.dot(&forward);
    if depth <= NEAR_PLANE {
        return None;
    }
    let f = intrinsics.focal_px();
    let (cx, cy) = intrinsics.center();
    Some((cx + f * d.dot(&right) / depth, cy - f * d.dot(&up) / depth))
}

/// Pixel offset of the projected joint centroid from the image center.
pub fn screen_error(
    frame: &SkeletonFrame,
    pose: &CameraPose,
    intrinsics: &Intrinsics,
) -> Option<(f64, f64)> {
    let (cx, cy) = intrinsics.center();
    project(frame.centroid(), pose, intrinsics).map(|(u, v)| (u - cx, v - cy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mocap::synth::tpose_frame;
    use proptest::prelude::*;

    fn pose_toward(camera: Vector3<f64>, target: Vector3<f64>) -> CameraPose {
        let (yaw_deg, pitch_deg) = aim_at(camera, target, 0.0);
        CameraPose {
            position: camera,
            yaw_deg,
            pitch_deg,
        }
    }

    #[test]
    fn aim_example() {
        let (yaw, pitch) = aim_at(
            Vector3::new(2.5, 0.0, 2.2),
            Vector3::new(0.0, 0.0, 1.0),
            0.0,
        );
        assert!((yaw - 180.0).abs() < 1e-12);
        assert!((pitch - -(1.2f64.atan2(2.5)).to_degrees()).abs() < 1e-12);
        assert!((pitch - -25.641005).abs() < 1e-5);
    }

    #[test]
    fn aim_vertical_keeps_yaw() {
        assert_eq!(
            aim_at(Vector3::zeros(), Vector3::new(0.0, 0.0, -3.0), 42.0),
            (42.0, -90.0)
        );
        assert_eq!(
            aim_at(Vector3::zeros(), Vector3::new(0.0, 0.0, 3.0), 42.0),
            (42.0, 90.0)
        );
    }

    #[test]
    fn on_axis_projects_to_center() {
        let intr = Intrinsics::default();
        let target = Vector3::new(0.3, -0.2, 1.0);
        let pose = pose_toward(Vector3::new(2.5, 1.0, 2.2), target);
        let (u, v) = project(target, &pose, &intr).unwrap();
        assert!((u - 640.0).abs() < 1e-9 && (v - 360.0).abs() < 1e-9);
    }

    #[test]
    fn half_fov_hits_right_edge() {
        let intr = Intrinsics::default();
        let pose = CameraPose {
            position: Vector3::zeros(),
            yaw_deg: 0.0,
            pitch_deg: 0.0,
        };
        // 33 degrees to the right of +x is clockwise, i.e. negative y
        let a = 33f64.to_radians();
        let (u, v) = project(Vector3::new(a.cos(), -a.sin(), 0.0), &pose, &intr).unwrap();
        assert!((u - 1280.0).abs() < 1e-9);
        assert!((v - 360.0).abs() < 1e-9);
    }

    #[test]
    fn behind_camera_flagged() {
        let intr = Intrinsics::default();
        let pose = CameraPose {
            position: Vector3::zeros(),
            yaw_deg: 0.0,
            pitch_deg: 0.0,
        };
        assert!(project(Vector3::new(-1.0, 0.0, 0.0), &pose, &intr).is_none());
        assert!(project(Vector3::new(0.0, 1.0, 0.0), &pose, &intr).is_none());
    }

    #[test]
    fn vertical_fov_from_aspect() {
        let intr = Intrinsics::default();
        let expect = 2.0
            * ((33f64.to_radians().tan()) * 720.0 / 1280.0)
                .atan()
                .to_degrees();
        assert!((intr.vfov_deg() - expect).abs() < 1e-12);
    }

    #[test]
    fn screen_error_for_yaw_offsets() {
        // closed form: a target 5 degrees off-axis lands f * tan(5 deg) px
        // from the center, f = 640 / tan(33 deg)
        let intr = Intrinsics {
            width_px: 1280,
            height_px: 720,
            hfov_deg: 60.0,
        };
        let frame = tpose_frame(0.0, [0.0, 0.0], 0.0);
        let cam = Vector3::new(2.5, 0.0, frame.centroid().z);
        let aimed = pose_toward(cam, frame.centroid());
        let (ex, ey) = screen_error(&frame, &aimed, &intr).unwrap();
        assert!(ex.abs() < 1e-9 && ey.abs() < 1e-9);

        let expected = 640.0 / 30f64.to_radians().tan() * 5f64.to_radians().tan();
        assert!((expected - 96.98).abs() < 0.01);
        // camera turned 5 degrees clockwise: subject sits left of center
        let right = CameraPose {
            yaw_deg: aimed.yaw_deg - 5.0,
            ..aimed
        };
        let (ex, ey) = screen_error(&frame, &right, &intr).unwrap();
        assert!((ex + expected).abs() < 1e-9, "{ex}");
        assert!(ey.abs() < 1e-9);
        let left = CameraPose {
            yaw_deg: aimed.yaw_deg + 5.0,
            ..aimed
        };
        assert!((screen_error(&frame, &left, &intr).unwrap().0 - expected).abs() < 1e-9);
    }

    #[test]
    fn translation_along_axis_keeps_subject_centered() {
        let intr = Intrinsics::default();
        let frame = tpose_frame(0.0, [0.0, 0.0], 0.0);
        let cam = Vector3::new(2.5, 1.0, 2.2);
        let pose = pose_toward(cam, frame.centroid());
        let (forward, _, _) = pose.basis();
        for s in [0.5, 1.0, 3.0] {
            let moved = frame.translated(forward * s);
            let (ex, ey) = screen_error(&moved, &pose, &intr).unwrap();
            assert!(ex.abs() < 1e-9 && ey.abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn joint_rotation_shifts_yaw(cx in -5.0f64..5.0, cy in -5.0f64..5.0, cz in 0.5f64..4.0,
                                     tx in -5.0f64..5.0, ty in -5.0f64..5.0, tz in 0.0f64..2.0, phi in -180.0f64..180.0) {
            let cam = Vector3::new(cx, cy, cz);
            let tgt = Vector3::new(tx, ty, tz);
            prop_assume!((cam - tgt).xy().norm() > 1e-3);
            let (yaw, pitch) = aim_at(cam, tgt, 0.0);
            let (s, c) = phi.to_radians().sin_cos();
            let rot = |p: Vector3<f64>| Vector3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z);
            let (yaw2, pitch2) = aim_at(rot(cam), rot(tgt), 0.0);
            prop_assert!(crate::angle::wrap_180(yaw2 - yaw - phi).abs() < 1e-9);
            prop_assert!((pitch2 - pitch).abs() < 1e-9);
            let pose = CameraPose { position: cam, yaw_deg: yaw, pitch_deg: pitch };
            let (u, v) = project(tgt, &pose, &Intrinsics::default()).unwrap();
            prop_assert!((u - 640.0).abs() < 1e-6 && (v - 360.0).abs() < 1e-6);
        }
    }
}
