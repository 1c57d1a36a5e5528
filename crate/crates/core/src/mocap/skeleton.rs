use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;

/// One of the 13 joints kept from the source skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JointId {
    Head,
    SpineShoulder,
    SpineBase,
    LShoulder,
    RShoulder,
    LElbow,
    RElbow,
    LHand,
    RHand,
    LKnee,
    RKnee,
    LFoot,
    RFoot,
}

impl JointId {
    pub const COUNT: usize = 13;

    pub const ALL: [JointId; 13] = [
        JointId::Head,
        JointId::SpineShoulder,
        JointId::SpineBase,
        JointId::LShoulder,
        JointId::RShoulder,
        JointId::LElbow,
        JointId::RElbow,
        JointId::LHand,
        JointId::RHand,
        JointId::LKnee,
        JointId::RKnee,
        JointId::LFoot,
        JointId::RFoot,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Canonical snake_case name, as used in JSONL and mapping files.
    pub fn name(self) -> &'static str {
        match self {
            JointId::Head => "head",
            JointId::SpineShoulder => "spine_shoulder",
            JointId::SpineBase => "spine_base",
            JointId::LShoulder => "l_shoulder",
            JointId::RShoulder => "r_shoulder",
            JointId::LElbow => "l_elbow",
            JointId::RElbow => "r_elbow",
            JointId::LHand => "l_hand",
            JointId::RHand => "r_hand",
            JointId::LKnee => "l_knee",
            JointId::RKnee => "r_knee",
            JointId::LFoot => "l_foot",
            JointId::RFoot => "r_foot",
        }
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for JointId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        JointId::ALL
            .iter()
            .copied()
            .find(|j| j.name() == s)
            .ok_or_else(|| format!("unknown joint `{s}`"))
    }
}

/// A single timestamped pose. Positions are in meters, z up.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonFrame {
    pub t: f64,
    pub joints: [Vector3<f64>; JointId::COUNT],
}

impl SkeletonFrame {
    pub fn new(t: f64, joints: [Vector3<f64>; JointId::COUNT]) -> Self {
        Self { t, joints }
    }

    pub fn joint(&self, id: JointId) -> Vector3<f64> {
        self.joints[id.index()]
    }

    /// Unweighted mean of the 13 joint positions.
    pub fn centroid(&self) -> Vector3<f64> {
        let sum: Vector3<f64> = self.joints.iter().sum();
        sum / JointId::COUNT as f64
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.joints.iter().all(|p| p.iter().all(|c| c.is_finite()))
    }

    /// Linear blend between two poses, `w = 0` giving `self`.
    pub fn lerp(&self, other: &SkeletonFrame, t: f64, w: f64) -> SkeletonFrame {
        let mut joints = self.joints;
        for (j, o) in joints.iter_mut().zip(other.joints.iter()) {
            *j += (o - *j) * w;
        }
        SkeletonFrame { t, joints }
    }

    /// Rigidly rotates the pose about the vertical axis through `pivot_xy`.
    pub fn rotated_about_z(&self, pivot_xy: [f64; 2], angle_deg: f64) -> SkeletonFrame {
        let (s, c) = angle_deg.to_radians().sin_cos();
        let mut joints = self.joints;
        for p in joints.iter_mut() {
            let dx = p.x - pivot_xy[0];
            let dy = p.y - pivot_xy[1];
            p.x = pivot_xy[0] + c * dx - s * dy;
            p.y = pivot_xy[1] + s * dx + c * dy;
        }
        SkeletonFrame { t: self.t, joints }
    }

    pub fn translated(&self, offset: Vector3<f64>) -> SkeletonFrame {
        let mut joints = self.joints;
        for p in joints.iter_mut() {
            *p += offset;
        }
        SkeletonFrame { t: self.t, joints }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip_and_are_distinct() {
        let mut names: Vec<_> = JointId::ALL.iter().map(|j| j.name()).collect();
        for j in JointId::ALL {
            assert_eq!(j.name().parse::<JointId>().unwrap(), j);
            assert_eq!(JointId::ALL[j.index()], j);
        }
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 13);
        assert!("pelvis".parse::<JointId>().is_err());
    }

    #[test]
    fn centroid_is_mean() {
        let mut joints = [Vector3::zeros(); 13];
        joints[0] = Vector3::new(13.0, 0.0, 26.0);
        let f = SkeletonFrame::new(0.0, joints);
        assert_eq!(f.centroid(), Vector3::new(1.0, 0.0, 2.0));
    }
}
