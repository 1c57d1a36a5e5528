use std::collections::BTreeMap;

use nalgebra::Vector3;

use super::{BvhDocument, JointId, MocapError, MotionClip, SkeletonFrame};

/// Meters per unit of the CMU BVH conversions (1/0.45 inch).
pub const CMU_SCALE: f64 = 0.0254 / 0.45;

/// Source up-axis convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AxisMap {
    /// Source is y-up (BVH default): `(x, y, z)` becomes `(x, -z, y)`.
    #[default]
    YUp,
    /// Source is already z-up.
    ZUp,
}

impl AxisMap {
    pub fn apply(self, p: Vector3<f64>) -> Vector3<f64> {
        match self {
            AxisMap::YUp => Vector3::new(p.x, -p.z, p.y),
            AxisMap::ZUp => p,
        }
    }
}

impl std::str::FromStr for AxisMap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "y-up" | "yup" => Ok(AxisMap::YUp),
            "z-up" | "zup" => Ok(AxisMap::ZUp),
            _ => Err(format!(
                "unknown axis convention `{s}` (expected y-up or z-up)"
            )),
        }
    }
}

/// Which source joint supplies each of the 13 target joints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointMapping(pub BTreeMap<JointId, String>);

impl JointMapping {
    /// Mapping for the CMU BVH naming scheme.
    pub fn cmu() -> Self {
        let pairs = [
            (JointId::Head, "Head"),
            (JointId::SpineShoulder, "Neck"),
            (JointId::SpineBase, "Hips"),
            (JointId::LShoulder, "LeftArm"),
            (JointId::RShoulder, "RightArm"),
            (JointId::LElbow, "LeftForeArm"),
            (JointId::RElbow, "RightForeArm"),
            (JointId::LHand, "LeftHand"),
            (JointId::RHand, "RightHand"),
            (JointId::LKnee, "LeftLeg"),
            (JointId::RKnee, "RightLeg"),
            (JointId::LFoot, "LeftFoot"),
            (JointId::RFoot, "RightFoot"),
        ];
        JointMapping(pairs.into_iter().map(|(j, s)| (j, s.to_string())).collect())
    }

    /// Parses a JSON object of `{"<joint id>": "<source joint name>"}`.
    pub fn from_json(text: &str) -> Result<Self, MocapError> {
        let raw: BTreeMap<String, String> =
            serde_json::from_str(text).map_err(|e| MocapError::MalformedLine {
                line: e.line(),
                msg: e.to_string(),
            })?;
        let mut map = BTreeMap::new();
        for (k, v) in raw {
            let id = k.parse::<JointId>().map_err(|_| MocapError::UnknownJoint {
                line: 1,
                name: k.clone(),
            })?;
            map.insert(id, v);
        }
        Ok(JointMapping(map))
    }
}

/// Converts a BVH document into a 13-joint clip in world meters.
pub fn to_clip(
    doc: &BvhDocument,
    scale: f64,
    axis_map: AxisMap,
    mapping: &JointMapping,
) -> Result<MotionClip, MocapError> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(MocapError::InvalidParameter {
            what: "scale",
            value: scale,
        });
    }
    let mut sources = [0usize; JointId::COUNT];
    for id in JointId::ALL {
        let name = mapping.0.get(&id).ok_or(MocapError::UnmappedJoint(id))?;
        sources[id.index()] =
            doc.joint_index(name)
                .ok_or_else(|| MocapError::UnknownSourceJoint {
                    joint: id,
                    source_name: name.clone(),
                })?;
    }
    if doc.frames.len() < 2 {
        return Err(MocapError::TooFewFrames(doc.frames.len()));
    }
    let frames = (0..doc.frames.len())
        .map(|i| {
            let world = doc.world_positions(i);
            let mut joints = [Vector3::zeros(); JointId::COUNT];
            for id in JointId::ALL {
                let p = axis_map.apply(world[sources[id.index()]]) * scale;
                if !p.iter().all(|c| c.is_finite()) {
                    return Err(MocapError::NonFinite {
                        frame: i,
                        joint: id,
                    });
                }
                joints[id.index()] = p;
            }
            Ok(SkeletonFrame::new(i as f64 * doc.frame_time, joints))
        })
        .collect::<Result<Vec<_>, _>>()?;
    MotionClip::new(frames, 1.0 / doc.frame_time)
}
