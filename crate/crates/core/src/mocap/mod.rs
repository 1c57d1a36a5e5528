//! Motion-capture ingestion and the 13-joint skeleton.
//!
//! Everything downstream works on [`MotionClip`]s: ordered, timestamped
//! [`SkeletonFrame`]s in a z-up, meter-scaled world frame. Clips come from
//! BVH files ([`parse_bvh`] + [`to_clip`]), from the canonical JSONL format
//! ([`load_jsonl`]) or from the analytic generators in [`synth`].

mod bvh;
mod clip;
mod jsonl;
mod mapping;
mod skeleton;
pub mod synth;

pub use bvh::{parse_bvh, BvhDocument, BvhJoint, Channel};
pub use clip::{resample, MotionClip};
pub use jsonl::{load_jsonl, write_jsonl};
pub use mapping::{to_clip, AxisMap, JointMapping, CMU_SCALE};
pub use skeleton::{JointId, SkeletonFrame};
pub use synth::{mixed_clip, synth_clip, SynthKind, SynthParams};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MocapError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: expected {expected} channel values, found {found}")]
    ChannelCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("MOTION declares {declared} frames but contains {found}")]
    FrameCount { declared: usize, found: usize },
    #[error("line {line}: unsupported channel `{name}`")]
    UnsupportedChannel { line: usize, name: String },
    #[error("joint mapping has no entry for `{0}`")]
    UnmappedJoint(JointId),
    #[error("joint `{joint}` maps to `{source_name}`, which is not in the BVH hierarchy")]
    UnknownSourceJoint { joint: JointId, source_name: String },
    #[error("non-finite position for `{joint}` in frame {frame}")]
    NonFinite { frame: usize, joint: JointId },
    #[error("a motion clip needs at least 2 frames, got {0}")]
    TooFewFrames(usize),
    #[error("line {line}: missing joint `{joint}`")]
    MissingJoint { line: usize, joint: JointId },
    #[error("line {line}: unknown joint `{name}`")]
    UnknownJoint { line: usize, name: String },
    #[error("line {line}: non-increasing timestamp {t} after {prev}")]
    NonIncreasingTimestamp { line: usize, prev: f64, t: f64 },
    #[error("line {line}: malformed record: {msg}")]
    MalformedLine { line: usize, msg: String },
    #[error("frame {index}: timestamp {t} is not after {prev}")]
    UnorderedFrames { index: usize, prev: f64, t: f64 },
    #[error("time {t} s is outside the clip range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },
    #[error("invalid {what}: {value}")]
    InvalidParameter { what: &'static str, value: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
