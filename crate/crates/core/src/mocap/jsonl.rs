//! Canonical skeleton JSONL: one object per line,
//! `{"t": <seconds>, "joints": {"head": [x, y, z], ...}}` with all 13 joints,
//! meters, z up.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use nalgebra::Vector3;
use serde::Deserialize;

use super::{JointId, MocapError, MotionClip, SkeletonFrame};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    t: f64,
    joints: BTreeMap<String, [f64; 3]>,
}

/// Reads a clip from canonical JSONL. Blank lines are skipped; line numbers
/// in errors are 1-based.
pub fn load_jsonl<R: BufRead>(reader: R) -> Result<MotionClip, MocapError> {
    let mut frames: Vec<SkeletonFrame> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line).map_err(|e| MocapError::MalformedLine {
            line: line_no,
            msg: e.to_string(),
        })?;
        if let Some(name) = rec.joints.keys().find(|k| k.parse::<JointId>().is_err()) {
            return Err(MocapError::UnknownJoint {
                line: line_no,
                name: name.clone(),
            });
        }
        let mut joints = [Vector3::zeros(); JointId::COUNT];
        for id in JointId::ALL {
            let p = rec.joints.get(id.name()).ok_or(MocapError::MissingJoint {
                line: line_no,
                joint: id,
            })?;
            joints[id.index()] = Vector3::new(p[0], p[1], p[2]);
        }
        if !rec.t.is_finite() || rec.t < 0.0 {
            return Err(MocapError::MalformedLine {
                line: line_no,
                msg: format!("timestamp must be finite and non-negative, got {}", rec.t),
            });
        }
        if let Some(prev) = frames.last() {
            if rec.t.partial_cmp(&prev.t) != Some(std::cmp::Ordering::Greater) {
                return Err(MocapError::NonIncreasingTimestamp {
                    line: line_no,
                    prev: prev.t,
                    t: rec.t,
                });
            }
        }
        frames.push(SkeletonFrame::new(rec.t, joints));
    }
    if frames.len() < 2 {
        return Err(MocapError::TooFewFrames(frames.len()));
    }
    let rate = 1.0 / median_spacing(&frames);
    MotionClip::new(frames, rate)
}

fn median_spacing(frames: &[SkeletonFrame]) -> f64 {
    let mut dts: Vec<f64> = frames.windows(2).map(|w| w[1].t - w[0].t).collect();
    dts.sort_by(f64::total_cmp);
    let n = dts.len();
    if n % 2 == 1 {
        dts[n / 2]
    } else {
        0.5 * (dts[n / 2 - 1] + dts[n / 2])
    }
}

fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

/// Writes a clip as canonical JSONL with joints in [`JointId::ALL`] order.
pub fn write_jsonl<W: Write>(clip: &MotionClip, mut out: W) -> std::io::Result<()> {
    for f in clip.frames() {
        write!(out, "{{\"t\":{},\"joints\":{{", num(f.t))?;
        for (i, id) in JointId::ALL.iter().enumerate() {
            let p = f.joint(*id);
            if i > 0 {
                out.write_all(b",")?;
            }
            write!(
                out,
                "\"{}\":[{},{},{}]",
                id.name(),
                num(p.x),
                num(p.y),
                num(p.z)
            )?;
        }
        out.write_all(b"}}\n")?;
    }
    Ok(())
}
