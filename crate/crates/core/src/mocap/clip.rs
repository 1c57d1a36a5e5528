use super::{MocapError, SkeletonFrame};

/// Slack allowed when a query time sits on a clip boundary.
const TIME_EPS: f64 = 1e-9;

/// An ordered sequence of poses sampled at `rate_hz`.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionClip {
    frames: Vec<SkeletonFrame>,
    rate_hz: f64,
}

impl MotionClip {
    /// Builds a clip, checking the frame count, ordering and finiteness.
    pub fn new(frames: Vec<SkeletonFrame>, rate_hz: f64) -> Result<Self, MocapError> {
        if frames.len() < 2 {
            return Err(MocapError::TooFewFrames(frames.len()));
        }
        if !(rate_hz.is_finite() && rate_hz > 0.0) {
            return Err(MocapError::InvalidParameter {
                what: "rate_hz",
                value: rate_hz,
            });
        }
        for (i, pair) in frames.windows(2).enumerate() {
            if pair[1].t.partial_cmp(&pair[0].t) != Some(std::cmp::Ordering::Greater) {
                return Err(MocapError::UnorderedFrames {
                    index: i + 1,
                    prev: pair[0].t,
                    t: pair[1].t,
                });
            }
        }
        for (i, f) in frames.iter().enumerate() {
            if !f.is_finite() {
                let joint = super::JointId::ALL
                    .into_iter()
                    .find(|j| !f.joint(*j).iter().all(|c| c.is_finite()))
                    .unwrap_or(super::JointId::Head);
                return Err(MocapError::NonFinite { frame: i, joint });
            }
        }
        Ok(Self { frames, rate_hz })
    }

    pub fn frames(&self) -> &[SkeletonFrame] {
        &self.frames
    }

    pub fn rate_hz(&self) -> f64 {
        self.rate_hz
    }

    pub fn start(&self) -> f64 {
        self.frames[0].t
    }

    pub fn end(&self) -> f64 {
        self.frames[self.frames.len() - 1].t
    }

    pub fn duration(&self) -> f64 {
        self.end() - self.start()
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start() - TIME_EPS && t <= self.end() + TIME_EPS
    }

    /// Pose at time `t`, linearly interpolated between bracketing frames.
    pub fn sample(&self, t: f64) -> Result<SkeletonFrame, MocapError> {
        if !self.contains(t) {
            return Err(MocapError::OutOfRange {
                t,
                start: self.start(),
                end: self.end(),
            });
        }
        let t = t.clamp(self.start(), self.end());
        // first frame strictly after t
        let hi = self.frames.partition_point(|f| f.t <= t);
        if hi == 0 {
            return Ok(self.frames[0].clone());
        }
        if hi == self.frames.len() {
            let mut last = self.frames[hi - 1].clone();
            last.t = t;
            return Ok(last);
        }
        let a = &self.frames[hi - 1];
        let b = &self.frames[hi];
        let w = (t - a.t) / (b.t - a.t);
        Ok(a.lerp(b, t, w))
    }

    /// Appends `other` after this clip, shifting its timestamps so that it
    /// starts one frame period after this clip ends. Both clips must share
    /// the same rate.
    pub fn concat(&self, other: &MotionClip) -> Result<MotionClip, MocapError> {
        if (self.rate_hz - other.rate_hz).abs() > 1e-9 * self.rate_hz {
            return Err(MocapError::InvalidParameter {
                what: "rate_hz of appended clip",
                value: other.rate_hz,
            });
        }
        let shift = self.end() + 1.0 / self.rate_hz - other.start();
        let mut frames = self.frames.clone();
        frames.extend(other.frames.iter().map(|f| SkeletonFrame {
            t: f.t + shift,
            joints: f.joints,
        }));
        MotionClip::new(frames, self.rate_hz)
    }
}

/// Resamples a clip onto a uniform grid close to `target_hz`.
///
/// The first and last timestamps are kept, so the grid spacing is the clip
/// duration divided by `round(duration * target_hz)` intervals; the returned
/// clip reports that effective rate.
pub fn resample(clip: &MotionClip, target_hz: f64) -> Result<MotionClip, MocapError> {
    if !(target_hz.is_finite() && target_hz > 0.0) {
        return Err(MocapError::InvalidParameter {
            what: "target_hz",
            value: target_hz,
        });
    }
    let start = clip.start();
    let duration = clip.duration();
    let intervals = ((duration * target_hz).round() as usize).max(1);
    let step = duration / intervals as f64;
    let frames = (0..=intervals)
        .map(|k| {
            let t = if k == intervals {
                clip.end()
            } else {
                start + k as f64 * step
            };
            clip.sample(t)
        })
        .collect::<Result<Vec<_>, _>>()?;
    MotionClip::new(frames, intervals as f64 / duration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mocap::{synth_clip, SynthKind, SynthParams};
    use nalgebra::Vector3;

    fn ramp_clip(n: usize, rate: f64) -> MotionClip {
        let frames = (0..n)
            .map(|i| {
                let t = i as f64 / rate;
                let mut joints = [Vector3::zeros(); 13];
                for (k, j) in joints.iter_mut().enumerate() {
                    *j = Vector3::new(t * (k as f64 + 1.0), (3.0 * t).sin(), 1.0 + t * t);
                }
                SkeletonFrame::new(t, joints)
            })
            .collect();
        MotionClip::new(frames, rate).unwrap()
    }

    fn max_joint_diff(a: &MotionClip, b: &MotionClip) -> f64 {
        assert_eq!(a.frames().len(), b.frames().len());
        a.frames()
            .iter()
            .zip(b.frames())
            .flat_map(|(fa, fb)| {
                fa.joints
                    .iter()
                    .zip(fb.joints.iter())
                    .map(|(p, q)| (p - q).abs().max())
                    .chain(std::iter::once((fa.t - fb.t).abs()))
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn rejects_short_and_unordered_clips() {
        let f = SkeletonFrame::new(0.0, [Vector3::zeros(); 13]);
        assert!(matches!(
            MotionClip::new(vec![f.clone()], 10.0),
            Err(MocapError::TooFewFrames(1))
        ));
        assert!(matches!(
            MotionClip::new(vec![f.clone(), f], 10.0),
            Err(MocapError::UnorderedFrames { index: 1, .. })
        ));
    }

    #[test]
    fn resample_to_own_rate_is_identity() {
        let clip = ramp_clip(50, 120.0);
        let out = resample(&clip, 120.0).unwrap();
        assert!(max_joint_diff(&clip, &out) < 1e-9);
    }

    #[test]
    fn downsample_120_to_30() {
        let clip = ramp_clip(121, 120.0);
        let out = resample(&clip, 30.0).unwrap();
        assert_eq!(out.frames().len(), 31);
        assert!((out.rate_hz() - 30.0).abs() < 1e-9);
        assert_eq!(out.start(), clip.start());
        assert_eq!(out.end(), clip.end());
        for w in out.frames().windows(2) {
            assert!((w[1].t - w[0].t - 1.0 / 30.0).abs() < 1e-6);
        }
    }

    #[test]
    fn midpoint_query_is_average_of_neighbours() {
        let clip = ramp_clip(10, 10.0);
        let a = &clip.frames()[3];
        let b = &clip.frames()[4];
        let mid = clip.sample(0.5 * (a.t + b.t)).unwrap();
        for j in 0..13 {
            let expect = (a.joints[j] + b.joints[j]) * 0.5;
            assert!((mid.joints[j] - expect).abs().max() < 1e-12);
        }
    }

    #[test]
    fn constant_pose_stays_constant() {
        let clip = synth_clip(SynthKind::StaticTpose, &SynthParams::default(), 2.0, 120.0).unwrap();
        let first = clip.frames()[0].joints;
        for hz in [7.0, 30.0, 250.0] {
            let out = resample(&clip, hz).unwrap();
            for f in out.frames() {
                assert_eq!(f.joints, first);
            }
        }
    }

    #[test]
    fn resample_is_idempotent() {
        let clip = ramp_clip(97, 120.0);
        for hz in [13.0, 30.0, 60.0] {
            let once = resample(&clip, hz).unwrap();
            let twice = resample(&once, hz).unwrap();
            assert!(max_joint_diff(&once, &twice) < 1e-9);
        }
    }

    #[test]
    fn sample_outside_range_errors() {
        let clip = ramp_clip(10, 10.0);
        assert!(matches!(
            clip.sample(-0.1),
            Err(MocapError::OutOfRange { .. })
        ));
        assert!(clip.sample(0.9).is_ok());
        assert!(clip.sample(0.91).is_err());
    }

    #[test]
    fn concat_shifts_time() {
        let a = ramp_clip(10, 10.0);
        let b = ramp_clip(5, 10.0);
        let c = a.concat(&b).unwrap();
        assert_eq!(c.frames().len(), 15);
        assert!((c.end() - 1.4).abs() < 1e-12);
    }
}
