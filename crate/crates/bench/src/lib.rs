//! Shared inputs for the benchmarks.

use dronefilm_core::mocap::{synth_clip, SynthKind, SynthParams};
use dronefilm_core::MotionClip;

/// A circle walk of `seconds` at 30 Hz, the heaviest of the analytic clips
/// for the planner (the optimum moves every frame).
pub fn circle_clip(seconds: f64) -> MotionClip {
    let params = SynthParams {
        radius_m: 3.0,
        period_s: 20.0,
        ..SynthParams::default()
    };
    synth_clip(SynthKind::CircleWalk, &params, seconds, 30.0).expect("valid synth parameters")
}

/// A BVH document with a 5-joint chain and `frames` frames of motion.
pub fn chain_bvh(frames: usize) -> String {
    let mut s = String::from("HIERARCHY\nROOT Hips\n{\n  OFFSET 0 0 0\n  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation\n");
    for i in 0..4 {
        s += &format!(
            "JOINT J{i}\n{{\n  OFFSET 0 5 0\n  CHANNELS 3 Zrotation Xrotation Yrotation\n"
        );
    }
    s += "End Site\n{\n  OFFSET 0 2 0\n}\n";
    s += &"}\n".repeat(5);
    s += &format!("MOTION\nFrames: {frames}\nFrame Time: 0.0083333\n");
    for f in 0..frames {
        let a = f as f64 * 0.1;
        let row: Vec<String> = (0..18)
            .map(|c| format!("{:.4}", (a + c as f64).sin() * 10.0))
            .collect();
        s += &row.join(" ");
        s.push('\n');
    }
    s
}
