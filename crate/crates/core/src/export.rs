//! CSV writers for quality maps, waypoints, run traces and histograms.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so equal
//! inputs always give byte-identical files.

use std::io::Write;

use crate::metrics::{FrameRecord, Histogram};
use crate::planner::Waypoint;
use crate::viewpoint::QualityMap;

fn num(x: f64) -> String {
    format!("{x}")
}

/// `azimuth_deg, quality, active_descriptor`, one row per sample.
pub fn write_quality_map_csv<W: Write>(out: W, map: &QualityMap) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["azimuth_deg", "quality", "active_descriptor"])?;
    for (i, q) in map.values().iter().enumerate() {
        w.write_record([
            num(map.azimuth(i)),
            num(*q),
            map.descriptor().name().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `t_command, azimuth_deg, radius_m, height_m`.
pub fn write_waypoints_csv<W: Write>(out: W, waypoints: &[Waypoint]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t_command", "azimuth_deg", "radius_m", "height_m"])?;
    for p in waypoints {
        w.write_record([
            num(p.t_command),
            num(p.azimuth_deg),
            num(p.radius),
            num(p.height),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-frame trace. Screen-error cells are empty for invisible frames.
pub fn write_trace_csv<W: Write>(out: W, records: &[FrameRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "t",
        "cam_x",
        "cam_y",
        "cam_z",
        "yaw_deg",
        "pitch_deg",
        "wp_azimuth_deg",
        "globalopt_azimuth_deg",
        "e_x_px",
        "e_y_px",
        "visible_flag",
    ])?;
    for r in records {
        let p = r.camera.position;
        let (ex, ey) = match r.screen_error {
            Some([x, y]) => (num(x), num(y)),
            None => (String::new(), String::new()),
        };
        w.write_record([
            num(r.t),
            num(p.x),
            num(p.y),
            num(p.z),
            num(r.camera.yaw_deg),
            num(r.camera.pitch_deg),
            num(r.waypoint_azimuth_deg),
            num(r.globalopt_azimuth_deg),
            ex,
            ey,
            if r.visible { "1" } else { "0" }.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `bin_lo, bin_hi, count`; an open last bin has `bin_hi = inf`.
pub fn write_histogram_csv<W: Write>(out: W, histogram: &Histogram) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bin_lo", "bin_hi", "count"])?;
    for b in &histogram.bins {
        let hi = b.hi.map_or_else(|| "inf".to_string(), num);
        w.write_record([num(b.lo), hi, b.count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
