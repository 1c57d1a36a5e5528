//! Per-frame footage metrics, run reports and two-run comparisons.
//!
//! Two quantities are tracked: the screen-space error ratio (how far the
//! subject sits from the image center, relative to the image width) and the
//! viewpoint error (how far the camera azimuth is from the nearest best
//! azimuth of that frame's quality map).

use std::fmt::Write as _;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::circular_distance;
use crate::simworld::{CameraPose, Mode};
use crate::viewpoint::{Descriptor, QualityMap};

/// Composition bins per unit ratio (bin width 0.05).
pub const COMPOSITION_BINS_PER_UNIT: f64 = 20.0;
/// Closed composition bins before the open `0.5+` bin.
pub const COMPOSITION_BINS: usize = 10;
/// Width of a viewpoint histogram bin, degrees.
pub const VIEWPOINT_BIN_DEG: f64 = 10.0;
pub const VIEWPOINT_BINS: usize = 18;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no frame records")]
    Empty,
    #[error("{records} frame records but {maps} quality maps")]
    LengthMismatch { records: usize, maps: usize },
    #[error("records mix the {0} and {1} modes")]
    MixedModes(Mode, Mode),
    #[error("the subject was behind the camera in all {0} frames")]
    AllInvisible(usize),
}

/// Everything measured at one simulation step.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub t: f64,
    /// Actual camera pose (true position, corrected orientation).
    pub camera: CameraPose,
    /// Position the drone was commanded to hold, without drift.
    pub commanded_position: Vector3<f64>,
    /// Pixel offset of the subject from the image center; `None` when the
    /// subject is behind the camera.
    pub screen_error: Option<[f64; 2]>,
    pub screen_width: u32,
    pub actual_azimuth_deg: f64,
    pub globalopt_azimuth_deg: f64,
    /// Azimuth of the most recent waypoint; the held azimuth in Follow-Me.
    pub waypoint_azimuth_deg: f64,
    pub descriptor: Descriptor,
    pub mode: Mode,
    pub visible: bool,
}

/// Euclidean screen error divided by the image width.
pub fn screen_error_ratio(e_x: f64, e_y: f64, width_px: u32) -> f64 {
    e_x.hypot(e_y) / width_px as f64
}

/// Circular distance, in `[0, 180]`, from `actual_azimuth_deg` to the
/// nearest global maximizer of `map`.
pub fn viewpoint_error(actual_azimuth_deg: f64, map: &QualityMap) -> f64 {
    map.maximizers()
        .into_iter()
        .map(|i| circular_distance(actual_azimuth_deg, map.azimuth(i)))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    /// `None` for an open-ended last bin.
    pub hi: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    /// Ratio bins `[0, 0.05), ..., [0.45, 0.5), [0.5, inf)`.
    pub fn composition(ratios: &[f64]) -> Self {
        let edge = |i: usize| i as f64 / COMPOSITION_BINS_PER_UNIT;
        let mut bins: Vec<HistogramBin> = (0..=COMPOSITION_BINS)
            .map(|i| HistogramBin {
                lo: edge(i),
                hi: (i < COMPOSITION_BINS).then(|| edge(i + 1)),
                count: 0,
            })
            .collect();
        for &r in ratios {
            let mut i =
                ((r * COMPOSITION_BINS_PER_UNIT).floor().max(0.0) as usize).min(COMPOSITION_BINS);
            // the edges are authoritative when rounding lands next to one
            while i > 0 && r < edge(i) {
                i -= 1;
            }
            while i < COMPOSITION_BINS && r >= edge(i + 1) {
                i += 1;
            }
            bins[i].count += 1;
        }
        Self { bins }
    }

    /// Ten-degree bins on `[0, 180]`; 180 itself falls in the last bin.
    pub fn viewpoint(errors_deg: &[f64]) -> Self {
        let mut bins: Vec<HistogramBin> = (0..VIEWPOINT_BINS)
            .map(|i| HistogramBin {
                lo: i as f64 * VIEWPOINT_BIN_DEG,
                hi: Some((i + 1) as f64 * VIEWPOINT_BIN_DEG),
                count: 0,
            })
            .collect();
        for &e in errors_deg {
            let i = ((e / VIEWPOINT_BIN_DEG).floor().max(0.0) as usize).min(VIEWPOINT_BINS - 1);
            bins[i].count += 1;
        }
        Self { bins }
    }

    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }
}

/// Aggregate metrics of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: Mode,
    pub avg_screen_error_ratio: f64,
    pub avg_viewpoint_error_deg: f64,
    pub histogram_composition: Histogram,
    pub histogram_viewpoint: Histogram,
    pub frame_count: usize,
    pub invisible_count: usize,
}

/// Order-independent mean.
fn mean(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

/// Averages and histograms over the visible frames. `maps[i]` is the quality
/// map `records[i]` is scored against.
pub fn aggregate(records: &[FrameRecord], maps: &[QualityMap]) -> Result<RunReport, MetricsError> {
    let first = records.first().ok_or(MetricsError::Empty)?;
    if records.len() != maps.len() {
        return Err(MetricsError::LengthMismatch {
            records: records.len(),
            maps: maps.len(),
        });
    }
    if let Some(other) = records.iter().find(|r| r.mode != first.mode) {
        return Err(MetricsError::MixedModes(first.mode, other.mode));
    }
    let mut ratios = Vec::with_capacity(records.len());
    let mut view = Vec::with_capacity(records.len());
    for (r, m) in records.iter().zip(maps) {
        if let (true, Some([ex, ey])) = (r.visible, r.screen_error) {
            ratios.push(screen_error_ratio(ex, ey, r.screen_width));
            view.push(viewpoint_error(r.actual_azimuth_deg, m));
        }
    }
    if ratios.is_empty() {
        return Err(MetricsError::AllInvisible(records.len()));
    }
    Ok(RunReport {
        mode: first.mode,
        histogram_composition: Histogram::composition(&ratios),
        histogram_viewpoint: Histogram::viewpoint(&view),
        avg_screen_error_ratio: mean(ratios),
        avg_viewpoint_error_deg: mean(view),
        frame_count: records.len(),
        invisible_count: records.len() - records.iter().filter(|r| r.visible).count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub metric: String,
    pub a: f64,
    pub b: f64,
    /// `a - b`; negative means `a` is better (both metrics are errors).
    pub difference: f64,
    /// Label of the lower-error side, or `"tie"`.
    pub favored: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a_label: String,
    pub b_label: String,
    pub rows: Vec<ComparisonRow>,
    pub a: RunReport,
    pub b: RunReport,
}

/// Side-by-side averages of two reports and their differences.
pub fn compare(a: &RunReport, b: &RunReport) -> Comparison {
    let (a_label, b_label) = if a.mode == b.mode {
        (format!("{} (a)", a.mode), format!("{} (b)", b.mode))
    } else {
        (a.mode.to_string(), b.mode.to_string())
    };
    let row = |metric: &str, x: f64, y: f64| ComparisonRow {
        metric: metric.to_string(),
        a: x,
        b: y,
        difference: x - y,
        favored: if x < y {
            a_label.clone()
        } else if y < x {
            b_label.clone()
        } else {
            "tie".to_string()
        },
    };
    let rows = vec![
        row(
            "avg_screen_error_ratio",
            a.avg_screen_error_ratio,
            b.avg_screen_error_ratio,
        ),
        row(
            "avg_viewpoint_error_deg",
            a.avg_viewpoint_error_deg,
            b.avg_viewpoint_error_deg,
        ),
    ];
    Comparison {
        a_label,
        b_label,
        rows,
        a: a.clone(),
        b: b.clone(),
    }
}

impl Comparison {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("comparison serializes")
    }

    /// Fixed-width text table, three decimals.
    pub fn to_table(&self) -> String {
        let w = self.a_label.len().max(self.b_label.len()).max(10);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<24}  {:>w$}  {:>w$}  {:>10}  favored",
            "metric", self.a_label, self.b_label, "difference"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<24}  {:>w$.3}  {:>w$.3}  {:>10.3}  {}",
                r.metric, r.a, r.b, r.difference, r.favored
            );
        }
        let frames =
            |r: &RunReport| format!("{}/{}", r.frame_count - r.invisible_count, r.frame_count);
        let _ = writeln!(
            out,
            "{:<24}  {:>w$}  {:>w$}",
            "visible_frames",
            frames(&self.a),
            frames(&self.b)
        );
        out
    }
}
