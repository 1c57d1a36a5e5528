//! Helpers for angles on the azimuth circle. All angles are in degrees.

/// Normalizes an angle into `[0, 360)`.
pub fn normalize_deg(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Maps an angle difference into `(-180, 180]`.
pub fn wrap_180(deg: f64) -> f64 {
    let r = normalize_deg(deg);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

/// Maps an angle difference into `[-90, 90]` modulo 180.
pub fn wrap_90(deg: f64) -> f64 {
    let r = deg.rem_euclid(180.0);
    if r > 90.0 {
        r - 180.0
    } else {
        r
    }
}

/// Shortest unsigned distance between two azimuths, in `[0, 180]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_180(a - b).abs()
}
