//! Composition corrector: a two-axis discrete PID on the normalized screen
//! error.
//!
//! Outputs are orientation increments in degrees per step. A positive
//! `dyaw` turns the camera toward +u (right), a positive `dpitch` toward +v
//! (down), so subtracting them from yaw and pitch moves the subject back to
//! the image center.

use super::camera::Intrinsics;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    /// Degrees per unit of normalized error.
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PidAxis {
    pub gains: PidGains,
    pub integral: f64,
    pub prev_error: Option<f64>,
    /// Bound on `|integral|`; keeps `ki * integral` within the output clamp.
    pub integral_limit: f64,
}

impl PidAxis {
    fn new(gains: PidGains, clamp_deg: f64) -> Self {
        let integral_limit = if gains.ki > 0.0 {
            clamp_deg / gains.ki
        } else {
            0.0
        };
        Self {
            gains,
            integral: 0.0,
            prev_error: None,
            integral_limit,
        }
    }

    fn update(&mut self, error: f64, dt: f64, clamp_deg: f64) -> f64 {
        self.integral =
            (self.integral + error * dt).clamp(-self.integral_limit, self.integral_limit);
        let derivative = self.prev_error.map_or(0.0, |p| (error - p) / dt);
        self.prev_error = Some(error);
        let g = self.gains;
        (g.kp * error + g.ki * self.integral + g.kd * derivative).clamp(-clamp_deg, clamp_deg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PidState {
    pub yaw: PidAxis,
    pub pitch: PidAxis,
    /// Output limit per axis, degrees per step.
    pub clamp_deg: f64,
}

impl PidState {
    pub fn new(yaw: PidGains, pitch: PidGains, clamp_deg: f64) -> Self {
        Self {
            yaw: PidAxis::new(yaw, clamp_deg),
            pitch: PidAxis::new(pitch, clamp_deg),
            clamp_deg,
        }
    }

    /// One controller step on errors already divided by the image size.
    pub fn update_normalized(&mut self, error: (f64, f64), dt: f64) -> (f64, f64) {
        let clamp = self.clamp_deg;
        (
            self.yaw.update(error.0, dt, clamp),
            self.pitch.update(error.1, dt, clamp),
        )
    }
}

/// One controller step on a pixel error: x is normalized by the image width,
/// y by the image height. Returns `(dyaw_deg, dpitch_deg)`.
pub fn pid_update(
    pid: &mut PidState,
    error_px: (f64, f64),
    intrinsics: &Intrinsics,
    dt: f64,
) -> (f64, f64) {
    let e = (
        error_px.0 / intrinsics.width_px as f64,
        error_px.1 / intrinsics.height_px as f64,
    );
    pid.update_normalized(e, dt)
}
