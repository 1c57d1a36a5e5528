//! Simulation configuration and its flat `key = value` file format.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::camera::Intrinsics;
use super::pid::{PidGains, PidState};
use crate::planner::PlannerConfig;
use crate::viewpoint::{DEFAULT_SAMPLES, ORBIT_HEIGHT, ORBIT_RADIUS};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error("config parse error: {0}")]
    Parse(String),
}

/// Every tunable of a simulation run. Field names double as config-file
/// keys (the command cycle is spelled `T`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Maximum arc speed, m/s.
    pub v_max: f64,
    /// Command cycle: a new waypoint is published every `T` seconds.
    #[serde(rename = "T")]
    pub command_cycle: f64,
    /// Waypoint smoothing factor in `[0, 1]`.
    pub alpha: f64,
    /// Speed separating the projection-area and velocity-perp descriptors, m/s.
    pub speed_threshold: f64,
    /// Relative hysteresis band around `speed_threshold`; 0 disables it.
    pub hysteresis: f64,
    pub a_acc: f64,
    pub a_dec: f64,
    /// Stationary standard deviation of the position drift per axis, m.
    pub drift_sigma: f64,
    /// Drift correlation time, s.
    pub drift_tau: f64,
    pub rng_seed: u64,
    pub width_px: u32,
    pub height_px: u32,
    pub hfov_deg: f64,
    pub kp_yaw: f64,
    pub ki_yaw: f64,
    pub kd_yaw: f64,
    pub kp_pitch: f64,
    pub ki_pitch: f64,
    pub kd_pitch: f64,
    /// PID output limit per axis, degrees per simulation step.
    pub pid_clamp_deg: f64,
    pub pid_enabled: bool,
    pub radius: f64,
    pub height: f64,
    pub sim_rate: f64,
    pub n_samples: usize,
    /// Trailing window for the subject velocity estimate, s.
    pub subject_window: f64,
    /// Camera azimuth around the subject at t = 0, degrees.
    pub initial_azimuth: f64,
    /// Yaw error added to the first aim, degrees.
    pub initial_yaw_offset: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            v_max: 2.0,
            command_cycle: 0.5,
            alpha: 0.6,
            speed_threshold: 0.2,
            hysteresis: 0.0,
            a_acc: 3.0,
            a_dec: 2.0,
            drift_sigma: 0.3,
            drift_tau: 5.0,
            rng_seed: 0,
            width_px: 1280,
            height_px: 720,
            hfov_deg: 66.0,
            kp_yaw: 8.0,
            ki_yaw: 0.5,
            kd_yaw: 1.0,
            kp_pitch: 8.0,
            ki_pitch: 0.5,
            kd_pitch: 1.0,
            pid_clamp_deg: 10.0,
            pid_enabled: true,
            radius: ORBIT_RADIUS,
            height: ORBIT_HEIGHT,
            sim_rate: 30.0,
            n_samples: DEFAULT_SAMPLES,
            subject_window: 0.2,
            initial_azimuth: 0.0,
            initial_yaw_offset: 0.0,
        }
    }
}

impl SimConfig {
    /// Parses a flat `key = value` document; missing keys take defaults.
    /// The result is validated.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut problems = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                problems.push(format!("{name} = {v}: must be a positive finite number"));
            }
        };
        positive("v_max", self.v_max);
        positive("T", self.command_cycle);
        positive("speed_threshold", self.speed_threshold);
        positive("a_acc", self.a_acc);
        positive("a_dec", self.a_dec);
        positive("drift_tau", self.drift_tau);
        positive("hfov_deg", self.hfov_deg);
        positive("pid_clamp_deg", self.pid_clamp_deg);
        positive("radius", self.radius);
        positive("height", self.height);
        positive("sim_rate", self.sim_rate);
        positive("subject_window", self.subject_window);
        if !(0.0..=1.0).contains(&self.alpha) {
            problems.push(format!("alpha = {}: must be in [0, 1]", self.alpha));
        }
        if !(0.0..1.0).contains(&self.hysteresis) {
            problems.push(format!(
                "hysteresis = {}: must be in [0, 1)",
                self.hysteresis
            ));
        }
        if !(self.drift_sigma.is_finite() && self.drift_sigma >= 0.0) {
            problems.push(format!("drift_sigma = {}: must be >= 0", self.drift_sigma));
        }
        if self.hfov_deg >= 180.0 {
            problems.push(format!("hfov_deg = {}: must be below 180", self.hfov_deg));
        }
        if self.width_px == 0 || self.height_px == 0 {
            problems.push("width_px and height_px must be positive".to_string());
        }
        for (name, g) in [
            ("kp_yaw", self.kp_yaw),
            ("ki_yaw", self.ki_yaw),
            ("kd_yaw", self.kd_yaw),
            ("kp_pitch", self.kp_pitch),
            ("ki_pitch", self.ki_pitch),
            ("kd_pitch", self.kd_pitch),
        ] {
            if !(g.is_finite() && g >= 0.0) {
                problems.push(format!("{name} = {g}: gains must be >= 0"));
            }
        }
        if self.n_samples < 4 {
            problems.push(format!(
                "n_samples = {}: must be at least 4",
                self.n_samples
            ));
        }
        for (name, v) in [
            ("initial_azimuth", self.initial_azimuth),
            ("initial_yaw_offset", self.initial_yaw_offset),
        ] {
            if !v.is_finite() {
                problems.push(format!("{name} = {v}: must be finite"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(problems))
        }
    }

    pub fn intrinsics(&self) -> Intrinsics {
        Intrinsics {
            width_px: self.width_px,
            height_px: self.height_px,
            hfov_deg: self.hfov_deg,
        }
    }

    pub fn planner(&self) -> PlannerConfig {
        PlannerConfig {
            v_max: self.v_max,
            command_cycle: self.command_cycle,
            alpha: self.alpha,
            speed_threshold: self.speed_threshold,
            n_samples: self.n_samples,
            radius: self.radius,
            height: self.height,
        }
    }

    pub fn pid(&self) -> PidState {
        PidState::new(
            PidGains {
                kp: self.kp_yaw,
                ki: self.ki_yaw,
                kd: self.kd_yaw,
            },
            PidGains {
                kp: self.kp_pitch,
                ki: self.ki_pitch,
                kd: self.kd_pitch,
            },
            self.pid_clamp_deg,
        )
    }
}
