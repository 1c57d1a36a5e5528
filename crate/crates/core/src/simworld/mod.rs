//! Simulated drone, camera and composition control.

mod camera;
mod config;
mod drone;
mod pid;
mod run;

pub use camera::{aim_at, project, screen_error, CameraPose, Intrinsics};
pub use config::{ConfigError, SimConfig};
pub use drone::{drift_noise, drone_step, orbit_position, DroneState};
pub use pid::{pid_update, PidAxis, PidGains, PidState};
pub use run::{follow_me_step, run_simulation, step_count, FollowMe, Mode, SimError, SimRun};
