//! Autonomous drone cinematography around a moving human subject.
//!
//! The crate turns skeletal motion data into a smooth, dynamically feasible
//! camera trajectory on a subject-centered orbit circle:
//!
//! - [`mocap`] parses BVH / canonical JSONL motion and reduces it to a
//!   13-joint skeleton, and synthesizes analytic test clips.
//! - [`viewpoint`] scores every azimuth on the orbit with either the
//!   velocity-perpendicular or the projection-area descriptor.
//! - [`planner`] searches the reachable arc for a local optimum and smooths
//!   the resulting waypoint sequence.
//! - [`simworld`] flies a simulated drone with asymmetric acceleration,
//!   positional drift, a pinhole camera and a PID composition corrector, and
//!   provides the Follow-Me baseline.
//! - [`metrics`] computes screen-space error ratio and viewpoint error and
//!   aggregates them into reports and comparisons.

pub mod angle;
pub mod export;
pub mod metrics;
pub mod mocap;
pub mod planner;
pub mod simworld;
pub mod viewpoint;

pub use mocap::{BvhDocument, JointId, MotionClip, SkeletonFrame};

pub use metrics::{aggregate, compare, Comparison, FrameRecord, Histogram, RunReport};
pub use planner::{ActionRegion, PlannerConfig, Waypoint};
pub use simworld::{run_simulation, CameraPose, Mode, SimConfig, SimRun};
pub use viewpoint::{Descriptor, QualityMap, SubjectState};
