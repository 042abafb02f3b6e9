//! Linear search on the infinite line with probabilistic detection and two
//! speeds.
//!
//! A robot starts at the origin and looks for a target at unknown signed
//! distance `d`. At speed 1 a pass over the target detects it with
//! probability `p`; at the slow speed `v` detection is certain. Three
//! strategies are provided (fast-only, slow-over-new-ground, and a hybrid
//! that scouts ahead at full speed), together with:
//!
//! - closed-form expected competitive ratios ([`strategies`]),
//! - an exact pass-enumeration oracle and a Monte Carlo sampler ([`oracle`]),
//! - the lower-bound analysis for `p = 0` ([`lowerbound`]),
//! - numerical tuning of the hybrid and `(p, v)` heatmaps ([`tuner`]),
//! - a self-check suite ([`verify`]).

pub mod error;
pub mod lowerbound;
pub mod model;
pub mod num;
pub mod numeric;
pub mod oracle;
pub mod strategies;
pub mod tuner;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    validate_params, Direction, PassEvent, Round, SearchParams, Segment, SpeedClass, StrategyKind,
    StrategySpec, Trajectory,
};
