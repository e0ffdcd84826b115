//! Simulation-based design of two-arm time-to-event trials in which part of
//! each arm may be cured.
//!
//! * [`models`]: exponential, cure-mixture and responder-class event-time
//!   laws and their calibration.
//! * [`trial`]: patient-level trial generation and analysis cuts.
//! * [`stats`]: logrank, Kaplan–Meier, milestone and odds-ratio analyses,
//!   plus closed-form event counts.
//! * [`design`]: Monte Carlo power over event-count grids.
//! * [`interim`]: operating characteristics of a response-based futility
//!   interim.
//! * [`config`]: the flat scenario file format and bundled presets.

pub mod config;
pub mod design;
pub mod error;
pub mod interim;
pub mod models;
pub mod normal;
pub mod rng;
pub mod scenario;
pub mod stats;
pub mod summary;
pub mod trial;

pub use error::{Error, Result};
pub use models::{EventTime, SurvivalDistribution};
pub use scenario::{PerArm, ScenarioConfig};
