use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid {name}: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),

    #[error("survival is zero at t = {0}; hazard undefined")]
    ZeroSurvival(f64),

    #[error("control hazard is zero at t = {0}")]
    ZeroHazard(f64),

    /// The requested survival level lies in the cured mass; callers treat
    /// this as a cured outcome rather than a failure.
    #[error("survival level {level} is at or below the cure proportion {cure_proportion}")]
    InCuredMass { level: f64, cure_proportion: f64 },

    #[error("no events in the pooled data; test has no information")]
    NoEvents,

    #[error("milestone at t0 = {0} is not estimable")]
    MilestoneNotEstimable(f64),

    #[error("arm `{0}` has no patients")]
    EmptyArm(&'static str),

    #[error("only {available} eligible patients recruited, {needed} required")]
    InsufficientPatients { needed: usize, available: usize },

    #[error("recruitment plan is empty")]
    EmptyPlan,

    #[error("arms use different model families")]
    MixedFamilies,

    #[error("scenario error at `{key}`: {message}")]
    Config { key: String, message: String },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
