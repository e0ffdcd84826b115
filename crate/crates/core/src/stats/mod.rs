//! Tests and estimators applied to analysis datasets.

mod formulas;
mod km;
mod logrank;
mod milestone;
mod odds;

pub use formulas::{minimal_detectable_hr, schoenfeld_events};
pub use km::{km_estimate, KmCurve};
pub use logrank::{logrank_statistic, logrank_test, LogrankSummary};
pub use milestone::{milestone_test, MilestoneTransform};
pub use odds::{cr_odds_ratio, CrTable, OddsRatioEstimate};

use serde::{Deserialize, Serialize};

use crate::normal;

/// Outcome of a two-sided hypothesis test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// Standardized statistic, approximately N(0, 1) under the null.
    pub statistic: f64,
    pub p_value: f64,
    /// `p_value < alpha`.
    pub reject: bool,
    /// Hazard ratio (logrank), odds ratio (response) or survival
    /// difference (milestone).
    pub effect_estimate: f64,
}

impl TestResult {
    pub(crate) fn from_z(statistic: f64, alpha: f64, effect_estimate: f64) -> Self {
        let p_value = normal::two_sided_p(statistic);
        Self {
            statistic,
            p_value,
            reject: p_value < alpha,
            effect_estimate,
        }
    }
}
