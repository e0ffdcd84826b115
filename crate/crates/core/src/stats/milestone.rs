use serde::{Deserialize, Serialize};

use super::{km_estimate, TestResult};
use crate::error::{Error, Result};
use crate::trial::{Arm, TrialDataset};

/// Scale on which the two Kaplan–Meier estimates at t0 are compared. Each
/// transform is oriented so larger survival maps to larger values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MilestoneTransform {
    Identity,
    Log,
    /// −log(−log S).
    #[default]
    Cloglog,
    /// arcsin(√S).
    Arcsine,
}

impl MilestoneTransform {
    fn apply(self, s: f64) -> f64 {
        match self {
            Self::Identity => s,
            Self::Log => s.ln(),
            Self::Cloglog => -(-s.ln()).ln(),
            Self::Arcsine => s.sqrt().asin(),
        }
    }

    /// |g'(S)|, the delta-method multiplier.
    fn slope(self, s: f64) -> f64 {
        match self {
            Self::Identity => 1.0,
            Self::Log => 1.0 / s,
            Self::Cloglog => 1.0 / (s * s.ln()).abs(),
            Self::Arcsine => 0.5 / (s * (1.0 - s)).sqrt(),
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "identity" => Some(Self::Identity),
            "log" => Some(Self::Log),
            "cloglog" => Some(Self::Cloglog),
            "arcsine" => Some(Self::Arcsine),
            _ => None,
        }
    }
}

/// Two-sided test of S_control(t0) = S_experimental(t0) from transformed
/// Kaplan–Meier estimates with Greenwood variances. The effect estimate is
/// the survival difference experimental − control.
pub fn milestone_test(
    data: &TrialDataset,
    t0: f64,
    transform: MilestoneTransform,
    alpha: f64,
) -> Result<TestResult> {
    let control = km_estimate(data, Arm::Control)?;
    let experimental = km_estimate(data, Arm::Experimental)?;
    if control.max_follow_up < t0 || experimental.max_follow_up < t0 {
        return Err(Error::MilestoneNotEstimable(t0));
    }
    let (s1, v1) = (control.survival_at(t0), control.variance_at(t0));
    let (s2, v2) = (experimental.survival_at(t0), experimental.variance_at(t0));
    let difference = s2 - s1;
    if s1 == s2 {
        return Ok(TestResult::from_z(0.0, alpha, difference));
    }

    let (g1, g2) = (transform.apply(s1), transform.apply(s2));
    let variance = transform.slope(s1).powi(2) * v1 + transform.slope(s2).powi(2) * v2;
    let z = (g2 - g1) / variance.sqrt();
    if !z.is_finite() {
        return Err(Error::MilestoneNotEstimable(t0));
    }
    Ok(TestResult::from_z(z, alpha, difference))
}
