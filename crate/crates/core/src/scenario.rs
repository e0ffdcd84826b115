use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::SurvivalDistribution;
use crate::trial::RecruitmentPlan;

/// A value per treatment arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerArm<T> {
    pub control: T,
    pub experimental: T,
}

impl<T: Copy> PerArm<T> {
    pub fn both(value: T) -> Self {
        Self {
            control: value,
            experimental: value,
        }
    }
}

/// Complete set of trial-design assumptions for one simulation scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub control: SurvivalDistribution,
    pub experimental: SurvivalDistribution,
    /// r = n_experimental / n_control.
    pub allocation_ratio: f64,
    pub recruitment: RecruitmentPlan,
    /// Monthly dropout hazard per arm.
    pub monthly_dropout: PerArm<f64>,
    /// Two-sided significance level.
    pub alpha: f64,
    pub target_power: f64,
    /// Calendar months after which an unfinished trial is cut.
    pub horizon: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.control.validate()?;
        self.experimental.validate()?;
        if self.control.family() != self.experimental.family() {
            return Err(Error::MixedFamilies);
        }
        if !(self.allocation_ratio.is_finite() && self.allocation_ratio > 0.0) {
            return Err(Error::InvalidParameter {
                name: "allocation ratio",
                value: self.allocation_ratio,
                reason: "must be positive and finite",
            });
        }
        for tau in [
            self.monthly_dropout.control,
            self.monthly_dropout.experimental,
        ] {
            if !(0.0..1.0).contains(&tau) {
                return Err(Error::InvalidParameter {
                    name: "monthly dropout",
                    value: tau,
                    reason: "must lie in [0, 1)",
                });
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                reason: "must lie in (0, 1)",
            });
        }
        if !(self.target_power > 0.0 && self.target_power < 1.0) {
            return Err(Error::InvalidParameter {
                name: "target power",
                value: self.target_power,
                reason: "must lie in (0, 1)",
            });
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidParameter {
                name: "horizon",
                value: self.horizon,
                reason: "must be positive and finite",
            });
        }
        self.recruitment.validate()
    }

    /// P(randomized to control) = 1 / (1 + r).
    pub fn control_probability(&self) -> f64 {
        1.0 / (1.0 + self.allocation_ratio)
    }

    /// Copy of this scenario where the experimental arm behaves exactly
    /// like control.
    pub fn null_version(&self) -> Self {
        Self {
            name: format!("{} (null)", self.name),
            experimental: self.control.clone(),
            monthly_dropout: PerArm::both(self.monthly_dropout.control),
            ..self.clone()
        }
    }
}
