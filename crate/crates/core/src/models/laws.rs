use serde::{Deserialize, Serialize};

use super::SurvivalDistribution;
use crate::error::{Error, Result};

/// Imputed event time, in months, for subjects who never experience the
/// event. Any value beyond the analysis horizon behaves identically.
pub const DEFAULT_LONGTERM_HORIZON: f64 = 10_000.0;

/// Constant hazard `rate` per month.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialLaw {
    rate: f64,
}

impl ExponentialLaw {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidParameter {
                name: "exponential rate",
                value: rate,
                reason: "must be positive and finite",
            });
        }
        Ok(Self { rate })
    }

    /// Rate ln 2 / median.
    pub fn from_median(median: f64) -> Result<Self> {
        if !(median.is_finite() && median > 0.0) {
            return Err(Error::InvalidParameter {
                name: "median",
                value: median,
                reason: "must be positive and finite",
            });
        }
        Self::new(std::f64::consts::LN_2 / median)
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn median(&self) -> f64 {
        std::f64::consts::LN_2 / self.rate
    }

    pub(crate) fn survival(&self, t: f64) -> f64 {
        (-self.rate * t).exp()
    }

    pub(crate) fn density(&self, t: f64) -> f64 {
        self.rate * (-self.rate * t).exp()
    }

    pub(crate) fn inverse_survival(&self, q: f64) -> f64 {
        -q.ln() / self.rate
    }
}

/// S(t) = p + (1 − p) S*(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CureMixtureLaw {
    cure_proportion: f64,
    uncured: Box<SurvivalDistribution>,
}

impl CureMixtureLaw {
    pub fn new(cure_proportion: f64, uncured: SurvivalDistribution) -> Result<Self> {
        if !(0.0..1.0).contains(&cure_proportion) {
            return Err(Error::InvalidParameter {
                name: "cure proportion",
                value: cure_proportion,
                reason: "must lie in [0, 1)",
            });
        }
        if uncured.cure_proportion() != 0.0 {
            return Err(Error::InvalidParameter {
                name: "uncured law cure proportion",
                value: uncured.cure_proportion(),
                reason: "the uncured component must not carry cure mass",
            });
        }
        Ok(Self {
            cure_proportion,
            uncured: Box::new(uncured),
        })
    }

    pub fn cure_proportion(&self) -> f64 {
        self.cure_proportion
    }

    pub fn uncured(&self) -> &SurvivalDistribution {
        &self.uncured
    }

    pub(crate) fn survival(&self, t: f64) -> f64 {
        let p = self.cure_proportion;
        p + (1.0 - p) * self.uncured.survival(t)
    }

    pub(crate) fn density(&self, t: f64) -> f64 {
        (1.0 - self.cure_proportion) * self.uncured.density(t)
    }

    /// The level is mapped onto the uncured law: S*(t) = (q − p) / (1 − p).
    pub(crate) fn inverse_survival(&self, q: f64) -> Result<f64> {
        let p = self.cure_proportion;
        let level = ((q - p) / (1.0 - p)).min(1.0);
        self.uncured.inverse_survival(level)
    }
}

/// Three responder classes per arm: non-responders follow `nonresponder`,
/// short-term responders follow `shortterm`, long-term responders never
/// have the event (imputed at `longterm_horizon`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanisticArmLaw {
    cr_probability: f64,
    longterm_given_cr: f64,
    nonresponder: Box<SurvivalDistribution>,
    shortterm: Box<SurvivalDistribution>,
    #[serde(default = "default_horizon")]
    longterm_horizon: f64,
}

fn default_horizon() -> f64 {
    DEFAULT_LONGTERM_HORIZON
}

impl MechanisticArmLaw {
    pub fn new(
        cr_probability: f64,
        longterm_given_cr: f64,
        nonresponder: SurvivalDistribution,
        shortterm: SurvivalDistribution,
    ) -> Result<Self> {
        let law = Self {
            cr_probability,
            longterm_given_cr,
            nonresponder: Box::new(nonresponder),
            shortterm: Box::new(shortterm),
            longterm_horizon: DEFAULT_LONGTERM_HORIZON,
        };
        law.validate()?;
        Ok(law)
    }

    pub fn with_longterm_horizon(mut self, horizon: f64) -> Result<Self> {
        self.longterm_horizon = horizon;
        self.validate()?;
        Ok(self)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("CR probability", self.cr_probability),
            ("long-term probability given CR", self.longterm_given_cr),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter {
                    name,
                    value: p,
                    reason: "must lie in [0, 1]",
                });
            }
        }
        for law in [&*self.nonresponder, &*self.shortterm] {
            law.validate()?;
            if law.cure_proportion() != 0.0 {
                return Err(Error::InvalidParameter {
                    name: "class law cure proportion",
                    value: law.cure_proportion(),
                    reason: "non- and short-term responder laws must not carry cure mass",
                });
            }
        }
        if !(self.longterm_horizon.is_finite() && self.longterm_horizon > 0.0) {
            return Err(Error::InvalidParameter {
                name: "long-term horizon",
                value: self.longterm_horizon,
                reason: "must be positive and finite",
            });
        }
        Ok(())
    }

    pub fn cr_probability(&self) -> f64 {
        self.cr_probability
    }

    pub fn longterm_given_cr(&self) -> f64 {
        self.longterm_given_cr
    }

    pub fn nonresponder(&self) -> &SurvivalDistribution {
        &self.nonresponder
    }

    pub fn shortterm(&self) -> &SurvivalDistribution {
        &self.shortterm
    }

    pub fn longterm_horizon(&self) -> f64 {
        self.longterm_horizon
    }

    /// p_CR · p_L.
    pub fn cure_proportion(&self) -> f64 {
        self.cr_probability * self.longterm_given_cr
    }

    /// (non-responder, short-term, long-term) class probabilities.
    pub fn class_probabilities(&self) -> [f64; 3] {
        let p_cr = self.cr_probability;
        let p_l = self.longterm_given_cr;
        [1.0 - p_cr, p_cr * (1.0 - p_l), p_cr * p_l]
    }

    pub(crate) fn survival(&self, t: f64) -> f64 {
        let p_cr = self.cr_probability;
        let p_l = self.longterm_given_cr;
        p_cr * (p_l + (1.0 - p_l) * self.shortterm.survival(t))
            + (1.0 - p_cr) * self.nonresponder.survival(t)
    }

    pub(crate) fn density(&self, t: f64) -> f64 {
        let p_cr = self.cr_probability;
        let p_l = self.longterm_given_cr;
        p_cr * (1.0 - p_l) * self.shortterm.density(t) + (1.0 - p_cr) * self.nonresponder.density(t)
    }
}

/// S*(t) = (S̄(t) − p) / (1 − p) for a mechanistic arm with cure mass p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedUncuredLaw {
    arm: MechanisticArmLaw,
}

impl CalibratedUncuredLaw {
    pub fn new(arm: MechanisticArmLaw) -> Result<Self> {
        let p = arm.cure_proportion();
        if p >= 1.0 {
            return Err(Error::InvalidParameter {
                name: "cure proportion",
                value: p,
                reason: "calibration requires p_CR · p_L < 1",
            });
        }
        Ok(Self { arm })
    }

    pub fn arm(&self) -> &MechanisticArmLaw {
        &self.arm
    }

    pub(crate) fn survival(&self, t: f64) -> f64 {
        let p = self.arm.cure_proportion();
        ((self.arm.survival(t) - p) / (1.0 - p)).clamp(0.0, 1.0)
    }

    pub(crate) fn density(&self, t: f64) -> f64 {
        self.arm.density(t) / (1.0 - self.arm.cure_proportion())
    }
}
