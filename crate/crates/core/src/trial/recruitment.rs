use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Arm;
use crate::error::{Error, Result};
use crate::rng::open_uniform;

/// Which patients count towards the recruitment cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapBasis {
    /// Every randomized patient, eligible for the analysis population or not.
    #[default]
    All,
    /// Only analysis-eligible patients.
    Eligible,
}

/// Planned accrual: overall monthly targets, the fraction of recruits that
/// belong to the analysis population and an optional total cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecruitmentPlan {
    /// Planned randomizations per month, month 1 first.
    pub monthly_targets: Vec<u32>,
    /// Probability a recruit is analysis-eligible.
    pub prevalence: f64,
    /// Total recruitment. When set, accrual continues at the last monthly
    /// target until the cap is reached and the final month is truncated.
    pub total_cap: Option<u32>,
    #[serde(default)]
    pub cap_basis: CapBasis,
}

impl RecruitmentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.monthly_targets.is_empty() {
            return Err(Error::EmptyPlan);
        }
        if !(self.prevalence > 0.0 && self.prevalence <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "prevalence",
                value: self.prevalence,
                reason: "must lie in (0, 1]",
            });
        }
        Ok(())
    }

    /// Planned target for month `j` (0-based), extending the last rate when
    /// a cap is set.
    fn target(&self, month: usize) -> Option<u32> {
        match self.monthly_targets.get(month) {
            Some(&n) => Some(n),
            None if self.total_cap.is_some() => self.monthly_targets.last().copied(),
            None => None,
        }
    }
}

/// One randomized patient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    /// Calendar months since the first month opened.
    pub time: f64,
    pub arm: Arm,
    /// Member of the analysis population.
    pub eligible: bool,
}

/// Draws the randomization calendar for one trial.
///
/// Within month j the planned ñ_j arrivals are sorted uniforms on
/// [j − 1, j). Each arrival is eligible with probability `prevalence` and
/// randomized to control with probability 1 / (1 + r); per-patient Bernoulli
/// draws give exactly the binomial monthly counts of eligible and control
/// patients.
pub fn generate_recruitment<R: Rng + ?Sized>(
    plan: &RecruitmentPlan,
    allocation_ratio: f64,
    rng: &mut R,
) -> Result<Vec<Arrival>> {
    plan.validate()?;
    let p_control = 1.0 / (1.0 + allocation_ratio);
    let cap = plan.total_cap.map(|c| c as usize);

    let mut arrivals = Vec::new();
    let mut counted = 0usize;
    let mut times = Vec::new();
    let mut month = 0usize;
    while let Some(target) = plan.target(month) {
        if let Some(cap) = cap {
            if counted >= cap {
                break;
            }
            // an all-zero tail would never reach the cap
            if month >= plan.monthly_targets.len() && target == 0 {
                break;
            }
        }
        times.clear();
        times.extend((0..target).map(|_| month as f64 + open_uniform(rng)));
        times.sort_by(f64::total_cmp);
        for &time in &times {
            let eligible = open_uniform(rng) < plan.prevalence;
            let arm = if open_uniform(rng) < p_control {
                Arm::Control
            } else {
                Arm::Experimental
            };
            if let Some(cap) = cap {
                if counted >= cap {
                    break;
                }
                if eligible || plan.cap_basis == CapBasis::All {
                    counted += 1;
                }
            }
            arrivals.push(Arrival {
                time,
                arm,
                eligible,
            });
        }
        month += 1;
    }
    Ok(arrivals)
}
