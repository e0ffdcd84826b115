//! Response-based futility interim: the trial continues only if the
//! observed complete-response odds ratio exceeds a boundary x*.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;
use crate::stats::{cr_odds_ratio, logrank_test};
use crate::summary::{proportion_se, Quartiles};
use crate::trial::{cut_at_evaluable_count, cut_at_event_count, simulate_indexed_trial, Trial};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FutilityRule {
    /// Odds-ratio boundary x*; the trial passes iff the observed OR > x*.
    pub boundary: f64,
    pub n_evaluable: u32,
    /// Months from the n-th evaluable randomization until its response is known.
    pub assessment_lag: f64,
    /// Months from data availability to the decision.
    pub decision_lag: f64,
}

impl FutilityRule {
    pub fn new(
        boundary: f64,
        n_evaluable: u32,
        assessment_lag: f64,
        decision_lag: f64,
    ) -> Result<Self> {
        let rule = Self {
            boundary,
            n_evaluable,
            assessment_lag,
            decision_lag,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.boundary.is_finite() && self.boundary > 0.0) {
            return Err(Error::InvalidParameter {
                name: "boundary",
                value: self.boundary,
                reason: "must be positive and finite",
            });
        }
        if self.n_evaluable < 2 {
            return Err(Error::InvalidParameter {
                name: "n_evaluable",
                value: self.n_evaluable as f64,
                reason: "need at least 2 evaluable patients",
            });
        }
        for (name, lag) in [
            ("assessment lag", self.assessment_lag),
            ("decision lag", self.decision_lag),
        ] {
            if !(lag.is_finite() && lag >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value: lag,
                    reason: "must be nonnegative and finite",
                });
            }
        }
        Ok(())
    }

    pub fn with_boundary(self, boundary: f64) -> Self {
        Self { boundary, ..self }
    }

    pub fn passes(&self, observed_or: f64) -> bool {
        observed_or > self.boundary
    }
}

/// Boundaries 1.0, 1.1, …, 3.0.
pub fn default_boundary_grid() -> Vec<f64> {
    boundary_grid(1.0, 3.0, 0.1)
}

/// `from`, `from + step`, … up to `to` inclusive (with rounding slack).
pub fn boundary_grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    if step.is_nan() || step <= 0.0 || to < from {
        return vec![from];
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|k| ((from + k as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterimDecision {
    pub pass: bool,
    pub observed_or: f64,
    pub corrected: bool,
    pub decision_time: f64,
    pub randomized_at_decision: usize,
}

pub fn simulate_interim_decision(trial: &Trial, rule: &FutilityRule) -> Result<InterimDecision> {
    let cut = cut_at_evaluable_count(
        trial,
        rule.n_evaluable,
        rule.assessment_lag,
        rule.decision_lag,
    )?;
    let or = cr_odds_ratio(&cut.dataset)?;
    Ok(InterimDecision {
        pass: rule.passes(or.estimate),
        observed_or: or.estimate,
        corrected: or.corrected,
        decision_time: cut.decision_time,
        randomized_at_decision: cut.randomized_at_decision,
    })
}

/// Operating characteristics at one boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryOc {
    pub boundary: f64,
    pub p_stop_alt: f64,
    pub p_continue_alt: f64,
    pub p_continue_null: f64,
    pub p_stop_null: f64,
    /// P(pass interim and final logrank rejects | alternative).
    pub overall_power: f64,
    /// Same event under the null scenario.
    pub overall_power_null: f64,
    /// Shared by each complementary pair.
    pub mc_se_alt: f64,
    pub mc_se_null: f64,
    pub mc_se_overall_power: f64,
    pub mc_se_overall_power_null: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingCharacteristics {
    pub null_scenario: String,
    pub alt_scenario: String,
    pub rule: FutilityRule,
    pub events: u32,
    pub trials: u64,
    pub seed: u64,
    /// Final logrank power ignoring the interim.
    pub power_without_interim: f64,
    pub power_without_interim_null: f64,
    pub entries: Vec<BoundaryOc>,
}

impl OperatingCharacteristics {
    pub fn at(&self, boundary: f64) -> Option<&BoundaryOc> {
        self.entries
            .iter()
            .find(|e| (e.boundary - boundary).abs() < 1e-9)
    }
}

/// Interim odds ratio and final logrank decision of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointOutcome {
    pub observed_or: f64,
    pub final_reject: bool,
}

/// Interim and final outcomes for trials `0..trials` of `scenario`.
pub fn joint_outcomes(
    scenario: &ScenarioConfig,
    rule: &FutilityRule,
    events: u32,
    trials: u64,
    seed: u64,
) -> Result<Vec<JointOutcome>> {
    (0..trials)
        .into_par_iter()
        .map(|index| {
            let trial = simulate_indexed_trial(scenario, seed, index)?;
            let decision = simulate_interim_decision(&trial, rule)?;
            let data = cut_at_event_count(&trial, events, scenario.horizon);
            let final_reject = !data.under_evented
                && match logrank_test(&data, scenario.alpha) {
                    Ok(result) => result.reject,
                    Err(Error::NoEvents) => false,
                    Err(e) => return Err(e),
                };
            Ok(JointOutcome {
                observed_or: decision.observed_or,
                final_reject,
            })
        })
        .collect()
}

/// Stop/continue probabilities under both scenarios and overall power
/// with futility, at every boundary in `boundaries`. Trial i of either
/// scenario uses stream (seed, i), and every boundary is applied to the
/// same interim odds ratios.
pub fn operating_characteristics(
    null_scenario: &ScenarioConfig,
    alt_scenario: &ScenarioConfig,
    boundaries: &[f64],
    rule: &FutilityRule,
    events: u32,
    trials: u64,
    seed: u64,
) -> Result<OperatingCharacteristics> {
    rule.validate()?;
    for &b in boundaries {
        rule.with_boundary(b).validate()?;
    }
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
            reason: "at least one simulated trial is required",
        });
    }
    null_scenario.validate()?;
    alt_scenario.validate()?;

    let null = joint_outcomes(null_scenario, rule, events, trials, seed)?;
    let alt = joint_outcomes(alt_scenario, rule, events, trials, seed)?;
    let m = trials as f64;
    let count = |outcomes: &[JointOutcome], f: &dyn Fn(&JointOutcome) -> bool| {
        outcomes.iter().filter(|o| f(o)).count() as u64
    };

    let entries = boundaries
        .iter()
        .map(|&b| {
            let pass_alt = count(&alt, &|o| o.observed_or > b);
            let pass_null = count(&null, &|o| o.observed_or > b);
            let overall = count(&alt, &|o| o.observed_or > b && o.final_reject);
            let overall_null = count(&null, &|o| o.observed_or > b && o.final_reject);
            BoundaryOc {
                boundary: b,
                p_stop_alt: 1.0 - pass_alt as f64 / m,
                p_continue_alt: pass_alt as f64 / m,
                p_continue_null: pass_null as f64 / m,
                p_stop_null: 1.0 - pass_null as f64 / m,
                overall_power: overall as f64 / m,
                overall_power_null: overall_null as f64 / m,
                mc_se_alt: proportion_se(pass_alt, trials),
                mc_se_null: proportion_se(pass_null, trials),
                mc_se_overall_power: proportion_se(overall, trials),
                mc_se_overall_power_null: proportion_se(overall_null, trials),
            }
        })
        .collect();

    Ok(OperatingCharacteristics {
        null_scenario: null_scenario.name.clone(),
        alt_scenario: alt_scenario.name.clone(),
        rule: *rule,
        events,
        trials,
        seed,
        power_without_interim: count(&alt, &|o| o.final_reject) as f64 / m,
        power_without_interim_null: count(&null, &|o| o.final_reject) as f64 / m,
        entries,
    })
}

/// Interim timing and how many patients a futility stop would spare.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatientSavings {
    pub decision_time: Quartiles,
    pub recruited_at_decision: Quartiles,
    /// Patients the full trial would still randomize after the decision.
    pub not_recruited_if_stopped: Quartiles,
    pub trials: u64,
    pub seed: u64,
}

pub fn patient_savings(
    scenario: &ScenarioConfig,
    rule: &FutilityRule,
    trials: u64,
    seed: u64,
) -> Result<PatientSavings> {
    rule.validate()?;
    scenario.validate()?;
    let rows: Vec<(f64, f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let trial = simulate_indexed_trial(scenario, seed, index)?;
            let cut = cut_at_evaluable_count(
                &trial,
                rule.n_evaluable,
                rule.assessment_lag,
                rule.decision_lag,
            )?;
            let recruited = cut.randomized_at_decision;
            let saved = trial.total_randomized().saturating_sub(recruited);
            Ok((cut.decision_time, recruited as f64, saved as f64))
        })
        .collect::<Result<_>>()?;
    Ok(PatientSavings {
        decision_time: Quartiles::of(rows.iter().map(|r| r.0).collect()),
        recruited_at_decision: Quartiles::of(rows.iter().map(|r| r.1).collect()),
        not_recruited_if_stopped: Quartiles::of(rows.iter().map(|r| r.2).collect()),
        trials,
        seed,
    })
}
