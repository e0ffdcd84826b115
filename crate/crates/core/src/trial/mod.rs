//! Patient-level trial generation and analysis cuts.

mod cut;
mod recruitment;

pub use cut::{
    cut_at_calendar_time, cut_at_evaluable_count, cut_at_event_count, CutRule, InterimCut,
    PatientRecord, TrialDataset,
};
pub use recruitment::{generate_recruitment, Arrival, CapBasis, RecruitmentPlan};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::{sample_event_time, SurvivalDistribution, DEFAULT_LONGTERM_HORIZON};
use crate::rng::{open_uniform, trial_stream};
use crate::scenario::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arm {
    Control,
    Experimental,
}

impl Arm {
    pub fn as_str(self) -> &'static str {
        match self {
            Arm::Control => "control",
            Arm::Experimental => "experimental",
        }
    }
}

/// Latent subgroup a patient was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatientClass {
    /// Uncured component of a two-component cure mixture (or any law
    /// without responder structure).
    Uncured,
    /// Cured component of a two-component cure mixture.
    Cured,
    NonResponder,
    ShortTermResponder,
    LongTermResponder,
}

impl PatientClass {
    /// Complete response; only responder classes have one.
    pub fn cr_flag(self) -> bool {
        matches!(
            self,
            PatientClass::ShortTermResponder | PatientClass::LongTermResponder
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PatientClass::Uncured => "uncured",
            PatientClass::Cured => "cured",
            PatientClass::NonResponder => "non",
            PatientClass::ShortTermResponder => "short",
            PatientClass::LongTermResponder => "long",
        }
    }
}

/// Latent quantities drawn for one patient at randomization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentOutcome {
    pub class: PatientClass,
    /// Months from randomization to the event; cured patients carry the
    /// imputed long-term horizon.
    pub event_time: f64,
    /// Months from randomization to dropout (infinite without dropout).
    pub dropout_time: f64,
}

/// An analysis-eligible randomized patient before any data cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Patient {
    pub id: u32,
    pub arm: Arm,
    pub randomization_time: f64,
    pub class: PatientClass,
    pub event_time: f64,
    pub dropout_time: f64,
}

impl Patient {
    pub fn cr_flag(&self) -> bool {
        self.class.cr_flag()
    }

    /// Calendar time of the event if it happens before dropout.
    pub fn event_calendar_time(&self) -> Option<f64> {
        (self.event_time < self.dropout_time).then_some(self.randomization_time + self.event_time)
    }
}

/// One simulated trial: all analysis-eligible patients plus the calendar
/// of every randomization (eligible or not).
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub patients: Vec<Patient>,
    /// Sorted randomization times of every recruit.
    pub randomization_times: Vec<f64>,
    /// Sorted calendar times of events among eligible patients.
    pub event_times: Vec<f64>,
}

impl Trial {
    pub fn new(patients: Vec<Patient>, mut randomization_times: Vec<f64>) -> Self {
        randomization_times.sort_by(f64::total_cmp);
        let mut event_times: Vec<f64> = patients
            .iter()
            .filter_map(Patient::event_calendar_time)
            .collect();
        event_times.sort_by(f64::total_cmp);
        Self {
            patients,
            randomization_times,
            event_times,
        }
    }

    /// Recruits randomized at or before calendar time `t`.
    pub fn randomized_by(&self, t: f64) -> usize {
        self.randomization_times.partition_point(|&r| r <= t)
    }

    pub fn total_randomized(&self) -> usize {
        self.randomization_times.len()
    }
}

/// Draws a patient's class, event time and dropout time from the arm law.
///
/// Always consumes exactly three uniforms (class, event, dropout) so streams
/// stay aligned across scenarios that share a seed.
pub fn assign_class_and_times<R: Rng + ?Sized>(
    law: &SurvivalDistribution,
    monthly_dropout: f64,
    rng: &mut R,
) -> Result<LatentOutcome> {
    let u_class = open_uniform(rng);
    let u_event = open_uniform(rng);
    let u_dropout = open_uniform(rng);

    let (class, event_time) = match law {
        SurvivalDistribution::Mechanistic(arm) => {
            let [p_non, p_short, _] = arm.class_probabilities();
            if u_class < p_non {
                let t = sample_event_time(arm.nonresponder(), u_event)?;
                (
                    PatientClass::NonResponder,
                    t.months_or(arm.longterm_horizon()),
                )
            } else if u_class < p_non + p_short {
                let t = sample_event_time(arm.shortterm(), u_event)?;
                (
                    PatientClass::ShortTermResponder,
                    t.months_or(arm.longterm_horizon()),
                )
            } else {
                (PatientClass::LongTermResponder, arm.longterm_horizon())
            }
        }
        SurvivalDistribution::CureMixture(mixture) => {
            if u_class < mixture.cure_proportion() {
                (PatientClass::Cured, DEFAULT_LONGTERM_HORIZON)
            } else {
                let t = sample_event_time(mixture.uncured(), u_event)?;
                (PatientClass::Uncured, t.months_or(DEFAULT_LONGTERM_HORIZON))
            }
        }
        other => {
            let t = sample_event_time(other, u_event)?;
            (PatientClass::Uncured, t.months_or(DEFAULT_LONGTERM_HORIZON))
        }
    };

    let dropout_time = if monthly_dropout > 0.0 {
        -u_dropout.ln() / monthly_dropout
    } else {
        f64::INFINITY
    };
    Ok(LatentOutcome {
        class,
        event_time,
        dropout_time,
    })
}

/// Simulates one complete trial from `rng`.
pub fn simulate_trial<R: Rng + ?Sized>(scenario: &ScenarioConfig, rng: &mut R) -> Result<Trial> {
    let arrivals = generate_recruitment(&scenario.recruitment, scenario.allocation_ratio, rng)?;
    let mut patients = Vec::with_capacity(arrivals.len());
    let mut randomization_times = Vec::with_capacity(arrivals.len());
    for arrival in arrivals {
        randomization_times.push(arrival.time);
        if !arrival.eligible {
            continue;
        }
        let (law, dropout) = match arrival.arm {
            Arm::Control => (&scenario.control, scenario.monthly_dropout.control),
            Arm::Experimental => (
                &scenario.experimental,
                scenario.monthly_dropout.experimental,
            ),
        };
        let latent = assign_class_and_times(law, dropout, rng)?;
        patients.push(Patient {
            id: patients.len() as u32,
            arm: arrival.arm,
            randomization_time: arrival.time,
            class: latent.class,
            event_time: latent.event_time,
            dropout_time: latent.dropout_time,
        });
    }
    Ok(Trial::new(patients, randomization_times))
}

/// Simulates trial number `index` of the run seeded with `seed`.
pub fn simulate_indexed_trial(scenario: &ScenarioConfig, seed: u64, index: u64) -> Result<Trial> {
    simulate_trial(scenario, &mut trial_stream(seed, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::MechanisticArmLaw;

    fn arm(p_cr: f64, p_l: f64) -> SurvivalDistribution {
        SurvivalDistribution::Mechanistic(
            MechanisticArmLaw::new(
                p_cr,
                p_l,
                SurvivalDistribution::exponential_median(5.13).unwrap(),
                SurvivalDistribution::exponential_median(7.5).unwrap(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn class_frequencies_follow_probabilities() {
        let law = arm(0.16, 0.5);
        let mut rng = trial_stream(11, 0);
        let n = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            match assign_class_and_times(&law, 0.0, &mut rng).unwrap().class {
                PatientClass::NonResponder => counts[0] += 1,
                PatientClass::ShortTermResponder => counts[1] += 1,
                PatientClass::LongTermResponder => counts[2] += 1,
                c => panic!("unexpected class {c:?}"),
            }
        }
        for (count, p) in counts.iter().zip([0.84, 0.08, 0.08]) {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*count as f64 / n as f64 - p).abs() < 4.0 * se);
        }
    }

    #[test]
    fn everyone_long_term_when_certain() {
        let law = arm(1.0, 1.0);
        let mut rng = trial_stream(12, 0);
        for _ in 0..1000 {
            let latent = assign_class_and_times(&law, 0.0, &mut rng).unwrap();
            assert_eq!(latent.class, PatientClass::LongTermResponder);
            assert_eq!(latent.event_time, DEFAULT_LONGTERM_HORIZON);
            assert!(latent.dropout_time.is_infinite());
        }
    }

    #[test]
    fn dropout_is_exponential_in_the_monthly_rate() {
        let law = SurvivalDistribution::exponential(0.1).unwrap();
        let mut rng = trial_stream(13, 0);
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| {
                assign_class_and_times(&law, 0.02, &mut rng)
                    .unwrap()
                    .dropout_time
            })
            .sum::<f64>()
            / n as f64;
        // mean 50, sd 50
        assert!((mean - 50.0).abs() < 4.0 * 50.0 / (n as f64).sqrt());
    }

    #[test]
    fn cr_flag_matches_class() {
        assert!(!PatientClass::NonResponder.cr_flag());
        assert!(PatientClass::ShortTermResponder.cr_flag());
        assert!(PatientClass::LongTermResponder.cr_flag());
        assert!(!PatientClass::Cured.cr_flag());
    }
}
