#![allow(dead_code)]

use curesim::config::{preset, ModelChoice};
use curesim::models::MechanisticArmLaw;
use curesim::trial::{Arm, CutRule, PatientClass, PatientRecord, TrialDataset};
use curesim::{ScenarioConfig, SurvivalDistribution};

pub fn mirros() -> ScenarioConfig {
    preset("mirros")
        .unwrap()
        .scenario(ModelChoice::SampleSize)
        .unwrap()
        .clone()
}

pub fn mirros_mechanistic() -> ScenarioConfig {
    preset("mirros")
        .unwrap()
        .scenario(ModelChoice::Mechanistic)
        .unwrap()
        .clone()
}

pub fn mirros_ph() -> ScenarioConfig {
    preset("mirros-ph")
        .unwrap()
        .scenario(ModelChoice::SampleSize)
        .unwrap()
        .clone()
}

pub fn mechanistic_arm(law: &SurvivalDistribution) -> &MechanisticArmLaw {
    match law {
        SurvivalDistribution::Mechanistic(arm) => arm,
        other => panic!("expected a mechanistic law, got {}", other.family()),
    }
}

/// Dataset from `(arm, observed time, event)` rows.
pub fn dataset(rows: &[(Arm, f64, bool)]) -> TrialDataset {
    let records = rows
        .iter()
        .enumerate()
        .map(|(i, &(arm, t, event))| PatientRecord {
            id: i as u32,
            arm,
            class: PatientClass::Uncured,
            cr_flag: false,
            randomization_time: 0.0,
            latent_event_time: t,
            dropout_time: f64::INFINITY,
            observed_time: t,
            event_flag: event,
        })
        .collect();
    TrialDataset {
        records,
        cut_time: f64::INFINITY,
        cut_rule: CutRule::Calendar,
        under_evented: false,
    }
}

/// Textbook logrank O − E and variance, recomputing risk sets from scratch
/// at every distinct event time.
pub fn logrank_oracle(rows: &[(Arm, f64, bool)]) -> (f64, f64) {
    let mut event_times: Vec<f64> = rows.iter().filter(|r| r.2).map(|r| r.1).collect();
    event_times.sort_by(f64::total_cmp);
    event_times.dedup();
    let (mut o_minus_e, mut v) = (0.0, 0.0);
    for t in event_times {
        let n = rows.iter().filter(|r| r.1 >= t).count() as f64;
        let n2 = rows
            .iter()
            .filter(|r| r.1 >= t && r.0 == Arm::Experimental)
            .count() as f64;
        let d = rows.iter().filter(|r| r.1 == t && r.2).count() as f64;
        let d2 = rows
            .iter()
            .filter(|r| r.1 == t && r.2 && r.0 == Arm::Experimental)
            .count() as f64;
        o_minus_e += d2 - d * n2 / n;
        if n > 1.0 {
            v += d * (n2 / n) * (1.0 - n2 / n) * (n - d) / (n - 1.0);
        }
    }
    (o_minus_e, v)
}
