use serde::{Deserialize, Serialize};

use super::{Arm, Patient, PatientClass, Trial};
use crate::error::{Error, Result};

/// How an analysis dataset's cut date was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutRule {
    EventCount(u32),
    EvaluableCount(u32),
    Calendar,
}

/// One patient as seen at an analysis cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatientRecord {
    pub id: u32,
    pub arm: Arm,
    pub class: PatientClass,
    pub cr_flag: bool,
    pub randomization_time: f64,
    pub latent_event_time: f64,
    pub dropout_time: f64,
    /// min(event, dropout, cut − randomization), months.
    pub observed_time: f64,
    pub event_flag: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialDataset {
    pub records: Vec<PatientRecord>,
    pub cut_time: f64,
    pub cut_rule: CutRule,
    /// Event-count cut that never reached its target within the horizon.
    pub under_evented: bool,
}

impl TrialDataset {
    pub fn events(&self) -> usize {
        self.records.iter().filter(|r| r.event_flag).count()
    }

    pub fn arm(&self, arm: Arm) -> impl Iterator<Item = &PatientRecord> {
        self.records.iter().filter(move |r| r.arm == arm)
    }
}

fn record_at(p: &Patient, cut: f64) -> PatientRecord {
    // decided on the calendar scale so the d-th event is exactly at the cut
    let event_flag = p.event_time < p.dropout_time && p.randomization_time + p.event_time <= cut;
    let observed_time = if event_flag {
        p.event_time
    } else {
        p.dropout_time.min(cut - p.randomization_time)
    };
    PatientRecord {
        id: p.id,
        arm: p.arm,
        class: p.class,
        cr_flag: p.cr_flag(),
        randomization_time: p.randomization_time,
        latent_event_time: p.event_time,
        dropout_time: p.dropout_time,
        observed_time,
        event_flag,
    }
}

fn records_at(trial: &Trial, cut: f64) -> Vec<PatientRecord> {
    trial
        .patients
        .iter()
        .filter(|p| p.randomization_time < cut)
        .map(|p| record_at(p, cut))
        .collect()
}

/// Administratively censors the trial at the calendar time of its d-th
/// event. Trials that never accrue `d` events by `horizon` are cut at the
/// horizon and flagged as under-evented.
pub fn cut_at_event_count(trial: &Trial, d: u32, horizon: f64) -> TrialDataset {
    let target = trial
        .event_times
        .get((d as usize).saturating_sub(1))
        .copied()
        .filter(|&t| d >= 1 && t <= horizon);
    let (cut_time, under_evented) = match target {
        Some(t) => (t, false),
        None => (horizon, true),
    };
    TrialDataset {
        records: records_at(trial, cut_time),
        cut_time,
        cut_rule: CutRule::EventCount(d),
        under_evented,
    }
}

/// Dataset of everything observed by calendar time `cut_time`.
pub fn cut_at_calendar_time(trial: &Trial, cut_time: f64) -> TrialDataset {
    TrialDataset {
        records: records_at(trial, cut_time),
        cut_time,
        cut_rule: CutRule::Calendar,
        under_evented: false,
    }
}

/// Interim data of the first `n_evaluable` eligible patients.
#[derive(Debug, Clone, PartialEq)]
pub struct InterimCut {
    /// Cut at the randomization of the n-th eligible patient.
    pub dataset: TrialDataset,
    /// Cutoff + assessment lag + decision lag.
    pub decision_time: f64,
    /// All recruits (eligible or not) randomized by the decision.
    pub randomized_at_decision: usize,
}

/// Interim dataset built from the first `n_evaluable` eligible patients.
/// Recruitment keeps running through the assessment and decision lags;
/// later patients stay in the trial but not in the interim dataset.
pub fn cut_at_evaluable_count(
    trial: &Trial,
    n_evaluable: u32,
    assessment_lag: f64,
    decision_lag: f64,
) -> Result<InterimCut> {
    let n = n_evaluable as usize;
    if n == 0 || trial.patients.len() < n {
        return Err(Error::InsufficientPatients {
            needed: n.max(1),
            available: trial.patients.len(),
        });
    }
    let cutoff = trial.patients[n - 1].randomization_time;
    let decision_time = cutoff + assessment_lag + decision_lag;
    let records = trial.patients[..n]
        .iter()
        .map(|p| record_at(p, cutoff))
        .collect();
    Ok(InterimCut {
        dataset: TrialDataset {
            records,
            cut_time: cutoff,
            cut_rule: CutRule::EvaluableCount(n_evaluable),
            under_evented: false,
        },
        decision_time,
        randomized_at_decision: trial.randomized_by(decision_time),
    })
}
