//! Monte Carlo power over a grid of event counts and the search for the
//! smallest event count reaching a target power.
//!
//! Each simulated trial is generated once and cut at every requested event
//! count, so the whole grid shares common random numbers: per trial, the
//! cut time is nondecreasing in d.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;
use crate::stats::{logrank_test, milestone_test, schoenfeld_events, MilestoneTransform};
use crate::summary::{proportion_se, Quartiles};
use crate::trial::{cut_at_event_count, simulate_indexed_trial};

/// Power and analysis timing at one event count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPoint {
    pub events: u32,
    pub power: f64,
    pub mc_se: f64,
    pub rejections: u64,
    /// Calendar months to the cut (horizon for under-evented trials).
    pub time: Quartiles,
    pub under_evented_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerGridResult {
    pub scenario: String,
    pub trials: u64,
    pub seed: u64,
    pub points: Vec<PowerPoint>,
}

impl PowerGridResult {
    pub fn point(&self, events: u32) -> Option<&PowerPoint> {
        self.points.iter().find(|p| p.events == events)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct CutOutcome {
    reject: bool,
    cut_time: f64,
    under_evented: bool,
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
            reason: "at least one simulated trial is required",
        });
    }
    Ok(())
}

/// Simulates `trials` trials and evaluates the logrank test at every event
/// count in `events`. Under-evented trials count as non-rejections.
pub fn power_grid(
    scenario: &ScenarioConfig,
    events: &[u32],
    trials: u64,
    seed: u64,
) -> Result<PowerGridResult> {
    check_trials(trials)?;
    scenario.validate()?;
    if let Some(&bad) = events.iter().find(|&&d| d == 0) {
        return Err(Error::InvalidParameter {
            name: "events",
            value: bad as f64,
            reason: "must be at least 1",
        });
    }

    let per_trial: Vec<Vec<CutOutcome>> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let trial = simulate_indexed_trial(scenario, seed, index)?;
            events
                .iter()
                .map(|&d| {
                    let data = cut_at_event_count(&trial, d, scenario.horizon);
                    let reject = !data.under_evented
                        && match logrank_test(&data, scenario.alpha) {
                            Ok(result) => result.reject,
                            Err(Error::NoEvents) => false,
                            Err(e) => return Err(e),
                        };
                    Ok(CutOutcome {
                        reject,
                        cut_time: data.cut_time,
                        under_evented: data.under_evented,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let points = events
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let rejections = per_trial.iter().filter(|o| o[k].reject).count() as u64;
            let under = per_trial.iter().filter(|o| o[k].under_evented).count();
            PowerPoint {
                events: d,
                power: rejections as f64 / trials as f64,
                mc_se: proportion_se(rejections, trials),
                rejections,
                time: Quartiles::of(per_trial.iter().map(|o| o[k].cut_time).collect()),
                under_evented_fraction: under as f64 / trials as f64,
            }
        })
        .collect();

    Ok(PowerGridResult {
        scenario: scenario.name.clone(),
        trials,
        seed,
        points,
    })
}

/// Logrank power at a single event count.
pub fn estimate_power(
    scenario: &ScenarioConfig,
    events: u32,
    trials: u64,
    seed: u64,
) -> Result<PowerPoint> {
    Ok(power_grid(scenario, &[events], trials, seed)?.points[0])
}

/// Hazard ratio implied by the two arms' medians (control / experimental),
/// the proportional-hazards reference used to seed the event grid.
pub fn median_hazard_ratio(scenario: &ScenarioConfig) -> Result<f64> {
    let control = scenario.control.inverse_survival(0.5)?;
    let experimental = scenario.experimental.inverse_survival(0.5)?;
    Ok(control / experimental)
}

/// Schoenfeld events for the median-implied hazard ratio.
pub fn default_min_events(scenario: &ScenarioConfig) -> Result<u32> {
    schoenfeld_events(
        scenario.alpha,
        scenario.target_power,
        median_hazard_ratio(scenario)?,
        scenario.allocation_ratio,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found { events: u32 },
    Unreachable { power_at_max: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSearch {
    pub target_power: f64,
    pub outcome: SearchOutcome,
    /// Every grid point evaluated, ascending in d.
    pub grid: PowerGridResult,
}

/// Grid points simulated per pass; each pass reuses the same trials.
const SEARCH_CHUNK: u32 = 16;

/// Smallest d in `[d_lo, d_hi]` whose estimated power reaches
/// `target_power`. The grid (step 1) is scanned upwards in chunks; every
/// chunk regenerates the same trials from their streams, so all grid
/// points share common random numbers.
pub fn find_min_events(
    scenario: &ScenarioConfig,
    target_power: f64,
    d_lo: u32,
    d_hi: u32,
    trials: u64,
    seed: u64,
) -> Result<EventSearch> {
    if !(target_power > 0.0 && target_power < 1.0) {
        return Err(Error::InvalidParameter {
            name: "target power",
            value: target_power,
            reason: "must lie in (0, 1)",
        });
    }
    if d_lo == 0 || d_lo > d_hi {
        return Err(Error::InvalidParameter {
            name: "event grid",
            value: d_lo as f64,
            reason: "need 1 <= d_lo <= d_hi",
        });
    }

    let mut grid = PowerGridResult {
        scenario: scenario.name.clone(),
        trials,
        seed,
        points: Vec::new(),
    };
    let mut start = d_lo;
    while start <= d_hi {
        let end = d_hi.min(start.saturating_add(SEARCH_CHUNK - 1));
        let chunk: Vec<u32> = (start..=end).collect();
        let result = power_grid(scenario, &chunk, trials, seed)?;
        let hit = result.points.iter().position(|p| p.power >= target_power);
        match hit {
            Some(k) => {
                grid.points.extend_from_slice(&result.points[..=k]);
                let events = result.points[k].events;
                return Ok(EventSearch {
                    target_power,
                    outcome: SearchOutcome::Found { events },
                    grid,
                });
            }
            None => grid.points.extend(result.points),
        }
        if end == u32::MAX {
            break;
        }
        start = end + 1;
    }
    let power_at_max = grid.points.last().map_or(0.0, |p| p.power);
    Ok(EventSearch {
        target_power,
        outcome: SearchOutcome::Unreachable { power_at_max },
        grid,
    })
}

/// Power of the milestone comparison at one landmark time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MilestonePower {
    pub t0: f64,
    pub power: f64,
    pub mc_se: f64,
    /// Trials where S(t0) could not be estimated in at least one arm.
    pub not_estimable_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilestonePowerResult {
    pub scenario: String,
    pub events: u32,
    pub transform: MilestoneTransform,
    pub trials: u64,
    pub seed: u64,
    pub points: Vec<MilestonePower>,
}

/// Power of the fixed-time survival comparison at each `t0`, each trial
/// analysed at its d-th event. Trials where the milestone is not
/// estimable count as non-rejections.
pub fn milestone_power(
    scenario: &ScenarioConfig,
    events: u32,
    landmarks: &[f64],
    transform: MilestoneTransform,
    trials: u64,
    seed: u64,
) -> Result<MilestonePowerResult> {
    check_trials(trials)?;
    scenario.validate()?;
    if let Some(&bad) = landmarks.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "milestone time",
            value: bad,
            reason: "must be positive and finite",
        });
    }

    // per trial, per landmark: Some(reject) or None when not estimable
    let per_trial: Vec<Vec<Option<bool>>> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let trial = simulate_indexed_trial(scenario, seed, index)?;
            let data = cut_at_event_count(&trial, events, scenario.horizon);
            landmarks
                .iter()
                .map(
                    |&t0| match milestone_test(&data, t0, transform, scenario.alpha) {
                        Ok(result) => Ok(Some(result.reject)),
                        Err(Error::MilestoneNotEstimable(_) | Error::EmptyArm(_)) => Ok(None),
                        Err(e) => Err(e),
                    },
                )
                .collect()
        })
        .collect::<Result<_>>()?;

    let points = landmarks
        .iter()
        .enumerate()
        .map(|(k, &t0)| {
            let rejections = per_trial.iter().filter(|o| o[k] == Some(true)).count() as u64;
            let missing = per_trial.iter().filter(|o| o[k].is_none()).count();
            MilestonePower {
                t0,
                power: rejections as f64 / trials as f64,
                mc_se: proportion_se(rejections, trials),
                not_estimable_fraction: missing as f64 / trials as f64,
            }
        })
        .collect();

    Ok(MilestonePowerResult {
        scenario: scenario.name.clone(),
        events,
        transform,
        trials,
        seed,
        points,
    })
}
