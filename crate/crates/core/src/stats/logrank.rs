use super::TestResult;
use crate::error::{Error, Result};
use crate::trial::{Arm, TrialDataset};

/// Observed-minus-expected summary for the experimental arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogrankSummary {
    pub observed_minus_expected: f64,
    /// Hypergeometric variance summed over distinct event times.
    pub variance: f64,
    pub events: usize,
}

impl LogrankSummary {
    /// (O − E) / √V; zero when the variance vanishes.
    pub fn z(&self) -> f64 {
        if self.variance > 0.0 {
            self.observed_minus_expected / self.variance.sqrt()
        } else {
            0.0
        }
    }

    /// One-step hazard ratio estimate exp((O − E) / V).
    pub fn hazard_ratio(&self) -> f64 {
        if self.variance > 0.0 {
            (self.observed_minus_expected / self.variance).exp()
        } else {
            1.0
        }
    }
}

/// Unweighted logrank summary over `(time, event, is_experimental)`
/// triples. Ties are grouped at identical times; subjects censored at an
/// event time remain at risk for it.
pub fn logrank_statistic(observations: &mut [(f64, bool, bool)]) -> LogrankSummary {
    observations.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut at_risk = observations.len() as f64;
    let mut at_risk_exp = observations.iter().filter(|o| o.2).count() as f64;
    let mut o_minus_e = 0.0;
    let mut variance = 0.0;
    let mut events = 0usize;

    let mut i = 0;
    while i < observations.len() {
        let t = observations[i].0;
        let mut j = i;
        let (mut d, mut d_exp, mut leaving, mut leaving_exp) = (0.0, 0.0, 0.0, 0.0);
        while j < observations.len() && observations[j].0 == t {
            let (_, event, exp) = observations[j];
            leaving += 1.0;
            if exp {
                leaving_exp += 1.0;
            }
            if event {
                d += 1.0;
                if exp {
                    d_exp += 1.0;
                }
            }
            j += 1;
        }
        if d > 0.0 {
            let share = at_risk_exp / at_risk;
            o_minus_e += d_exp - d * share;
            if at_risk > 1.0 {
                variance += d * share * (1.0 - share) * (at_risk - d) / (at_risk - 1.0);
            }
            events += d as usize;
        }
        at_risk -= leaving;
        at_risk_exp -= leaving_exp;
        i = j;
    }
    LogrankSummary {
        observed_minus_expected: o_minus_e,
        variance,
        events,
    }
}

/// Two-sided unweighted logrank test of equal hazards. The statistic is
/// oriented so negative values favour the experimental arm.
pub fn logrank_test(data: &TrialDataset, alpha: f64) -> Result<TestResult> {
    let mut obs: Vec<(f64, bool, bool)> = data
        .records
        .iter()
        .map(|r| (r.observed_time, r.event_flag, r.arm == Arm::Experimental))
        .collect();
    let summary = logrank_statistic(&mut obs);
    if summary.events == 0 {
        return Err(Error::NoEvents);
    }
    Ok(TestResult::from_z(
        summary.z(),
        alpha,
        summary.hazard_ratio(),
    ))
}
