use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trial::{Arm, TrialDataset};

/// Product-limit survival estimate with Greenwood variances, one entry per
/// distinct event time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmCurve {
    pub times: Vec<f64>,
    pub at_risk: Vec<usize>,
    pub events: Vec<usize>,
    pub survival: Vec<f64>,
    pub variance: Vec<f64>,
    /// Largest observed time (event or censoring) in the sample.
    pub max_follow_up: f64,
    /// Sample size.
    pub n: usize,
}

impl KmCurve {
    /// Estimate from `(time, event)` pairs.
    pub fn from_observations(observations: &mut [(f64, bool)]) -> Self {
        observations.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = observations.len();
        let mut curve = KmCurve {
            times: Vec::new(),
            at_risk: Vec::new(),
            events: Vec::new(),
            survival: Vec::new(),
            variance: Vec::new(),
            max_follow_up: observations.last().map_or(0.0, |o| o.0),
            n,
        };
        let mut at_risk = n;
        let mut s = 1.0;
        let mut greenwood_sum = 0.0;
        let mut censored = false;
        let mut i = 0;
        while i < n {
            let t = observations[i].0;
            let mut j = i;
            let mut d = 0usize;
            while j < n && observations[j].0 == t {
                if observations[j].1 {
                    d += 1;
                }
                j += 1;
            }
            if d > 0 {
                // before any censoring the product telescopes to a plain
                // proportion; use it directly so it is exact
                s = if censored {
                    s * (1.0 - d as f64 / at_risk as f64)
                } else {
                    (at_risk - d) as f64 / n as f64
                };
                let variance = if d < at_risk {
                    greenwood_sum += d as f64 / (at_risk as f64 * (at_risk - d) as f64);
                    s * s * greenwood_sum
                } else {
                    0.0
                };
                curve.times.push(t);
                curve.at_risk.push(at_risk);
                curve.events.push(d);
                curve.survival.push(s);
                curve.variance.push(variance);
            }
            censored |= d < j - i;
            at_risk -= j - i;
            i = j;
        }
        curve
    }

    fn index_at(&self, t: f64) -> Option<usize> {
        self.times.partition_point(|&x| x <= t).checked_sub(1)
    }

    /// Ŝ(t), right-continuous step function.
    pub fn survival_at(&self, t: f64) -> f64 {
        self.index_at(t).map_or(1.0, |i| self.survival[i])
    }

    /// Greenwood variance of Ŝ(t).
    pub fn variance_at(&self, t: f64) -> f64 {
        self.index_at(t).map_or(0.0, |i| self.variance[i])
    }
}

/// Kaplan–Meier curve of one arm.
pub fn km_estimate(data: &TrialDataset, arm: Arm) -> Result<KmCurve> {
    let mut obs: Vec<(f64, bool)> = data
        .arm(arm)
        .map(|r| (r.observed_time, r.event_flag))
        .collect();
    if obs.is_empty() {
        return Err(Error::EmptyArm(arm.as_str()));
    }
    Ok(KmCurve::from_observations(&mut obs))
}
