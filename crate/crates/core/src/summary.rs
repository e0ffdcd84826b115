use serde::{Deserialize, Serialize};

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman–Fan type 7). `sorted` must be ascending and nonempty.
pub fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * prob.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

impl Quartiles {
    /// Quartiles of `values`; NaN for an empty sample.
    pub fn of(mut values: Vec<f64>) -> Self {
        if values.is_empty() {
            return Self {
                q25: f64::NAN,
                median: f64::NAN,
                q75: f64::NAN,
            };
        }
        values.sort_by(f64::total_cmp);
        Self {
            q25: quantile_sorted(&values, 0.25),
            median: quantile_sorted(&values, 0.5),
            q75: quantile_sorted(&values, 0.75),
        }
    }
}

/// Binomial Monte Carlo standard error √(p̂(1 − p̂)/M).
pub fn proportion_se(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    let p = successes as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_quantiles() {
        let q = Quartiles::of(vec![4.0, 1.0, 3.0, 2.0]);
        assert_eq!(q.median, 2.5);
        assert_eq!(q.q25, 1.75);
        assert_eq!(q.q75, 3.25);
        assert!(Quartiles::of(vec![]).median.is_nan());
    }

    #[test]
    fn se() {
        assert_eq!(proportion_se(50, 100), 0.05);
        assert_eq!(proportion_se(0, 100), 0.0);
    }
}
