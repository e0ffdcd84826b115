use crate::error::{Error, Result};

/// Experimental response probability implied by a control probability and
/// an odds ratio: OR·o / (1 + OR·o) with o = p / (1 − p).
pub fn cr_odds_transform(p_control: f64, odds_ratio: f64) -> Result<f64> {
    if !(p_control > 0.0 && p_control < 1.0) {
        return Err(Error::InvalidParameter {
            name: "control probability",
            value: p_control,
            reason: "must lie strictly between 0 and 1",
        });
    }
    if !(odds_ratio.is_finite() && odds_ratio > 0.0) {
        return Err(Error::InvalidParameter {
            name: "odds ratio",
            value: odds_ratio,
            reason: "must be positive and finite",
        });
    }
    let scaled = odds_ratio * p_control / (1.0 - p_control);
    Ok(scaled / (1.0 + scaled))
}

/// Odds ratio of `p_experimental` against `p_control`.
pub fn odds_ratio(p_control: f64, p_experimental: f64) -> f64 {
    (p_experimental / (1.0 - p_experimental)) / (p_control / (1.0 - p_control))
}

/// Monthly rate τ with (1 − τ)^12 = 1 − δ.
pub fn monthly_dropout_rate(annual_rate: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&annual_rate) {
        return Err(Error::InvalidParameter {
            name: "annual dropout rate",
            value: annual_rate,
            reason: "must lie in [0, 1)",
        });
    }
    Ok(1.0 - (1.0 - annual_rate).powf(1.0 / 12.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odds_transform_examples() {
        assert!((cr_odds_transform(0.16, 2.5).unwrap() - 0.3226).abs() < 1e-4);
        assert!((cr_odds_transform(0.37, 1.0).unwrap() - 0.37).abs() < 1e-15);
        assert!((cr_odds_transform(0.5, 3.0).unwrap() - 0.75).abs() < 1e-15);
        assert!(cr_odds_transform(0.0, 2.0).is_err());
        assert!(cr_odds_transform(1.0, 2.0).is_err());
        assert!(cr_odds_transform(0.3, 0.0).is_err());
    }

    #[test]
    fn dropout_examples() {
        let tau = monthly_dropout_rate(0.05).unwrap();
        // 1 − exp(ln(0.95)/12)
        assert!((tau - 0.004_265_318_777_560_645).abs() < 1e-15);
        assert_eq!(monthly_dropout_rate(0.0).unwrap(), 0.0);
        assert!((1.0 - (1.0 - tau).powi(12) - 0.05).abs() < 1e-15);
        assert!(monthly_dropout_rate(1.0).is_err());
        assert!(monthly_dropout_rate(-0.1).is_err());
    }
}
