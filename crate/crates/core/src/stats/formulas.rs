use crate::error::{Error, Result};
use crate::normal;

fn allocation_variance(allocation_ratio: f64) -> f64 {
    let share = allocation_ratio / (1.0 + allocation_ratio);
    share * (1.0 - share)
}

/// Events required for a two-sided logrank test of level `alpha` to reach
/// `power` against a proportional-hazards alternative `hazard_ratio`:
/// ⌈(z_{1−α/2} + z_{power})² / (π(1 − π) ln² HR)⌉ with π = r / (1 + r).
pub fn schoenfeld_events(
    alpha: f64,
    power: f64,
    hazard_ratio: f64,
    allocation_ratio: f64,
) -> Result<u32> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must lie in (0, 1)",
        });
    }
    if !(power > alpha / 2.0 && power < 1.0) {
        return Err(Error::InvalidParameter {
            name: "power",
            value: power,
            reason: "must lie in (alpha / 2, 1)",
        });
    }
    if !(hazard_ratio.is_finite() && hazard_ratio > 0.0) || hazard_ratio == 1.0 {
        return Err(Error::InvalidParameter {
            name: "hazard ratio",
            value: hazard_ratio,
            reason: "must be positive, finite and different from 1",
        });
    }
    if !(allocation_ratio.is_finite() && allocation_ratio > 0.0) {
        return Err(Error::InvalidParameter {
            name: "allocation ratio",
            value: allocation_ratio,
            reason: "must be positive and finite",
        });
    }
    let z = normal::quantile(1.0 - alpha / 2.0) + normal::quantile(power);
    let events = z * z / (allocation_variance(allocation_ratio) * hazard_ratio.ln().powi(2));
    Ok(events.ceil() as u32)
}

/// Hazard ratio at which a logrank test with `events` events is exactly
/// significant: exp(−z_{1−α/2} / √(d π(1 − π))).
pub fn minimal_detectable_hr(events: u32, allocation_ratio: f64, alpha: f64) -> f64 {
    let z = normal::quantile(1.0 - alpha / 2.0);
    (-z / (events as f64 * allocation_variance(allocation_ratio)).sqrt()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_values() {
        assert_eq!(schoenfeld_events(0.05, 0.85, 6.0 / 9.0, 2.0).unwrap(), 246);
        assert_eq!(schoenfeld_events(0.05, 0.85, 0.6667, 2.0).unwrap(), 246);
        assert_eq!(schoenfeld_events(0.05, 0.80, 0.5, 1.0).unwrap(), 66);
        assert!((minimal_detectable_hr(275, 2.0, 0.05) - 0.778).abs() < 1e-3);
        assert!((minimal_detectable_hr(246, 2.0, 0.05) - 0.767).abs() < 1e-3);
        assert!(minimal_detectable_hr(1_000_000_000, 2.0, 0.05) > 0.9998);
    }

    #[test]
    fn schoenfeld_and_mdhr_are_consistent() {
        // at 50% power the minimal detectable HR is the design HR
        let d = schoenfeld_events(0.05, 0.5, 0.7, 1.0).unwrap();
        assert!(minimal_detectable_hr(d, 1.0, 0.05) >= 0.7);
        assert!(minimal_detectable_hr(d - 1, 1.0, 0.05) < 0.7);
    }

    #[test]
    fn invalid_inputs() {
        assert!(schoenfeld_events(0.05, 0.85, 1.0, 2.0).is_err());
        assert!(schoenfeld_events(0.05, 1.0, 0.7, 2.0).is_err());
        assert!(schoenfeld_events(0.05, 0.01, 0.7, 2.0).is_err());
        assert!(schoenfeld_events(0.05, 0.85, -0.7, 2.0).is_err());
        assert!(schoenfeld_events(0.05, 0.85, 0.7, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn events_shrink_as_effect_grows(hr in 0.3f64..0.95, step in 0.001f64..0.2, power in 0.5f64..0.99) {
            let closer = (hr + step).min(0.999);
            prop_assert!(schoenfeld_events(0.05, power, hr, 2.0).unwrap()
                <= schoenfeld_events(0.05, power, closer, 2.0).unwrap());
        }

        #[test]
        fn events_grow_with_power(hr in 0.3f64..0.95, p in 0.5f64..0.98, dp in 0.0f64..0.01) {
            prop_assert!(schoenfeld_events(0.05, p, hr, 2.0).unwrap()
                <= schoenfeld_events(0.05, (p + dp).min(0.999), hr, 2.0).unwrap());
        }
    }
}
