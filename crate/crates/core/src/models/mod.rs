//! Event-time laws: exponential, two-component cure mixtures and the
//! three-class responder model, plus the conversions used to parameterise
//! them.
//!
//! All laws are immutable values. Sampling takes the uniform draw as an
//! argument so nothing here owns RNG state and laws can be shared freely
//! between simulation workers.

mod laws;
mod transforms;

pub use laws::{
    CalibratedUncuredLaw, CureMixtureLaw, ExponentialLaw, MechanisticArmLaw,
    DEFAULT_LONGTERM_HORIZON,
};
pub use transforms::{cr_odds_transform, monthly_dropout_rate, odds_ratio};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of drawing an event time from a law with cure mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventTime {
    /// Event occurs this many months after randomization.
    At(f64),
    /// Never experiences the event.
    Cured,
}

impl EventTime {
    /// Months until the event, with cured subjects imputed at `horizon`.
    pub fn months_or(self, horizon: f64) -> f64 {
        match self {
            EventTime::At(t) => t,
            EventTime::Cured => horizon,
        }
    }

    pub fn is_cured(self) -> bool {
        matches!(self, EventTime::Cured)
    }
}

/// A parametric event-time law on months since randomization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SurvivalDistribution {
    Exponential(ExponentialLaw),
    CureMixture(CureMixtureLaw),
    Mechanistic(MechanisticArmLaw),
    /// Uncured component implied by a mechanistic arm; see
    /// [`calibrate_uncured_law`].
    CalibratedUncured(CalibratedUncuredLaw),
}

impl SurvivalDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        ExponentialLaw::new(rate).map(Self::Exponential)
    }

    pub fn exponential_median(median: f64) -> Result<Self> {
        ExponentialLaw::from_median(median).map(Self::Exponential)
    }

    pub fn cure_mixture(cure_proportion: f64, uncured: SurvivalDistribution) -> Result<Self> {
        CureMixtureLaw::new(cure_proportion, uncured).map(Self::CureMixture)
    }

    /// Short name of the model family, used to check both arms agree.
    pub fn family(&self) -> &'static str {
        match self {
            Self::Exponential(_) => "exponential",
            Self::CureMixture(_) => "cure-mixture",
            Self::Mechanistic(_) => "mechanistic",
            Self::CalibratedUncured(_) => "calibrated-uncured",
        }
    }

    /// Asymptote of the survival function.
    pub fn cure_proportion(&self) -> f64 {
        match self {
            Self::Exponential(_) | Self::CalibratedUncured(_) => 0.0,
            Self::CureMixture(law) => law.cure_proportion(),
            Self::Mechanistic(law) => law.cure_proportion(),
        }
    }

    /// S(t) without argument checks; `t` must be nonnegative.
    pub fn survival(&self, t: f64) -> f64 {
        match self {
            Self::Exponential(law) => law.survival(t),
            Self::CureMixture(law) => law.survival(t),
            Self::Mechanistic(law) => law.survival(t),
            Self::CalibratedUncured(law) => law.survival(t),
        }
    }

    pub fn density(&self, t: f64) -> f64 {
        match self {
            Self::Exponential(law) => law.density(t),
            Self::CureMixture(law) => law.density(t),
            Self::Mechanistic(law) => law.density(t),
            Self::CalibratedUncured(law) => law.density(t),
        }
    }

    /// Solves S(t) = q for q in (p, 1].
    pub fn inverse_survival(&self, q: f64) -> Result<f64> {
        if q.is_nan() || q > 1.0 {
            return Err(Error::InvalidParameter {
                name: "survival level",
                value: q,
                reason: "must not exceed 1",
            });
        }
        let p = self.cure_proportion();
        if q <= p {
            return Err(Error::InCuredMass {
                level: q,
                cure_proportion: p,
            });
        }
        Ok(match self {
            Self::Exponential(law) => law.inverse_survival(q),
            Self::CureMixture(law) => law.inverse_survival(q)?,
            Self::Mechanistic(_) | Self::CalibratedUncured(_) => {
                invert_by_bisection(|t| self.survival(t), q)
            }
        })
    }

    pub fn is_plain_exponential(&self) -> bool {
        matches!(self, Self::Exponential(_))
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential(law) => ExponentialLaw::new(law.rate()).map(|_| ()),
            Self::CureMixture(law) => {
                CureMixtureLaw::new(law.cure_proportion(), law.uncured().clone()).map(|_| ())
            }
            Self::Mechanistic(law) => law.validate(),
            Self::CalibratedUncured(law) => law.arm().validate(),
        }
    }
}

/// Bisection on a nonincreasing survival curve. Brackets by doubling, then
/// halves until the interval is below 1e-13 relative.
fn invert_by_bisection(survival: impl Fn(f64) -> f64, q: f64) -> f64 {
    if q >= 1.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while survival(hi) > q {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if survival(mid) > q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        Err(Error::NegativeTime(t))
    } else {
        Ok(())
    }
}

/// S(t) for t ≥ 0.
pub fn survival_at(law: &SurvivalDistribution, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(law.survival(t).clamp(0.0, 1.0))
}

/// h(t) = f(t) / S(t).
pub fn hazard_at(law: &SurvivalDistribution, t: f64) -> Result<f64> {
    check_time(t)?;
    if let SurvivalDistribution::Exponential(exp) = law {
        return Ok(exp.rate());
    }
    let s = law.survival(t);
    if s <= 0.0 {
        return Err(Error::ZeroSurvival(t));
    }
    Ok(law.density(t) / s)
}

/// Pointwise hazard ratio θ(t) = h_experimental(t) / h_control(t).
pub fn hazard_ratio_curve(
    experimental: &SurvivalDistribution,
    control: &SurvivalDistribution,
    t: f64,
) -> Result<f64> {
    let h_control = hazard_at(control, t)?;
    if h_control <= 0.0 {
        return Err(Error::ZeroHazard(t));
    }
    Ok(hazard_at(experimental, t)? / h_control)
}

/// Solves S(t) = q on (p, 1]; levels in the cured mass yield
/// [`Error::InCuredMass`].
pub fn inverse_survival(law: &SurvivalDistribution, q: f64) -> Result<f64> {
    law.inverse_survival(q)
}

/// Inverse-transform draw: `u` at or below the cure proportion is cured,
/// otherwise the event time solves S(t) = u.
pub fn sample_event_time(law: &SurvivalDistribution, u: f64) -> Result<EventTime> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidParameter {
            name: "uniform draw",
            value: u,
            reason: "must lie in (0, 1)",
        });
    }
    match law.inverse_survival(u) {
        Ok(t) if t.is_finite() => Ok(EventTime::At(t)),
        Ok(_) | Err(Error::InCuredMass { .. }) => Ok(EventTime::Cured),
        Err(e) => Err(e),
    }
}

/// Marginal survival law of a responder-class arm,
/// S̄(t) = p_CR (p_L + (1 − p_L) S_S(t)) + (1 − p_CR) S_N(t).
pub fn mechanistic_marginal(arm: &MechanisticArmLaw) -> SurvivalDistribution {
    SurvivalDistribution::Mechanistic(arm.clone())
}

/// Uncured law S*(t) = (S̄(t) − p) / (1 − p) with p = p_CR · p_L, so that
/// the two-component mixture with cure proportion p reproduces S̄ exactly.
pub fn calibrate_uncured_law(arm: &MechanisticArmLaw) -> Result<SurvivalDistribution> {
    CalibratedUncuredLaw::new(arm.clone()).map(SurvivalDistribution::CalibratedUncured)
}

/// The two-component cure mixture matching a responder-class arm.
pub fn calibrated_cure_mixture(arm: &MechanisticArmLaw) -> Result<SurvivalDistribution> {
    SurvivalDistribution::cure_mixture(arm.cure_proportion(), calibrate_uncured_law(arm)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mirros_control() -> SurvivalDistribution {
        SurvivalDistribution::cure_mixture(0.08, SurvivalDistribution::exponential(0.131).unwrap())
            .unwrap()
    }

    fn mirros_experimental() -> SurvivalDistribution {
        SurvivalDistribution::cure_mixture(0.161, SurvivalDistribution::exponential(0.101).unwrap())
            .unwrap()
    }

    fn mechanistic(p_cr: f64, p_l: f64, hr: f64) -> MechanisticArmLaw {
        MechanisticArmLaw::new(
            p_cr,
            p_l,
            SurvivalDistribution::exponential(2f64.ln() / 5.13 * hr).unwrap(),
            SurvivalDistribution::exponential(2f64.ln() / 7.5 * hr).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn cure_mixture_survival_endpoints() {
        let law = mirros_control();
        assert_eq!(survival_at(&law, 0.0).unwrap(), 1.0);
        assert!((survival_at(&law, 1e4).unwrap() - 0.08).abs() < 1e-15);
        // 0.08 + 0.92 exp(-0.131 t) = 0.5
        let t_half = -((0.5 - 0.08) / 0.92f64).ln() / 0.131;
        assert!((t_half - 5.985).abs() < 1e-3);
        assert!((survival_at(&law, t_half).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(survival_at(&law, -1.0), Err(Error::NegativeTime(-1.0)));
    }

    #[test]
    fn hazards() {
        let exp = SurvivalDistribution::exponential(0.131).unwrap();
        for t in [0.0, 1.0, 50.0, 1e6] {
            assert_eq!(hazard_at(&exp, t).unwrap(), 0.131);
        }
        let law = mirros_control();
        assert!((hazard_at(&law, 0.0).unwrap() - 0.12052).abs() < 1e-15);
        assert!(hazard_at(&law, 60.0).unwrap() < 1e-3);
        assert!(hazard_at(&law, 120.0).unwrap() < 1e-6);
    }

    #[test]
    fn hazard_ratio_examples() {
        let e = SurvivalDistribution::exponential(0.101).unwrap();
        let c = SurvivalDistribution::exponential(0.131).unwrap();
        let theta = hazard_ratio_curve(&e, &c, 7.0).unwrap();
        assert!((theta - 0.101 / 0.131).abs() < 1e-15);

        let theta0 = hazard_ratio_curve(&mirros_experimental(), &mirros_control(), 0.0).unwrap();
        assert!((theta0 - (0.839 * 0.101) / (0.92 * 0.131)).abs() < 1e-12);
        assert!((theta0 - 0.703).abs() < 1e-3);

        // roughly proportional early, departing later
        let theta25 = hazard_ratio_curve(&mirros_experimental(), &mirros_control(), 25.0).unwrap();
        let theta60 = hazard_ratio_curve(&mirros_experimental(), &mirros_control(), 60.0).unwrap();
        assert!((theta25 - theta0).abs() < 0.5 * (theta60 - theta0).abs());
    }

    #[test]
    fn zero_control_hazard_rejected() {
        let c = SurvivalDistribution::cure_mixture(
            0.5,
            SurvivalDistribution::exponential(1.0).unwrap(),
        )
        .unwrap();
        let e = SurvivalDistribution::exponential(1.0).unwrap();
        assert!(matches!(
            hazard_ratio_curve(&e, &c, 1e4),
            Err(Error::ZeroHazard(_))
        ));
    }

    #[test]
    fn medians() {
        let exp = SurvivalDistribution::exponential(0.131).unwrap();
        assert!((inverse_survival(&exp, 0.5).unwrap() - 2f64.ln() / 0.131).abs() < 1e-14);
        assert!((inverse_survival(&mirros_control(), 0.5).unwrap() - 5.985).abs() < 1e-3);
        assert!((inverse_survival(&mirros_experimental(), 0.5).unwrap() - 8.972).abs() < 1e-3);
    }

    #[test]
    fn inverse_domain() {
        let law = mirros_control();
        assert!(matches!(
            inverse_survival(&law, 0.05),
            Err(Error::InCuredMass { .. })
        ));
        assert!(matches!(
            inverse_survival(&law, 0.08),
            Err(Error::InCuredMass { .. })
        ));
        assert!(matches!(
            inverse_survival(&law, 1.01),
            Err(Error::InvalidParameter { .. })
        ));
        assert_eq!(inverse_survival(&law, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn sampling_examples() {
        let exp = SurvivalDistribution::exponential(0.131).unwrap();
        match sample_event_time(&exp, 0.5).unwrap() {
            EventTime::At(t) => assert!((t - 5.291).abs() < 1e-3),
            EventTime::Cured => panic!("exponential cannot cure"),
        }
        assert_eq!(
            sample_event_time(&mirros_control(), 0.05).unwrap(),
            EventTime::Cured
        );
        assert!(sample_event_time(&exp, 0.0).is_err());
        assert!(sample_event_time(&exp, 1.0).is_err());
    }

    #[test]
    fn mechanistic_cure_proportions() {
        assert!((mechanistic(0.16, 0.5, 1.0).cure_proportion() - 0.080).abs() < 1e-15);
        assert!((mechanistic(0.323, 0.5, 1.0).cure_proportion() - 0.1615).abs() < 1e-15);

        let arm = mechanistic(0.0, 0.5, 1.0);
        let marginal = mechanistic_marginal(&arm);
        for t in [0.0, 0.5, 3.0, 17.0, 60.0] {
            assert_eq!(marginal.survival(t), arm.nonresponder().survival(t));
        }
    }

    #[test]
    fn calibration_reproduces_marginal() {
        let arm = mechanistic(0.16, 0.5, 1.0);
        let mixture = calibrated_cure_mixture(&arm).unwrap();
        let marginal = mechanistic_marginal(&arm);
        for i in 0..=240 {
            let t = i as f64 * 0.5;
            assert!((mixture.survival(t) - marginal.survival(t)).abs() < 1e-12);
        }
        let uncured = calibrate_uncured_law(&arm).unwrap();
        assert_eq!(uncured.survival(0.0), 1.0);
        let mut prev = 1.0;
        for i in 0..=400 {
            let s = uncured.survival(i as f64 * 0.3);
            assert!(s <= prev);
            prev = s;
        }
    }

    #[test]
    fn degenerate_calibration() {
        let n = SurvivalDistribution::exponential(0.2).unwrap();
        let arm = MechanisticArmLaw::new(0.3, 1.0, n.clone(), n.clone()).unwrap();
        let uncured = calibrate_uncured_law(&arm).unwrap();
        for t in [0.0, 1.0, 5.0, 20.0] {
            assert!((uncured.survival(t) - n.survival(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn full_cure_cannot_be_calibrated() {
        let n = SurvivalDistribution::exponential(0.2).unwrap();
        let arm = MechanisticArmLaw::new(1.0, 1.0, n.clone(), n).unwrap();
        assert!(calibrate_uncured_law(&arm).is_err());
    }

    #[test]
    fn mechanistic_inverse_by_bisection() {
        let arm = SurvivalDistribution::Mechanistic(mechanistic(0.16, 0.5, 1.0));
        for q in [0.95, 0.5, 0.2, 0.081] {
            let t = inverse_survival(&arm, q).unwrap();
            assert!((arm.survival(t) - q).abs() < 1e-12);
        }
    }
}
