mod common;

use curesim::design::{find_min_events, power_grid, SearchOutcome};
use curesim::interim::{operating_characteristics, patient_savings, FutilityRule};
use curesim::models::{
    cr_odds_transform, hazard_ratio_curve, inverse_survival, odds_ratio, sample_event_time,
    survival_at,
};
use curesim::rng::{open_uniform, trial_stream};
use curesim::scenario::{PerArm, ScenarioConfig};
use curesim::stats::{logrank_statistic, schoenfeld_events};
use curesim::trial::{
    cut_at_evaluable_count, cut_at_event_count, simulate_indexed_trial, Arm, CapBasis,
    RecruitmentPlan,
};
use curesim::{EventTime, SurvivalDistribution};
use proptest::prelude::*;

use common::*;

fn exponential_scenario(
    control_median: f64,
    experimental_median: f64,
    ratio: f64,
    per_month: u32,
    months: usize,
) -> ScenarioConfig {
    ScenarioConfig {
        name: "exponential".into(),
        control: SurvivalDistribution::exponential_median(control_median).unwrap(),
        experimental: SurvivalDistribution::exponential_median(experimental_median).unwrap(),
        allocation_ratio: ratio,
        recruitment: RecruitmentPlan {
            monthly_targets: vec![per_month; months],
            prevalence: 1.0,
            total_cap: None,
            cap_basis: CapBasis::All,
        },
        monthly_dropout: PerArm::both(0.0),
        alpha: 0.05,
        target_power: 0.8,
        horizon: 240.0,
    }
}

fn cure_law(p: f64, rate: f64) -> SurvivalDistribution {
    SurvivalDistribution::cure_mixture(p, SurvivalDistribution::exponential(rate).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn survival_monotone_and_invertible(p in 0.0..0.9f64, rate in 0.01..2.0f64, t1 in 0.0..100.0f64, dt in 0.0..50.0f64) {
        let law = cure_law(p, rate);
        prop_assert_eq!(survival_at(&law, 0.0).unwrap(), 1.0);
        let s1 = survival_at(&law, t1).unwrap();
        let s2 = survival_at(&law, t1 + dt).unwrap();
        prop_assert!(s2 <= s1);
        prop_assert!(s2 >= p - 1e-15);
        if s1 > p + 1e-6 && s1 < 1.0 {
            let back = inverse_survival(&law, s1).unwrap();
            prop_assert!((back - t1).abs() <= 1e-9 * t1.max(1.0));
        }
    }

    #[test]
    fn odds_transform_round_trip(p in 0.01..0.99f64, or in 0.05..20.0f64) {
        let p2 = cr_odds_transform(p, or).unwrap();
        prop_assert!((odds_ratio(p, p2) - or).abs() <= 1e-12 * or.max(1.0));
    }

    #[test]
    fn mechanistic_inverse_round_trip(q in 0.2..0.999f64) {
        let law = mirros_mechanistic().experimental;
        let t = inverse_survival(&law, q).unwrap();
        prop_assert!((survival_at(&law, t).unwrap() - q).abs() <= 1e-9);
    }
}

#[test]
fn sampled_survival_matches_law_at_deciles() {
    let n = 100_000;
    for law in [
        mirros().control,
        mirros().experimental,
        mirros_mechanistic().control,
    ] {
        let mut rng = trial_stream(99, 0);
        let times: Vec<f64> = (0..n)
            .map(
                |_| match sample_event_time(&law, open_uniform(&mut rng)).unwrap() {
                    EventTime::At(t) => t,
                    EventTime::Cured => f64::INFINITY,
                },
            )
            .collect();
        for k in 1..10 {
            let q = k as f64 / 10.0;
            if q <= law.cure_proportion() {
                continue;
            }
            let t = inverse_survival(&law, q).unwrap();
            let empirical = times.iter().filter(|&&x| x > t).count() as f64 / n as f64;
            let bound = 3.0 * (q * (1.0 - q) / n as f64).sqrt();
            assert!((empirical - q).abs() <= bound, "q = {q}: {empirical}");
        }
        let cured = times.iter().filter(|t| t.is_infinite()).count() as f64 / n as f64;
        let p = law.cure_proportion();
        assert!((cured - p).abs() <= 3.0 * (p * (1.0 - p) / n as f64).sqrt() + 1e-12);
    }
}

#[test]
fn hazard_ratio_constant_only_without_cure() {
    let c = SurvivalDistribution::exponential(0.131).unwrap();
    let e = SurvivalDistribution::exponential(0.101).unwrap();
    let base = hazard_ratio_curve(&e, &c, 0.0).unwrap();
    for t in [0.5, 1.0, 12.0, 60.0, 119.0] {
        assert!((hazard_ratio_curve(&e, &c, t).unwrap() - base).abs() <= 1e-12);
    }
    let s = mirros();
    let early = hazard_ratio_curve(&s.experimental, &s.control, 1.0).unwrap();
    let late = hazard_ratio_curve(&s.experimental, &s.control, 60.0).unwrap();
    assert!((early - late).abs() > 0.05, "{early} vs {late}");
}

/// Kolmogorov–Smirnov distance between a sample and the exponential CDF.
fn ks_exponential(mut xs: Vec<f64>, rate: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-rate * x).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn per_arm_event_times_are_exponential() {
    let s = exponential_scenario(6.0, 9.0, 2.0, 1_000, 100);
    let trial = simulate_indexed_trial(&s, 5, 0).unwrap();
    assert_eq!(trial.patients.len(), 100_000);
    for (arm, law) in [
        (Arm::Control, &s.control),
        (Arm::Experimental, &s.experimental),
    ] {
        let xs: Vec<f64> = trial
            .patients
            .iter()
            .filter(|p| p.arm == arm)
            .map(|p| p.event_time)
            .collect();
        let rate = match law {
            SurvivalDistribution::Exponential(e) => e.rate(),
            _ => unreachable!(),
        };
        let n = xs.len() as f64;
        let d = ks_exponential(xs, rate);
        // asymptotic 1% critical value
        assert!(d < 1.628 / n.sqrt(), "{arm:?}: D = {d}");
    }
    let control = trial
        .patients
        .iter()
        .filter(|p| p.arm == Arm::Control)
        .count() as f64;
    assert!((control / 100_000.0 - 1.0 / 3.0).abs() < 3.0 * (2.0 / 9.0 / 1e5f64).sqrt());
}

#[test]
fn trials_are_reproducible_and_consistent() {
    let s = mirros_mechanistic();
    for index in 0..50 {
        let a = simulate_indexed_trial(&s, 3, index).unwrap();
        let b = simulate_indexed_trial(&s, 3, index).unwrap();
        assert_eq!(a, b);
        let mut previous = 0.0;
        for d in [1, 50, 150, 275, 400] {
            let data = cut_at_event_count(&a, d, s.horizon);
            assert!(data.cut_time >= previous);
            previous = data.cut_time;
            for r in &data.records {
                assert!(r.observed_time >= 0.0);
                if r.event_flag {
                    assert_eq!(r.observed_time, r.latent_event_time);
                }
                assert_eq!(r.cr_flag, r.class.cr_flag());
            }
            if !data.under_evented {
                assert_eq!(data.events(), d as usize);
            }
        }
    }
}

#[test]
fn interim_dataset_size_and_allocation() {
    let s = mirros_mechanistic();
    let mut control = 0usize;
    let trials = 400;
    for index in 0..trials {
        let trial = simulate_indexed_trial(&s, 8, index).unwrap();
        let cut = cut_at_evaluable_count(&trial, 120, 2.0, 1.0).unwrap();
        assert_eq!(cut.dataset.records.len(), 120);
        assert!(cut.randomized_at_decision >= 120);
        control += cut.dataset.arm(Arm::Control).count();
    }
    let fraction = control as f64 / (120 * trials) as f64;
    let se = (2.0 / 9.0 / (120 * trials) as f64).sqrt();
    assert!((fraction - 1.0 / 3.0).abs() < 4.0 * se, "{fraction}");
}

#[test]
fn power_grid_invariants() {
    let s = mirros();
    let ds: Vec<u32> = (240..=280).step_by(5).collect();
    let grid = power_grid(&s, &ds, 4_000, 17).unwrap();
    for w in grid.points.windows(2) {
        assert!(w[1].power >= w[0].power - 3.0 * w[1].mc_se, "{:?}", w);
        assert!(w[1].time.median > w[0].time.median);
    }
    for p in &grid.points {
        assert!((0.0..=1.0).contains(&p.power));
        let expected = (p.power * (1.0 - p.power) / 4_000.0).sqrt();
        assert!((p.mc_se - expected).abs() < 1e-15);
        assert_eq!(p.rejections as f64 / 4_000.0, p.power);
    }
}

#[test]
fn under_evented_trials_do_not_reject() {
    let s = mirros();
    let grid = power_grid(&s, &[500], 200, 1).unwrap();
    let p = grid.points[0];
    assert_eq!(p.under_evented_fraction, 1.0);
    assert_eq!(p.power, 0.0);
    assert_eq!(p.time.median, s.horizon);
}

#[test]
fn simulation_agrees_with_schoenfeld_without_cure() {
    let mut s = exponential_scenario(6.0, 12.0, 1.0, 20, 10);
    s.target_power = 0.8;
    let closed = schoenfeld_events(0.05, 0.8, 0.5, 1.0).unwrap();
    assert_eq!(closed, 66);
    let search = find_min_events(&s, 0.8, closed - 10, closed + 10, 100_000, 4).unwrap();
    match search.outcome {
        SearchOutcome::Found { events } => {
            assert!(
                (events as i64 - closed as i64).abs() <= 3,
                "simulated {events}"
            )
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn null_search_returns_lower_bound() {
    let null = mirros().null_version();
    let search = find_min_events(&null, 0.03, 100, 110, 2_000, 2).unwrap();
    assert_eq!(search.outcome, SearchOutcome::Found { events: 100 });
    assert_eq!(search.grid.points.len(), 1);
}

#[test]
fn unreachable_target_reports_power_at_upper_bound() {
    let search = find_min_events(&mirros(), 0.99, 100, 120, 500, 2).unwrap();
    let last = search.grid.points.last().unwrap();
    assert_eq!(last.events, 120);
    assert_eq!(
        search.outcome,
        SearchOutcome::Unreachable {
            power_at_max: last.power
        }
    );
}

#[test]
fn operating_characteristic_invariants() {
    let alt = mirros_mechanistic();
    let null = alt.null_version();
    let rule = FutilityRule::new(2.0, 120, 2.0, 1.0).unwrap();
    let grid: Vec<f64> = (0..=10).map(|k| 1.0 + 0.2 * k as f64).collect();
    let oc = operating_characteristics(&null, &alt, &grid, &rule, 275, 10_000, 31).unwrap();
    for w in oc.entries.windows(2) {
        assert!(w[1].p_continue_alt <= w[0].p_continue_alt);
        assert!(w[1].p_continue_null <= w[0].p_continue_null);
    }
    for e in &oc.entries {
        assert!((e.p_stop_alt + e.p_continue_alt - 1.0).abs() < 1e-12);
        assert!((e.p_stop_null + e.p_continue_null - 1.0).abs() < 1e-12);
        let cap = oc.power_without_interim.min(e.p_continue_alt);
        assert!(e.overall_power <= cap + 3.0 * e.mc_se_overall_power);
        assert!(e.overall_power_null <= 0.05 + 3.0 * e.mc_se_overall_power_null.max(1e-3));
    }
    let at2 = oc.at(2.0).unwrap();
    let independent = at2.p_continue_alt * oc.power_without_interim;
    assert!(
        at2.overall_power - independent > 3.0 * at2.mc_se_overall_power,
        "{} vs {}",
        at2.overall_power,
        independent
    );
}

#[test]
fn interim_at_the_last_recruit_saves_nobody() {
    let mut s = exponential_scenario(6.0, 9.0, 1.0, 10, 10);
    s.recruitment.total_cap = Some(100);
    let rule = FutilityRule::new(2.0, 100, 0.0, 0.0).unwrap();
    let savings = patient_savings(&s, &rule, 50, 1).unwrap();
    assert_eq!(savings.not_recruited_if_stopped.q75, 0.0);
    assert_eq!(savings.recruited_at_decision.median, 100.0);
}

#[test]
fn logrank_matches_textbook_on_random_small_sets() {
    let mut rng = trial_stream(12, 0);
    for _ in 0..200 {
        let rows: Vec<(Arm, f64, bool)> = (0..12)
            .map(|_| {
                let arm = if open_uniform(&mut rng) < 0.5 {
                    Arm::Control
                } else {
                    Arm::Experimental
                };
                // coarse times produce ties
                let t = (open_uniform(&mut rng) * 6.0).ceil();
                (arm, t, open_uniform(&mut rng) < 0.7)
            })
            .collect();
        let (o_e, v) = logrank_oracle(&rows);
        let mut obs: Vec<_> = rows
            .iter()
            .map(|r| (r.1, r.2, r.0 == Arm::Experimental))
            .collect();
        let summary = logrank_statistic(&mut obs);
        assert!((summary.observed_minus_expected - o_e).abs() <= 1e-12);
        assert!((summary.variance - v).abs() <= 1e-12);
    }
}
