mod args;
mod output;

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use curesim::config::{preset, ModelChoice, ScenarioFile};
use curesim::design::{
    default_min_events, find_min_events, milestone_power, power_grid, SearchOutcome,
};
use curesim::interim::{operating_characteristics, patient_savings};
use curesim::models::{hazard_at, hazard_ratio_curve, survival_at};
use curesim::stats::{minimal_detectable_hr, schoenfeld_events, MilestoneTransform};
use curesim::trial::{cut_at_event_count, simulate_indexed_trial};
use serde_json::json;

use args::{Cli, Command, Common, Model};
use output::{fmt, Table};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

struct Loaded {
    file: ScenarioFile,
    model: ModelChoice,
}

fn load(common: &Common, default_model: Model) -> Result<Loaded> {
    if let Some(threads) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring worker threads")?;
    }
    let file = match (&common.scenario, &common.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            output::read_scenario(&text)?
        }
        (None, Some(name)) => preset(name)?,
        (None, None) => bail!("give --scenario FILE or --preset NAME"),
    };
    Ok(Loaded {
        file,
        model: common.model.unwrap_or(default_model).into(),
    })
}

fn events_or(file: &ScenarioFile, explicit: Option<u32>) -> Result<u32> {
    match explicit {
        Some(d) => Ok(d),
        None => Ok(file.events()?),
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Power { common, events } => {
            let l = load(&common, Model::SampleSize)?;
            let scenario = l.file.scenario(l.model)?;
            let events = if events.is_empty() {
                vec![l.file.events()?]
            } else {
                events
            };
            let grid = power_grid(scenario, &events, common.trials, common.seed)?;
            for p in &grid.points {
                println!(
                    "d = {}: power {:.4} (se {:.4}), median time {:.2} months",
                    p.events, p.power, p.mc_se, p.time.median
                );
            }
            let table = output::power_table(&grid.points);
            output::emit("power", &common, &l.file, l.model, table, &grid)
        }
        Command::EventsSearch {
            common,
            target,
            d_lo,
            d_hi,
        } => {
            let l = load(&common, Model::SampleSize)?;
            let scenario = l.file.scenario(l.model)?;
            let target = target.unwrap_or(scenario.target_power);
            let d_lo = match d_lo.or(l.file.design.d_lo) {
                Some(d) => d,
                None => default_min_events(scenario)?,
            };
            let d_hi = d_hi.or(l.file.design.d_hi).unwrap_or(2 * d_lo);
            let search = find_min_events(scenario, target, d_lo, d_hi, common.trials, common.seed)?;
            let table = output::power_table(&search.grid.points);
            output::emit("events-search", &common, &l.file, l.model, table, &search)?;
            match search.outcome {
                SearchOutcome::Found { events } => {
                    println!("{events} events reach power {target}");
                    Ok(())
                }
                SearchOutcome::Unreachable { power_at_max } => bail!(
                    "design.power: target {target} unreachable in [{d_lo}, {d_hi}]; \
                     power at {d_hi} events is {power_at_max:.4}"
                ),
            }
        }
        Command::InterimOc { common, events } => {
            let l = load(&common, Model::Mechanistic)?;
            let alt = l.file.scenario(l.model)?;
            let null = alt.null_version();
            let interim = l.file.interim()?;
            let events = events_or(&l.file, events)?;
            let oc = operating_characteristics(
                &null,
                alt,
                &interim.boundary_grid,
                &interim.rule,
                events,
                common.trials,
                common.seed,
            )?;
            let savings = patient_savings(alt, &interim.rule, common.trials, common.seed)?;
            println!(
                "power without interim {:.4}; median decision at {:.1} months with {:.0} recruited",
                oc.power_without_interim,
                savings.decision_time.median,
                savings.recruited_at_decision.median
            );
            if let Some(e) = oc.at(interim.rule.boundary) {
                println!(
                    "x* = {}: P(stop|alt) {:.4}, P(continue|null) {:.4}, overall power {:.4}",
                    e.boundary, e.p_stop_alt, e.p_continue_null, e.overall_power
                );
            }
            let table = output::oc_table(&oc.entries);
            let result = json!({ "operating_characteristics": oc, "patient_savings": savings });
            output::emit("interim-oc", &common, &l.file, l.model, table, &result)
        }
        Command::MilestonePower {
            common,
            events,
            t0,
            transform,
        } => {
            let l = load(&common, Model::SampleSize)?;
            let scenario = l.file.scenario(l.model)?;
            let events = events_or(&l.file, events)?;
            let settings = l.file.milestone.as_ref();
            let times = if t0.is_empty() {
                settings
                    .map(|m| m.times.clone())
                    .context("milestone.times: give --t0 or a [milestone] section")?
            } else {
                t0
            };
            let transform = match transform {
                Some(name) => MilestoneTransform::parse(&name)
                    .with_context(|| format!("--transform: unknown transform `{name}`"))?,
                None => settings.map(|m| m.transform).unwrap_or_default(),
            };
            let result = milestone_power(
                scenario,
                events,
                &times,
                transform,
                common.trials,
                common.seed,
            )?;
            for p in &result.points {
                println!("t0 = {}: power {:.4}", p.t0, p.power);
            }
            let mut table = Table::new(&["t0", "power", "mc_se", "not_estimable_frac"]);
            for p in &result.points {
                table.row(vec![
                    fmt(p.t0),
                    fmt(p.power),
                    fmt(p.mc_se),
                    fmt(p.not_estimable_fraction),
                ]);
            }
            output::emit("milestone-power", &common, &l.file, l.model, table, &result)
        }
        Command::Curves {
            common,
            max_time,
            step,
        } => {
            let l = load(&common, Model::SampleSize)?;
            let s = l.file.scenario(l.model)?;
            if !(step > 0.0 && max_time >= 0.0) {
                bail!("--step must be positive and --max-time nonnegative");
            }
            let n = (max_time / step + 1e-9).floor() as usize;
            let mut table = Table::new(&[
                "t",
                "s_control",
                "s_experimental",
                "h_control",
                "h_experimental",
                "hazard_ratio",
                "cure_control",
                "cure_experimental",
            ]);
            for k in 0..=n {
                let t = k as f64 * step;
                let or_nan = |r: curesim::Result<f64>| r.unwrap_or(f64::NAN);
                table.row(vec![
                    fmt(t),
                    fmt(survival_at(&s.control, t)?),
                    fmt(survival_at(&s.experimental, t)?),
                    fmt(or_nan(hazard_at(&s.control, t))),
                    fmt(or_nan(hazard_at(&s.experimental, t))),
                    fmt(or_nan(hazard_ratio_curve(&s.experimental, &s.control, t))),
                    fmt(s.control.cure_proportion()),
                    fmt(s.experimental.cure_proportion()),
                ]);
            }
            println!(
                "cure proportions: control {:.4}, experimental {:.4}",
                s.control.cure_proportion(),
                s.experimental.cure_proportion()
            );
            let result = table.to_json();
            output::emit("curves", &common, &l.file, l.model, table, &result)
        }
        Command::Trials { common, events } => {
            let l = load(&common, Model::SampleSize)?;
            let s = l.file.scenario(l.model)?;
            let d = events_or(&l.file, events)?;
            let mut table = Table::new(&[
                "trial_id",
                "patient_id",
                "arm",
                "responder_class",
                "cr_flag",
                "rand_time",
                "obs_time",
                "event_flag",
            ]);
            for index in 0..common.trials {
                let trial = simulate_indexed_trial(s, common.seed, index)?;
                let data = cut_at_event_count(&trial, d, s.horizon);
                for r in &data.records {
                    table.row(vec![
                        index.to_string(),
                        r.id.to_string(),
                        r.arm.as_str().to_string(),
                        r.class.as_str().to_string(),
                        u8::from(r.cr_flag).to_string(),
                        fmt(r.randomization_time),
                        fmt(r.observed_time),
                        u8::from(r.event_flag).to_string(),
                    ]);
                }
            }
            let result = table.to_json();
            output::emit("trials", &common, &l.file, l.model, table, &result)
        }
        Command::Schoenfeld {
            alpha,
            power,
            hr,
            ratio,
            output,
        } => {
            let events = schoenfeld_events(alpha, power, hr, ratio)?;
            let mdhr = minimal_detectable_hr(events, ratio, alpha);
            println!("{events} events; minimal detectable hazard ratio {mdhr:.4}");
            let mut table = Table::new(&[
                "alpha",
                "power",
                "hazard_ratio",
                "allocation_ratio",
                "events",
                "mdhr",
            ]);
            table.row(vec![
                fmt(alpha),
                fmt(power),
                fmt(hr),
                fmt(ratio),
                events.to_string(),
                fmt(mdhr),
            ]);
            let result = json!({
                "alpha": alpha,
                "power": power,
                "hazard_ratio": hr,
                "allocation_ratio": ratio,
                "events": events,
                "minimal_detectable_hr": mdhr,
            });
            output::write("schoenfeld", &output, table, &result)
        }
    }
}
