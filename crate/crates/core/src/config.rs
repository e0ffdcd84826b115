//! Scenario files: a flat, sectioned `key = value` format.
//!
//! ```text
//! [scenario]
//! name = example
//!
//! [arms]
//! family = cure-mixture
//! control.rate = 0.131
//! control.cure = 0.08
//! experimental.median = 6.86
//! experimental.cure = 0.161
//!
//! [recruitment]
//! schedule = 12 x 15, 17 x 15
//! prevalence = 0.85
//! cap = 440
//! ```
//!
//! `#` starts a comment. Every key must be known and appear once; errors
//! name the offending `section.key`. A parsed [`ScenarioFile`] serializes to
//! JSON and can be read back, so result files can embed their full input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interim::{boundary_grid, default_boundary_grid, FutilityRule};
use crate::models::{
    cr_odds_transform, mechanistic_marginal, monthly_dropout_rate, MechanisticArmLaw,
    SurvivalDistribution,
};
use crate::scenario::{PerArm, ScenarioConfig};
use crate::stats::MilestoneTransform;
use crate::trial::{CapBasis, RecruitmentPlan};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_POWER: f64 = 0.8;
pub const DEFAULT_HORIZON: f64 = 120.0;

/// Bundled scenario files, by name.
pub const PRESETS: &[(&str, &str)] = &[
    ("mirros", include_str!("../presets/mirros.scn")),
    ("mirros-ph", include_str!("../presets/mirros-ph.scn")),
];

pub fn preset(name: &str) -> Result<ScenarioFile> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_scenario(text))
        .unwrap_or_else(|| {
            let known: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
            Err(Error::config(
                "preset",
                format!("unknown preset `{name}` (known: {})", known.join(", ")),
            ))
        })
}

/// Which of the file's two survival models to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    /// The `[arms]` section: exponential or cure-mixture laws.
    SampleSize,
    /// The `[mechanistic]` section: responder-class laws.
    Mechanistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSettings {
    /// Event count for single-point analyses.
    pub events: Option<u32>,
    pub d_lo: Option<u32>,
    pub d_hi: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterimSettings {
    pub rule: FutilityRule,
    pub boundary_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilestoneSettings {
    pub times: Vec<f64>,
    pub transform: MilestoneTransform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub name: String,
    pub sample_size: Option<ScenarioConfig>,
    pub mechanistic: Option<ScenarioConfig>,
    pub design: DesignSettings,
    pub interim: Option<InterimSettings>,
    pub milestone: Option<MilestoneSettings>,
}

impl ScenarioFile {
    pub fn scenario(&self, model: ModelChoice) -> Result<&ScenarioConfig> {
        let (found, section) = match model {
            ModelChoice::SampleSize => (self.sample_size.as_ref(), "arms"),
            ModelChoice::Mechanistic => (self.mechanistic.as_ref(), "mechanistic"),
        };
        found.ok_or_else(|| Error::config(section, "section is required for this command"))
    }

    pub fn interim(&self) -> Result<&InterimSettings> {
        self.interim
            .as_ref()
            .ok_or_else(|| Error::config("interim", "section is required for this command"))
    }

    pub fn events(&self) -> Result<u32> {
        self.design
            .events
            .ok_or_else(|| Error::config("design.events", "required for this command"))
    }
}

/// Reads either the sectioned text format or a JSON-serialized
/// [`ScenarioFile`] (detected by a leading `{`).
pub fn load_scenario(text: &str) -> Result<ScenarioFile> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::config("json", e.to_string()))
    } else {
        parse_scenario(text)
    }
}

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

/// Raw `section -> key -> value` table with usage tracking.
struct Table {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
}

impl Table {
    fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, Entry>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| {
                        Error::config(format!("line {line_no}"), "unclosed section header")
                    })?
                    .trim()
                    .to_string();
                if !KNOWN_SECTIONS.contains(&name.as_str()) {
                    return Err(Error::config(name, "unknown section"));
                }
                if sections.contains_key(&name) {
                    return Err(Error::config(name, "section appears twice"));
                }
                sections.insert(name.clone(), BTreeMap::new());
                current = Some(name);
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {line_no}"), "expected `key = value`")
            })?;
            let section = current
                .as_ref()
                .ok_or_else(|| Error::config(key.trim(), "key outside any section"))?;
            let key = key.trim().to_string();
            let map = sections.get_mut(section).expect("section inserted above");
            if map.contains_key(&key) {
                return Err(Error::config(format!("{section}.{key}"), "duplicate key"));
            }
            map.insert(
                key,
                Entry {
                    value: value.trim().to_string(),
                    line: line_no,
                    used: false,
                },
            );
        }
        Ok(Self { sections })
    }

    fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn raw(&mut self, section: &str, key: &str) -> Option<String> {
        let entry = self.sections.get_mut(section)?.get_mut(key)?;
        entry.used = true;
        Some(entry.value.clone())
    }

    fn f64(&mut self, section: &str, key: &str) -> Result<Option<f64>> {
        self.raw(section, key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| {
                        Error::config(format!("{section}.{key}"), format!("`{v}` is not a number"))
                    })
            })
            .transpose()
    }

    fn u32(&mut self, section: &str, key: &str) -> Result<Option<u32>> {
        self.raw(section, key)
            .map(|v| {
                v.parse::<u32>().map_err(|_| {
                    Error::config(
                        format!("{section}.{key}"),
                        format!("`{v}` is not a nonnegative integer"),
                    )
                })
            })
            .transpose()
    }

    fn list(&mut self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.raw(section, key)
            .map(|v| {
                v.split([',', ' '])
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.parse::<f64>().map_err(|_| {
                            Error::config(
                                format!("{section}.{key}"),
                                format!("`{s}` is not a number"),
                            )
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn require<T>(value: Option<T>, section: &str, key: &str) -> Result<T> {
        value.ok_or_else(|| Error::config(format!("{section}.{key}"), "missing required key"))
    }

    fn finish(self) -> Result<()> {
        for (section, map) in &self.sections {
            if let Some((key, entry)) = map.iter().find(|(_, e)| !e.used) {
                return Err(Error::config(
                    format!("{section}.{key}"),
                    format!("unknown key (line {})", entry.line),
                ));
            }
        }
        Ok(())
    }
}

const KNOWN_SECTIONS: &[&str] = &[
    "scenario",
    "arms",
    "mechanistic",
    "recruitment",
    "dropout",
    "design",
    "interim",
    "milestone",
];

/// Reads `<prefix>median` or `<prefix>rate` as an exponential law.
fn exponential_law(
    t: &mut Table,
    section: &str,
    prefix: &str,
) -> Result<Option<SurvivalDistribution>> {
    let median_key = format!("{prefix}median");
    let rate_key = format!("{prefix}rate");
    let median = t.f64(section, &median_key)?;
    let rate = t.f64(section, &rate_key)?;
    let law = match (median, rate) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                format!("{section}.{median_key}"),
                format!("give either `{median_key}` or `{rate_key}`, not both"),
            ))
        }
        (Some(m), None) => SurvivalDistribution::exponential_median(m),
        (None, Some(r)) => SurvivalDistribution::exponential(r),
        (None, None) => return Ok(None),
    };
    law.map(Some)
        .map_err(|e| Error::config(format!("{section}.{prefix}"), e.to_string()))
}

fn sample_size_arms(t: &mut Table) -> Result<PerArm<SurvivalDistribution>> {
    let family = t.raw("arms", "family");
    let mut laws = Vec::with_capacity(2);
    for arm in ["control", "experimental"] {
        let base = exponential_law(t, "arms", &format!("{arm}."))?
            .ok_or_else(|| Error::config(format!("arms.{arm}.median"), "missing median or rate"))?;
        let cure = t.f64("arms", &format!("{arm}.cure"))?;
        let law = match (family.as_deref(), cure) {
            (Some("exponential"), Some(_)) => {
                return Err(Error::config(
                    format!("arms.{arm}.cure"),
                    "exponential family has no cure proportion",
                ))
            }
            (Some("exponential"), None) | (None, None) => base,
            (Some("cure-mixture") | None, c) => {
                SurvivalDistribution::cure_mixture(c.unwrap_or(0.0), base)
                    .map_err(|e| Error::config(format!("arms.{arm}.cure"), e.to_string()))?
            }
            (Some(other), _) => {
                return Err(Error::config(
                    "arms.family",
                    format!("unknown family `{other}` (exponential, cure-mixture)"),
                ))
            }
        };
        laws.push(law);
    }
    let experimental = laws.pop().expect("two arms");
    let control = laws.pop().expect("two arms");
    Ok(PerArm {
        control,
        experimental,
    })
}

fn scale_rate(
    law: &SurvivalDistribution,
    hazard_ratio: f64,
    key: &str,
) -> Result<SurvivalDistribution> {
    match law {
        SurvivalDistribution::Exponential(e) => {
            SurvivalDistribution::exponential(e.rate() * hazard_ratio)
                .map_err(|err| Error::config(key, err.to_string()))
        }
        _ => Err(Error::config(
            key,
            "hazard ratio needs exponential control laws",
        )),
    }
}

fn mechanistic_arms(t: &mut Table) -> Result<PerArm<SurvivalDistribution>> {
    const S: &str = "mechanistic";
    let key = |k: &str| format!("{S}.{k}");

    let p_cr_control = Table::require(t.f64(S, "control.p_cr")?, S, "control.p_cr")?;
    let p_l_control = Table::require(t.f64(S, "control.p_l")?, S, "control.p_l")?;
    let non_control = exponential_law(t, S, "control.nonresponder_")?.ok_or_else(|| {
        Error::config(key("control.nonresponder_median"), "missing median or rate")
    })?;
    let short_control = exponential_law(t, S, "control.shortterm_")?
        .ok_or_else(|| Error::config(key("control.shortterm_median"), "missing median or rate"))?;

    let p_cr_exp = match (
        t.f64(S, "experimental.p_cr")?,
        t.f64(S, "experimental.cr_odds_ratio")?,
    ) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                key("experimental.p_cr"),
                "give either `experimental.p_cr` or `experimental.cr_odds_ratio`, not both",
            ))
        }
        (Some(p), None) => p,
        (None, Some(or)) => cr_odds_transform(p_cr_control, or)
            .map_err(|e| Error::config(key("experimental.cr_odds_ratio"), e.to_string()))?,
        (None, None) => {
            return Err(Error::config(
                key("experimental.p_cr"),
                "missing `experimental.p_cr` or `experimental.cr_odds_ratio`",
            ))
        }
    };
    let p_l_exp = t.f64(S, "experimental.p_l")?.unwrap_or(p_l_control);

    let hazard_ratio = t.f64(S, "experimental.hazard_ratio")?;
    let non_exp = exponential_law(t, S, "experimental.nonresponder_")?;
    let short_exp = exponential_law(t, S, "experimental.shortterm_")?;
    let (non_exp, short_exp) = match (hazard_ratio, non_exp, short_exp) {
        (Some(hr), None, None) => (
            scale_rate(&non_control, hr, &key("experimental.hazard_ratio"))?,
            scale_rate(&short_control, hr, &key("experimental.hazard_ratio"))?,
        ),
        (None, Some(n), Some(s)) => (n, s),
        (Some(_), _, _) => {
            return Err(Error::config(
                key("experimental.hazard_ratio"),
                "give either a hazard ratio or explicit experimental laws, not both",
            ))
        }
        (None, _, _) => {
            return Err(Error::config(
                key("experimental.hazard_ratio"),
                "missing hazard ratio or experimental nonresponder/shortterm laws",
            ))
        }
    };

    let horizon = t.f64(S, "longterm_horizon")?;
    let build = |arm: &str, p_cr, p_l, non, short| -> Result<SurvivalDistribution> {
        let mut law = MechanisticArmLaw::new(p_cr, p_l, non, short)
            .map_err(|e| Error::config(key(&format!("{arm}.p_cr")), e.to_string()))?;
        if let Some(h) = horizon {
            law = law
                .with_longterm_horizon(h)
                .map_err(|e| Error::config(key("longterm_horizon"), e.to_string()))?;
        }
        Ok(mechanistic_marginal(&law))
    };
    Ok(PerArm {
        control: build(
            "control",
            p_cr_control,
            p_l_control,
            non_control,
            short_control,
        )?,
        experimental: build("experimental", p_cr_exp, p_l_exp, non_exp, short_exp)?,
    })
}

/// Parses `"12 x 15, 17 x 15"` (count x months pairs) into monthly targets.
fn parse_schedule(value: &str) -> Result<Vec<u32>> {
    let bad = |msg: String| Error::config("recruitment.schedule", msg);
    let mut targets = Vec::new();
    for part in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (count, months) = part
            .split_once(['x', '*'])
            .ok_or_else(|| bad(format!("`{part}` is not `count x months`")))?;
        let count: u32 = count
            .trim()
            .parse()
            .map_err(|_| bad(format!("`{}` is not a count", count.trim())))?;
        let months: usize = months
            .trim()
            .parse()
            .map_err(|_| bad(format!("`{}` is not a month count", months.trim())))?;
        targets.extend(std::iter::repeat_n(count, months));
    }
    if targets.is_empty() {
        return Err(bad("schedule is empty".into()));
    }
    Ok(targets)
}

fn recruitment(t: &mut Table) -> Result<RecruitmentPlan> {
    const S: &str = "recruitment";
    let schedule = Table::require(t.raw(S, "schedule"), S, "schedule")?;
    let cap_basis = match t.raw(S, "cap_counts").as_deref() {
        None | Some("all") => CapBasis::All,
        Some("eligible") => CapBasis::Eligible,
        Some(other) => {
            return Err(Error::config(
                "recruitment.cap_counts",
                format!("`{other}` is not `all` or `eligible`"),
            ))
        }
    };
    let plan = RecruitmentPlan {
        monthly_targets: parse_schedule(&schedule)?,
        prevalence: t.f64(S, "prevalence")?.unwrap_or(1.0),
        total_cap: t.u32(S, "cap")?,
        cap_basis,
    };
    plan.validate()
        .map_err(|e| Error::config("recruitment.prevalence", e.to_string()))?;
    Ok(plan)
}

/// Monthly dropout hazards from `annual`/`monthly`, optionally per arm.
fn dropout(t: &mut Table) -> Result<PerArm<f64>> {
    const S: &str = "dropout";
    let mut read = |prefix: &str| -> Result<Option<f64>> {
        let annual = t.f64(S, &format!("{prefix}annual"))?;
        let monthly = t.f64(S, &format!("{prefix}monthly"))?;
        match (annual, monthly) {
            (Some(_), Some(_)) => Err(Error::config(
                format!("{S}.{prefix}annual"),
                "give either annual or monthly, not both",
            )),
            (Some(a), None) => monthly_dropout_rate(a)
                .map(Some)
                .map_err(|e| Error::config(format!("{S}.{prefix}annual"), e.to_string())),
            (None, m) => Ok(m),
        }
    };
    let both = read("")?;
    let control = read("control.")?;
    let experimental = read("experimental.")?;
    if both.is_some() && (control.is_some() || experimental.is_some()) {
        return Err(Error::config(
            "dropout.annual",
            "give a common rate or per-arm rates, not both",
        ));
    }
    Ok(PerArm {
        control: control.or(both).unwrap_or(0.0),
        experimental: experimental.or(both).unwrap_or(0.0),
    })
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    let mut t = Table::parse(text)?;
    let name = t
        .raw("scenario", "name")
        .unwrap_or_else(|| "scenario".into());

    const D: &str = "design";
    let alpha = t.f64(D, "alpha")?.unwrap_or(DEFAULT_ALPHA);
    let target_power = t.f64(D, "power")?.unwrap_or(DEFAULT_POWER);
    let allocation_ratio = t.f64(D, "allocation_ratio")?.unwrap_or(1.0);
    let horizon = t.f64(D, "horizon")?.unwrap_or(DEFAULT_HORIZON);
    let design = DesignSettings {
        events: t.u32(D, "events")?,
        d_lo: t.u32(D, "d_lo")?,
        d_hi: t.u32(D, "d_hi")?,
    };

    let has_arms = t.has_section("arms");
    let has_mech = t.has_section("mechanistic");
    if !has_arms && !has_mech {
        return Err(Error::config(
            "arms",
            "need an [arms] or [mechanistic] section",
        ));
    }
    if !t.has_section("recruitment") {
        return Err(Error::config("recruitment", "missing section"));
    }
    let recruitment = recruitment(&mut t)?;
    let monthly_dropout = dropout(&mut t)?;

    let assemble = |label: &str, laws: PerArm<SurvivalDistribution>| -> Result<ScenarioConfig> {
        let config = ScenarioConfig {
            name: format!("{name}/{label}"),
            control: laws.control,
            experimental: laws.experimental,
            allocation_ratio,
            recruitment: recruitment.clone(),
            monthly_dropout,
            alpha,
            target_power,
            horizon,
        };
        config.validate().map_err(|e| match e {
            Error::InvalidParameter { name: "alpha", .. } => {
                Error::config("design.alpha", e.to_string())
            }
            Error::InvalidParameter {
                name: "target power",
                ..
            } => Error::config("design.power", e.to_string()),
            Error::InvalidParameter {
                name: "allocation ratio",
                ..
            } => Error::config("design.allocation_ratio", e.to_string()),
            Error::InvalidParameter {
                name: "horizon", ..
            } => Error::config("design.horizon", e.to_string()),
            Error::InvalidParameter {
                name: "monthly dropout",
                ..
            } => Error::config("dropout", e.to_string()),
            other => Error::config(label, other.to_string()),
        })?;
        Ok(config)
    };

    let sample_size = if has_arms {
        Some(assemble("sample-size", sample_size_arms(&mut t)?)?)
    } else {
        None
    };
    let mechanistic = if has_mech {
        Some(assemble("mechanistic", mechanistic_arms(&mut t)?)?)
    } else {
        None
    };

    let interim = if t.has_section("interim") {
        const I: &str = "interim";
        let n_evaluable = Table::require(t.u32(I, "n_evaluable")?, I, "n_evaluable")?;
        let rule = FutilityRule {
            boundary: t.f64(I, "boundary")?.unwrap_or(2.0),
            n_evaluable,
            assessment_lag: t.f64(I, "assessment_lag")?.unwrap_or(0.0),
            decision_lag: t.f64(I, "decision_lag")?.unwrap_or(0.0),
        };
        rule.validate()
            .map_err(|e| Error::config(format!("{I}.{}", rule_key(&e)), e.to_string()))?;
        let grid = match t.raw(I, "boundary_grid") {
            None => default_boundary_grid(),
            Some(v) => parse_grid(&v)?,
        };
        Some(InterimSettings {
            rule,
            boundary_grid: grid,
        })
    } else {
        None
    };

    let milestone = if t.has_section("milestone") {
        const M: &str = "milestone";
        let times = Table::require(t.list(M, "times")?, M, "times")?;
        let transform = match t.raw(M, "transform") {
            None => MilestoneTransform::default(),
            Some(v) => MilestoneTransform::parse(&v).ok_or_else(|| {
                Error::config("milestone.transform", format!("unknown transform `{v}`"))
            })?,
        };
        Some(MilestoneSettings { times, transform })
    } else {
        None
    };

    t.finish()?;
    Ok(ScenarioFile {
        name,
        sample_size,
        mechanistic,
        design,
        interim,
        milestone,
    })
}

fn rule_key(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter {
            name: "boundary", ..
        } => "boundary",
        Error::InvalidParameter {
            name: "n_evaluable",
            ..
        } => "n_evaluable",
        Error::InvalidParameter {
            name: "assessment lag",
            ..
        } => "assessment_lag",
        _ => "decision_lag",
    }
}

/// `from:to:step` or an explicit list.
fn parse_grid(value: &str) -> Result<Vec<f64>> {
    let bad = |s: &str| Error::config("interim.boundary_grid", format!("`{s}` is not a number"));
    let parts: Vec<&str> = value.split(':').map(str::trim).collect();
    let grid = if parts.len() == 3 {
        let nums: Vec<f64> = parts
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| bad(s)))
            .collect::<Result<_>>()?;
        if !(nums[2] > 0.0 && nums[1] >= nums[0]) {
            return Err(Error::config(
                "interim.boundary_grid",
                "need from <= to and a positive step",
            ));
        }
        boundary_grid(nums[0], nums[1], nums[2])
    } else {
        value
            .split([',', ' '])
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| bad(s)))
            .collect::<Result<_>>()?
    };
    if grid.is_empty() || grid.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(Error::config(
            "interim.boundary_grid",
            "boundaries must be positive",
        ));
    }
    Ok(grid)
}
