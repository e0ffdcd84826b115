use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use curesim::config::{load_scenario, ModelChoice, ScenarioFile};
use curesim::design::PowerPoint;
use curesim::interim::BoundaryOc;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Common, Format, Output};

/// Shortest representation that parses back to the same value.
pub fn fmt(x: f64) -> String {
    format!("{x}")
}

pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Rows as JSON objects, numbers kept numeric where they parse.
    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(h, v)| {
                        let value = match v.parse::<f64>() {
                            Ok(x) if x.is_finite() => json!(x),
                            Ok(_) => Value::Null,
                            Err(_) => json!(v),
                        };
                        (h.to_string(), value)
                    })
                    .collect::<serde_json::Map<_, _>>();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

pub fn power_table(points: &[PowerPoint]) -> Table {
    let mut t = Table::new(&[
        "d",
        "power",
        "mc_se",
        "t25",
        "t50",
        "t75",
        "under_evented_frac",
    ]);
    for p in points {
        t.row(vec![
            p.events.to_string(),
            fmt(p.power),
            fmt(p.mc_se),
            fmt(p.time.q25),
            fmt(p.time.median),
            fmt(p.time.q75),
            fmt(p.under_evented_fraction),
        ]);
    }
    t
}

pub fn oc_table(entries: &[BoundaryOc]) -> Table {
    let mut t = Table::new(&[
        "x_star",
        "p_stop_alt",
        "p_continue_null",
        "p_stop_null",
        "overall_power",
        "mc_se_alt",
        "mc_se_null",
        "mc_se_overall_power",
    ]);
    for e in entries {
        t.row(vec![
            fmt(e.boundary),
            fmt(e.p_stop_alt),
            fmt(e.p_continue_null),
            fmt(e.p_stop_null),
            fmt(e.overall_power),
            fmt(e.mc_se_alt),
            fmt(e.mc_se_null),
            fmt(e.mc_se_overall_power),
        ]);
    }
    t
}

/// Accepts a scenario file, or a JSON result whose `scenario_file` field
/// holds the scenario it was run with.
pub fn read_scenario(text: &str) -> Result<ScenarioFile> {
    if text.trim_start().starts_with('{') {
        let value: Value = serde_json::from_str(text).context("parsing JSON scenario")?;
        if let Some(embedded) = value.get("scenario_file") {
            return serde_json::from_value(embedded.clone())
                .context("reading `scenario_file` from JSON result");
        }
    }
    Ok(load_scenario(text)?)
}

/// Writes a simulation result; JSON output embeds the full scenario and
/// run settings so the run can be repeated from the file alone.
pub fn emit(
    name: &str,
    common: &Common,
    file: &ScenarioFile,
    model: ModelChoice,
    table: Table,
    result: &impl Serialize,
) -> Result<()> {
    let envelope = json!({
        "command": name,
        "seed": common.seed,
        "trials": common.trials,
        "model": model,
        "scenario_file": file,
        "result": result,
    });
    write(name, &common.output, table, &envelope)
}

pub fn write(name: &str, output: &Output, table: Table, json: &impl Serialize) -> Result<()> {
    fs::create_dir_all(&output.out)
        .with_context(|| format!("creating {}", output.out.display()))?;
    let path: PathBuf = match output.format {
        Format::Csv => {
            let path = output.out.join(format!("{name}.csv"));
            let mut w = csv::Writer::from_path(&path)
                .with_context(|| format!("writing {}", path.display()))?;
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
            path
        }
        Format::Json => {
            let path = output.out.join(format!("{name}.json"));
            let text = serde_json::to_string_pretty(json)?;
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            path
        }
    };
    println!("wrote {}", path.display());
    Ok(())
}
