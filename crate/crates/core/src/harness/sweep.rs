use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;

use super::runner::run_point;
use super::{AggregateRow, ConfigError, HarnessError, ScenarioConfig, ScenarioResult};

/// Sweep grid: explicit override `points`, crossed with the cartesian
/// product of `axes`. Keys are dotted paths into the scenario config, e.g.
/// `"topology.d"`; a value replaces whatever sits at its path.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default)]
    pub points: Vec<BTreeMap<String, Value>>,
    #[serde(default)]
    pub axes: BTreeMap<String, Vec<Value>>,
}

impl Grid {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub label: String,
    pub overrides: Vec<(String, Value)>,
}

fn grid_error(msg: impl Into<String>) -> HarnessError {
    ConfigError { path: "grid".into(), msg: msg.into() }.into()
}

/// All grid points, points-major then axes in key order.
pub fn expand_grid(grid: &Grid) -> Result<Vec<GridPoint>, HarnessError> {
    if grid.points.is_empty() && grid.axes.is_empty() {
        return Err(grid_error("grid has no points and no axes"));
    }
    if let Some((k, _)) = grid.axes.iter().find(|(_, vals)| vals.is_empty()) {
        return Err(grid_error(format!("axis {k} has no values")));
    }
    let bases: Vec<Vec<(String, Value)>> = if grid.points.is_empty() {
        vec![vec![]]
    } else {
        grid.points.iter().map(|p| p.iter().map(|(k, v)| (k.clone(), v.clone())).collect()).collect()
    };
    let mut combos = bases;
    for (path, values) in &grid.axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.push((path.clone(), v.clone()));
                    c
                })
            })
            .collect();
    }
    Ok(combos
        .into_iter()
        .map(|overrides| {
            let label = overrides.iter().map(|(k, v)| format!("{k}={}", compact(v))).collect::<Vec<_>>().join(",");
            GridPoint { label, overrides }
        })
        .collect())
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Copy of `base` with each dotted path replaced.
pub fn apply_overrides(base: &Value, overrides: &[(String, Value)]) -> Result<Value, HarnessError> {
    let mut out = base.clone();
    for (path, value) in overrides {
        let mut cur = &mut out;
        let mut segments = path.split('.').peekable();
        while let Some(seg) = segments.next() {
            let Value::Object(map) = cur else {
                return Err(ConfigError {
                    path: path.clone(),
                    msg: format!("cannot descend into non-object at {seg}"),
                }
                .into());
            };
            if segments.peek().is_none() {
                map.insert(seg.to_string(), value.clone());
                break;
            }
            cur = map.entry(seg.to_string()).or_insert_with(|| Value::Object(Default::default()));
        }
    }
    Ok(out)
}

#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub results: Vec<ScenarioResult>,
    /// Points that failed, with their error.
    pub failures: Vec<(String, String)>,
}

impl SweepOutcome {
    pub fn rows(&self) -> Vec<AggregateRow> {
        self.results.iter().map(|r| r.aggregate.clone()).collect()
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs one scenario per grid point. A failing point is recorded and the
/// sweep continues.
pub fn sweep(base: &ScenarioConfig, grid: &Grid) -> Result<SweepOutcome, HarnessError> {
    let points = expand_grid(grid)?;
    let base_value = serde_json::to_value(base)?;
    let mut out = SweepOutcome::default();
    for p in points {
        let attempt =
            apply_overrides(&base_value, &p.overrides).and_then(ScenarioConfig::from_value).and_then(|mut cfg| {
                cfg.base_dir = base.base_dir.clone();
                run_point(&cfg, &p.label)
            });
        match attempt {
            Ok(res) => out.results.push(res),
            Err(e) => out.failures.push((p.label, e.to_string())),
        }
    }
    Ok(out)
}
