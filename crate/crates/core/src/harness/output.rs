use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::decision::{Protocol, Verdict};
use crate::graph::NodeId;

use super::{AggregateRow, HarnessError, ScenarioResult, SweepOutcome};

/// One node of one repetition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRow {
    pub scenario_id: String,
    pub seed: u64,
    pub protocol: Protocol,
    pub node: NodeId,
    pub is_byzantine: bool,
    pub bytes_sent: u64,
    pub verdict: Option<Verdict>,
    pub confirmed: Option<bool>,
    pub messages_sent: u64,
    pub broadcast_bytes: u64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn write_raw_csv(path: &Path, rows: &[RawRow]) -> Result<(), HarnessError> {
    write_csv(path, rows)
}

pub fn read_raw_csv(path: &Path) -> Result<Vec<RawRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_aggregate_csv(path: &Path, rows: &[AggregateRow]) -> Result<(), HarnessError> {
    write_csv(path, rows)
}

fn file_stem(id: &str) -> String {
    id.chars().map(|c| if c.is_ascii_alphanumeric() || "-_.=".contains(c) { c } else { '_' }).collect()
}

/// Writes `<id>.raw.csv`, `<id>.agg.csv` and the `<id>.meta.json` sidecar
/// into `dir`; returns their paths.
pub fn write_scenario(dir: &Path, res: &ScenarioResult) -> Result<Vec<PathBuf>, HarnessError> {
    let stem = file_stem(&match res.aggregate.point.as_str() {
        "" => res.config.id.clone(),
        p => format!("{}.{p}", res.config.id),
    });
    let raw = dir.join(format!("{stem}.raw.csv"));
    let agg = dir.join(format!("{stem}.agg.csv"));
    let meta = dir.join(format!("{stem}.meta.json"));
    write_raw_csv(&raw, &res.raw)?;
    write_aggregate_csv(&agg, std::slice::from_ref(&res.aggregate))?;
    let sidecar = serde_json::json!({
        "config": res.config,
        "repetitions": res.reps,
    });
    fs::write(&meta, serde_json::to_string_pretty(&sidecar)?).map_err(io_err(&meta))?;
    Ok(vec![raw, agg, meta])
}

/// Writes every point's raw CSV and sidecar plus `<id>.sweep.csv` with one
/// aggregate row per successful point.
pub fn write_sweep(dir: &Path, id: &str, out: &SweepOutcome) -> Result<PathBuf, HarnessError> {
    for res in &out.results {
        write_scenario(dir, res)?;
    }
    let path = dir.join(format!("{}.sweep.csv", file_stem(id)));
    write_aggregate_csv(&path, &out.rows())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_rows_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            RawRow {
                scenario_id: "s".into(),
                seed: 1,
                protocol: Protocol::Nectar,
                node: 0,
                is_byzantine: false,
                bytes_sent: 10,
                verdict: Some(Verdict::Partitionable),
                confirmed: Some(true),
                messages_sent: 2,
                broadcast_bytes: 5,
            },
            RawRow {
                scenario_id: "s".into(),
                seed: 1,
                protocol: Protocol::Nectar,
                node: 1,
                is_byzantine: true,
                bytes_sent: 0,
                verdict: None,
                confirmed: None,
                messages_sent: 0,
                broadcast_bytes: 0,
            },
        ];
        let path = dir.path().join("x.csv");
        write_raw_csv(&path, &rows).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(
            "scenario_id,seed,protocol,node,is_byzantine,bytes_sent,verdict,confirmed,messages_sent,broadcast_bytes\n"
        ));
        assert!(text.contains("s,1,NECTAR,0,false,10,PARTITIONABLE,true,2,5"));
        assert_eq!(read_raw_csv(&path).unwrap(), rows);
    }

    #[test]
    fn stems_are_filesystem_safe() {
        assert_eq!(file_stem("bridge/mtg d=1,r=2.4"), "bridge_mtg_d=1_r=2.4");
    }
}
