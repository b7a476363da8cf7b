use std::fs;
use std::path::{Path, PathBuf};

use nectar_core::harness::{read_raw_csv, run_scenario, sweep, write_scenario, write_sweep, Grid, ScenarioConfig};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn small(name: &str) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::load(configs_dir().join(name)).unwrap();
    cfg.repetitions = 4;
    cfg
}

fn read(path: &Path) -> Vec<u8> {
    fs::read(path).unwrap()
}

#[test]
fn shipped_configs_and_grids_parse_and_validate() {
    let mut seen = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.ends_with(".grid.json") {
            Grid::load(&path).unwrap();
        } else if name.ends_with(".json") {
            ScenarioConfig::load(&path).unwrap().validate().unwrap();
        }
        seen += 1;
    }
    assert!(seen >= 8);
}

#[test]
fn same_config_writes_identical_files() {
    let cfg = small("bridge-mtgv2.json");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let pa = write_scenario(a.path(), &run_scenario(&cfg).unwrap()).unwrap();
    let pb = write_scenario(b.path(), &run_scenario(&cfg).unwrap()).unwrap();
    for (x, y) in pa.iter().zip(&pb) {
        assert_eq!(read(x), read(y), "{} differs", x.display());
    }
}

#[test]
fn raw_csv_has_one_row_per_node_and_repetition() {
    let cfg = small("bridge-nectar.json");
    let dir = tempfile::tempdir().unwrap();
    let res = run_scenario(&cfg).unwrap();
    let paths = write_scenario(dir.path(), &res).unwrap();
    let rows = read_raw_csv(&paths[0]).unwrap();
    assert_eq!(rows.len(), 4 * 35);
    assert_eq!(rows, res.raw);
    let byz = rows.iter().filter(|r| r.is_byzantine).count();
    assert_eq!(byz, 4);
    assert!(rows.iter().filter(|r| r.is_byzantine).all(|r| r.verdict.is_none()));

    let meta: serde_json::Value = serde_json::from_slice(&read(&paths[2])).unwrap();
    let back: ScenarioConfig = serde_json::from_value(meta["config"].clone()).unwrap();
    assert_eq!(back.id, cfg.id);
    assert_eq!(meta["repetitions"].as_array().unwrap().len(), 4);
}

#[test]
fn sweep_rows_match_standalone_runs() {
    let base = small("bridge-nectar.json");
    let grid = Grid::load(configs_dir().join("bridge.grid.json")).unwrap();
    let out = sweep(&base, &grid).unwrap();
    assert!(out.ok());
    let rows = out.rows();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.mean_success == Some(1.0)));
    assert_eq!(rows.iter().map(|r| r.t).collect::<Vec<_>>(), vec![1, 2, 3, 4]);

    let dir = tempfile::tempdir().unwrap();
    let path = write_sweep(dir.path(), &base.id, &out).unwrap();
    let text = fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn unknown_fields_are_rejected() {
    let err = ScenarioConfig::from_json(r#"{"protocol": "NECTAR", "topology": {"kind": "path", "n": 3}, "bogus": 1}"#)
        .unwrap_err();
    assert!(err.to_string().contains("bogus"), "{err}");
}
