//! Scenario configuration, repeated runs, sweeps and CSV/JSON output.

mod config;
mod output;
mod runner;
mod sweep;

use std::path::PathBuf;

use thiserror::Error;

use crate::adversary::AdversaryError;
use crate::graph::{GraphError, NodeId};
use crate::simnet::SimError;

pub use config::{BloomConfig, ConfigError, Placement, ScenarioConfig, TopologySpec};
pub use output::{read_raw_csv, write_aggregate_csv, write_raw_csv, write_scenario, write_sweep, RawRow};
pub use runner::{
    place_byzantine, run_repetition, run_scenario, simulate, worker_count, AggregateRow, RepSummary, ScenarioResult,
    SimOptions, WORKERS_ENV,
};
pub use sweep::{apply_overrides, expand_grid, sweep, Grid, GridPoint, SweepOutcome};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("topology: {0}")]
    Graph(#[from] GraphError),
    #[error("Byzantine node {node}: {source}")]
    Adversary {
        node: NodeId,
        #[source]
        source: AdversaryError,
    },
    #[error("simulation: {0}")]
    Sim(#[from] SimError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("repetition with seed {seed}: {source}")]
    Repetition {
        seed: u64,
        #[source]
        source: Box<HarnessError>,
    },
}
