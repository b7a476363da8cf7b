//! Byzantine-resilient network partition detection.
//!
//! [`nectar`] implements the detector, [`baselines`] the two gossip
//! comparators, [`adversary`] the Byzantine behaviors, [`simnet`] the
//! synchronous-round simulator and [`harness`] the scenario runner used by
//! the `nectar` command-line tool. [`graph`] holds topologies and the
//! ground-truth connectivity oracles.

pub mod adversary;
pub mod baselines;
pub mod crypto;
pub mod decision;
pub mod graph;
pub mod harness;
pub mod nectar;
pub mod scalar;
pub mod simnet;
pub mod stats;

pub use decision::{Decision, Protocol, Verdict};
pub use graph::{Graph, NodeId, NodeSet};

pub type DroneParams64 = graph::DroneParams<f64>;
pub type DroneParams32 = graph::DroneParams<f32>;
pub type Summary64 = stats::Summary<f64>;
