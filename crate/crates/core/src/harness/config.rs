use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::Strategy;
use crate::baselines::BloomParams;
use crate::crypto::{SchemeKind, DEFAULT_SIG_LEN};
use crate::decision::Protocol;
use crate::graph::{
    complete, cycle, gen_bridge_attack, gen_drone, gen_split_sides, gen_topology, gnp_connected, path, read_graph,
    star, DroneParams, Graph, GraphError, NodeId, NodeSet, TopologyKind,
};

use super::HarnessError;

/// Invalid configuration, located by a dotted field path.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{path}: {msg}")]
pub struct ConfigError {
    pub path: String,
    pub msg: String,
}

fn bad(path: impl Into<String>, msg: impl Into<String>) -> ConfigError {
    ConfigError { path: path.into(), msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TopologySpec {
    KRegular {
        n: usize,
        k: usize,
    },
    KPastedTree {
        n: usize,
        k: usize,
    },
    KDiamond {
        n: usize,
        k: usize,
    },
    GeneralizedWheel {
        n: usize,
        k: usize,
    },
    MultipartiteWheel {
        n: usize,
        k: usize,
    },
    Drone {
        n: usize,
        d: f64,
        radius: f64,
    },
    /// Two correct sides connected only through the Byzantine nodes.
    Bridge {
        n1: usize,
        n2: usize,
        byz: usize,
        #[serde(default = "default_density")]
        density: f64,
    },
    /// Two disconnected correct sides with Byzantine nodes dealt into them.
    SplitSides {
        n1: usize,
        n2: usize,
        byz: usize,
        #[serde(default = "default_density")]
        density: f64,
    },
    Complete {
        n: usize,
    },
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Star {
        n: usize,
    },
    Gnp {
        n: usize,
        p: f64,
    },
    File {
        path: PathBuf,
    },
}

fn default_density() -> f64 {
    0.3
}

impl TopologySpec {
    /// Node count, when known without reading a file.
    pub fn nodes(&self) -> Option<usize> {
        use TopologySpec::*;
        match *self {
            KRegular { n, .. }
            | KPastedTree { n, .. }
            | KDiamond { n, .. }
            | GeneralizedWheel { n, .. }
            | MultipartiteWheel { n, .. }
            | Drone { n, .. }
            | Complete { n }
            | Path { n }
            | Cycle { n }
            | Star { n }
            | Gnp { n, .. } => Some(n),
            Bridge { n1, n2, byz, .. } | SplitSides { n1, n2, byz, .. } => Some(n1 + n2 + byz),
            File { .. } => None,
        }
    }

    pub fn has_construction(&self) -> bool {
        matches!(self, TopologySpec::Bridge { .. } | TopologySpec::SplitSides { .. })
    }

    /// The graph for one repetition, and the Byzantine set when the family
    /// prescribes one. Relative file paths resolve against `base`.
    pub fn generate(&self, seed: u64, base: Option<&Path>) -> Result<(Graph, Option<NodeSet>), GraphError> {
        use TopologySpec::*;
        let family = |kind, n, k| gen_topology(kind, n, k, seed).map(|g| (g, None));
        match self {
            KRegular { n, k } => family(TopologyKind::KRegular, *n, *k),
            KPastedTree { n, k } => family(TopologyKind::KPastedTree, *n, *k),
            KDiamond { n, k } => family(TopologyKind::KDiamond, *n, *k),
            GeneralizedWheel { n, k } => family(TopologyKind::GeneralizedWheel, *n, *k),
            MultipartiteWheel { n, k } => family(TopologyKind::MultipartiteWheel, *n, *k),
            Drone { n, d, radius } => {
                gen_drone(&DroneParams { n: *n, d: *d, radius: *radius, seed }).map(|g| (g, None))
            }
            Bridge { n1, n2, byz, density } => {
                gen_bridge_attack(*n1, *n2, *byz, *density, seed).map(|(g, b)| (g, Some(b)))
            }
            SplitSides { n1, n2, byz, density } => {
                gen_split_sides(*n1, *n2, *byz, *density, seed).map(|(g, b)| (g, Some(b)))
            }
            Complete { n } => Ok((complete(*n), None)),
            Path { n } => Ok((path(*n), None)),
            Cycle { n } => Ok((cycle(*n), None)),
            Star { n } => Ok((star(*n), None)),
            Gnp { n, p } => {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                gnp_connected(*n, *p, &mut rng).map(|g| (g, None))
            }
            File { path } => {
                let resolved = match base {
                    Some(b) if path.is_relative() => b.join(path),
                    _ => path.clone(),
                };
                read_graph(resolved).map(|g| (g, None))
            }
        }
    }
}

/// Where the Byzantine nodes sit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "placement", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Placement {
    #[default]
    None,
    Explicit {
        nodes: NodeSet,
    },
    /// `count` nodes drawn uniformly per repetition.
    Random {
        count: usize,
    },
    /// The set prescribed by a bridge or split-sides topology.
    Construction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BloomConfig {
    pub m: usize,
    pub h: usize,
}

impl Default for BloomConfig {
    fn default() -> Self {
        let p = BloomParams::default();
        Self { m: p.m, h: p.h }
    }
}

/// One experiment: a protocol on a topology family, repeated with seeds
/// `seed, seed + 1, ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_id")]
    pub id: String,
    pub protocol: Protocol,
    pub topology: TopologySpec,
    #[serde(default)]
    pub t: usize,
    #[serde(default)]
    pub byzantine: Placement,
    /// Strategy of every Byzantine node without an entry in `strategies`.
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    #[serde(default)]
    pub strategies: BTreeMap<NodeId, Strategy>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_sig_len")]
    pub sig_len: usize,
    #[serde(default)]
    pub scheme: SchemeKind,
    #[serde(default)]
    pub bloom: BloomConfig,
    /// Baseline epoch in rounds; `n − 1` when unset. NECTAR always runs
    /// `n − 1` rounds.
    #[serde(default)]
    pub epoch_len: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Directory that relative paths in the config resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_id() -> String {
    "scenario".into()
}

fn default_strategy() -> Strategy {
    Strategy::Silent
}

fn default_repetitions() -> usize {
    50
}

fn default_sig_len() -> usize {
    DEFAULT_SIG_LEN
}

impl ScenarioConfig {
    pub fn new(protocol: Protocol, topology: TopologySpec) -> Self {
        serde_json::from_value(serde_json::json!({ "protocol": protocol, "topology": topology }))
            .expect("minimal config deserializes")
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_value(value)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file; relative paths inside it resolve
    /// against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.into(), source })?;
        let mut cfg = Self::from_json(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn bloom_params(&self, key: u64) -> BloomParams {
        BloomParams { m: self.bloom.m, h: self.bloom.h, key }
    }

    pub fn strategy_for(&self, node: NodeId) -> &Strategy {
        self.strategies.get(&node).unwrap_or(&self.strategy)
    }

    /// Number of Byzantine nodes per repetition, when fixed by the config.
    pub fn byzantine_count(&self) -> Option<usize> {
        match (&self.byzantine, &self.topology) {
            (Placement::None, _) => Some(0),
            (Placement::Explicit { nodes }, _) => Some(nodes.len()),
            (Placement::Random { count }, _) => Some(*count),
            (Placement::Construction, TopologySpec::Bridge { byz, .. } | TopologySpec::SplitSides { byz, .. }) => {
                Some(*byz)
            }
            (Placement::Construction, _) => None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.id.is_empty() {
            return Err(bad("id", "must not be empty"));
        }
        if self.repetitions == 0 {
            return Err(bad("repetitions", "must be at least 1"));
        }
        if self.sig_len == 0 {
            return Err(bad("sig_len", "must be at least 1"));
        }
        if self.bloom.m == 0 {
            return Err(bad("bloom.m", "must be at least 1"));
        }
        if self.bloom.h == 0 {
            return Err(bad("bloom.h", "must be at least 1"));
        }
        if self.epoch_len == Some(0) {
            return Err(bad("epoch_len", "must be at least 1"));
        }
        self.validate_topology()?;
        let n = self.topology.nodes();
        match &self.byzantine {
            Placement::Construction if !self.topology.has_construction() => {
                return Err(bad(
                    "byzantine.placement",
                    "construction placement needs a bridge or split-sides topology",
                ));
            }
            Placement::Explicit { nodes } => {
                if let (Some(n), Some(max)) = (n, nodes.max()) {
                    if max >= n {
                        return Err(bad("byzantine.nodes", format!("node {max} is outside 0..{n}")));
                    }
                }
            }
            Placement::Random { count } => {
                if let Some(n) = n {
                    if *count >= n {
                        return Err(bad(
                            "byzantine.count",
                            format!("{count} Byzantine nodes leave no correct node among {n}"),
                        ));
                    }
                }
            }
            _ => {}
        }
        if self.protocol == Protocol::Nectar {
            if let Some(b) = self.byzantine_count() {
                if b > self.t {
                    return Err(bad("t", format!("{b} Byzantine nodes exceed t = {}", self.t)));
                }
            }
        }
        let kind = self.strategy.kind();
        if !kind.applies_to(self.protocol) {
            return Err(bad("strategy.kind", format!("{kind:?} does not apply to {}", self.protocol)));
        }
        for (node, s) in &self.strategies {
            if !s.kind().applies_to(self.protocol) {
                return Err(bad(
                    format!("strategies.{node}.kind"),
                    format!("{:?} does not apply to {}", s.kind(), self.protocol),
                ));
            }
            if let Placement::Explicit { nodes } = &self.byzantine {
                if !nodes.contains(*node) {
                    return Err(bad(format!("strategies.{node}"), "node is not in the Byzantine placement"));
                }
            }
        }
        Ok(())
    }

    fn validate_topology(&self) -> Result<(), ConfigError> {
        use TopologySpec::*;
        match &self.topology {
            Drone { n, d, radius } => DroneParams { n: *n, d: *d, radius: *radius, seed: 0 }
                .validate()
                .map_err(|e| bad("topology", e.to_string())),
            Bridge { n1, n2, byz, density } | SplitSides { n1, n2, byz, density } => {
                if *n1 == 0 {
                    return Err(bad("topology.n1", "must be at least 1"));
                }
                if *n2 == 0 {
                    return Err(bad("topology.n2", "must be at least 1"));
                }
                if *byz == 0 {
                    return Err(bad("topology.byz", "must be at least 1"));
                }
                if !(0.0..=1.0).contains(density) {
                    return Err(bad("topology.density", "must lie in [0, 1]"));
                }
                Ok(())
            }
            Gnp { p, .. } if !(0.0..=1.0).contains(p) => Err(bad("topology.p", "must lie in [0, 1]")),
            other => match other.nodes() {
                Some(0) => Err(bad("topology.n", "must be at least 1")),
                _ => Ok(()),
            },
        }
    }
}
