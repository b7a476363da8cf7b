use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{is_partitioned, vertex_connectivity_capped, Graph, NodeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NotPartitionable,
    Partitionable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NotPartitionable => "NOT_PARTITIONABLE",
            Verdict::Partitionable => "PARTITIONABLE",
        })
    }
}

/// A node's output. `confirmed` is only ever set alongside `Partitionable`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub confirmed: bool,
}

impl Decision {
    pub const NOT_PARTITIONABLE: Decision = Decision { verdict: Verdict::NotPartitionable, confirmed: false };

    pub fn partitionable(confirmed: bool) -> Self {
        Self { verdict: Verdict::Partitionable, confirmed }
    }

    /// Baseline outputs carry no confirmation.
    pub fn from_verdict(verdict: Verdict) -> Self {
        Self { verdict, confirmed: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Protocol {
    Nectar,
    Mtg,
    Mtgv2,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Nectar, Protocol::Mtg, Protocol::Mtgv2];
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Nectar => "NECTAR",
            Protocol::Mtg => "MTG",
            Protocol::Mtgv2 => "MTGV2",
        })
    }
}

/// The verdict every correct node is required to output, when the model
/// pins one down.
///
/// For NECTAR: a partitioned correct subgraph forces `Partitionable`; without
/// Byzantine nodes the verdict is exact (`κ > t`); `κ ≥ 2t` forces
/// `NotPartitionable`. Between `t` and `2t` with Byzantine nodes present
/// either verdict is allowed and `None` is returned.
///
/// The baselines only claim to detect actual partitions of the correct
/// nodes.
pub fn expected_verdict(protocol: Protocol, g: &Graph, byzantine: &NodeSet, t: usize) -> Option<Verdict> {
    let correct_partitioned = is_partitioned(&g.without(byzantine).0);
    if correct_partitioned {
        return Some(Verdict::Partitionable);
    }
    match protocol {
        Protocol::Mtg | Protocol::Mtgv2 => Some(Verdict::NotPartitionable),
        Protocol::Nectar => {
            if g.n() <= 1 {
                return Some(Verdict::NotPartitionable);
            }
            let kappa = vertex_connectivity_capped(g, 2 * t.max(1));
            if byzantine.is_empty() {
                Some(if kappa > t { Verdict::NotPartitionable } else { Verdict::Partitionable })
            } else if kappa >= 2 * t {
                Some(Verdict::NotPartitionable)
            } else {
                None
            }
        }
    }
}
