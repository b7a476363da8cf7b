//! Byzantine behaviors, as drop-in simulator nodes.
//!
//! Byzantine nodes may coordinate out of band: they share one
//! [`Coordinator`] holding all of their key pairs, and nothing else. A
//! correct node's secret key is never reachable from adversary code.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{BloomFilter, BloomParams, MtgState, Mtgv2State, SignedIds};
use crate::crypto::{make_proof, ChainedMessage, Edge, KeyDirectory, KeyPair, NeighborhoodProof};
use crate::decision::{Decision, Protocol};
use crate::graph::{Graph, NodeId, NodeSet};
use crate::nectar::{InitError, NectarConfig, NectarState};
use crate::simnet::{NodeError, Outgoing, SimNode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StrategyKind {
    Silent,
    CorrectFacade,
    OneSided,
    AllOnesFilter,
    WithholdOwnEdges,
    FakeByzEdges,
    StaleChainInject,
}

impl StrategyKind {
    pub fn applies_to(self, protocol: Protocol) -> bool {
        use StrategyKind::*;
        match protocol {
            Protocol::Nectar => self != AllOnesFilter,
            Protocol::Mtg => matches!(self, Silent | CorrectFacade | OneSided | AllOnesFilter),
            Protocol::Mtgv2 => matches!(self, Silent | CorrectFacade | OneSided),
        }
    }
}

/// A Byzantine behavior with its parameters. Unset parameters are resolved
/// from the scenario when the node is built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    /// Never sends anything.
    Silent,
    /// Follows the protocol exactly.
    CorrectFacade,
    /// Follows the protocol but only sends to `favored` nodes and to other
    /// Byzantine nodes. Defaults to the correct component holding the lowest
    /// correct ID.
    OneSided {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        favored: Option<NodeSet>,
    },
    /// Sends a saturated Bloom filter to every neighbor each round.
    AllOnesFilter,
    /// Never announces its own edges; relays other edges normally.
    WithholdOwnEdges,
    /// Announces valid proofs of nonexistent edges to the given Byzantine
    /// peers (default: all other Byzantine nodes).
    FakeByzEdges {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        peers: Option<NodeSet>,
    },
    /// Behaves correctly and also re-sends chains from earlier rounds and
    /// sends chains one link longer than the round allows.
    StaleChainInject,
}

impl Strategy {
    pub fn kind(&self) -> StrategyKind {
        match self {
            Strategy::Silent => StrategyKind::Silent,
            Strategy::CorrectFacade => StrategyKind::CorrectFacade,
            Strategy::OneSided { .. } => StrategyKind::OneSided,
            Strategy::AllOnesFilter => StrategyKind::AllOnesFilter,
            Strategy::WithholdOwnEdges => StrategyKind::WithholdOwnEdges,
            Strategy::FakeByzEdges { .. } => StrategyKind::FakeByzEdges,
            Strategy::StaleChainInject => StrategyKind::StaleChainInject,
        }
    }

    pub fn default_for(kind: StrategyKind) -> Self {
        match kind {
            StrategyKind::Silent => Strategy::Silent,
            StrategyKind::CorrectFacade => Strategy::CorrectFacade,
            StrategyKind::OneSided => Strategy::OneSided { favored: None },
            StrategyKind::AllOnesFilter => Strategy::AllOnesFilter,
            StrategyKind::WithholdOwnEdges => Strategy::WithholdOwnEdges,
            StrategyKind::FakeByzEdges => Strategy::FakeByzEdges { peers: None },
            StrategyKind::StaleChainInject => Strategy::StaleChainInject,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub kind: StrategyKind,
    pub protocols: Vec<Protocol>,
    pub doc: &'static str,
}

/// Every supported strategy kind, with the protocols it applies to.
pub fn strategy_catalog() -> Vec<CatalogEntry> {
    use StrategyKind::*;
    [
        (Silent, "sends nothing; crash-equivalent"),
        (CorrectFacade, "follows the protocol exactly"),
        (OneSided, "behaves correctly toward a favored side, as crashed toward the rest"),
        (AllOnesFilter, "floods saturated Bloom filters (MtG only)"),
        (WithholdOwnEdges, "never announces its own edges"),
        (FakeByzEdges, "announces signed proofs of fictitious edges between Byzantine nodes"),
        (StaleChainInject, "injects chains whose length does not match the round"),
    ]
    .into_iter()
    .map(|(kind, doc)| CatalogEntry {
        kind,
        protocols: Protocol::ALL.into_iter().filter(|&p| kind.applies_to(p)).collect(),
        doc,
    })
    .collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AdversaryError {
    #[error("strategy {kind:?} does not apply to {protocol}")]
    Inapplicable { protocol: Protocol, kind: StrategyKind },
    #[error("node {0} is not in the Byzantine set")]
    NotByzantine(NodeId),
    #[error("fake-edge peer {0} is not Byzantine")]
    PeerNotByzantine(NodeId),
    #[error("favored node {node} is outside 0..{n}")]
    FavoredRange { node: NodeId, n: usize },
    #[error(transparent)]
    Init(#[from] InitError),
}

/// Out-of-band state shared by all Byzantine nodes of a run.
#[derive(Debug)]
pub struct Coordinator {
    keys: BTreeMap<NodeId, KeyPair>,
}

impl Coordinator {
    /// Collects the Byzantine key pairs. Keys of other nodes are not kept.
    pub fn new(all_keys: &[KeyPair], byzantine: &NodeSet) -> Self {
        Self { keys: byzantine.iter().filter_map(|b| all_keys.get(b).map(|k| (b, k.clone()))).collect() }
    }

    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.keys.keys().copied()
    }

    pub fn key(&self, node: NodeId) -> Option<&KeyPair> {
        self.keys.get(&node)
    }
}

/// Everything an adversary may know when it is built.
#[derive(Clone, Debug)]
pub struct AdversaryContext<'a> {
    pub graph: &'a Graph,
    pub byzantine: &'a NodeSet,
    pub t: usize,
    pub dir: Arc<KeyDirectory>,
    pub coord: Arc<Coordinator>,
    /// Proofs of this node's own edges, by neighbor.
    pub proofs: &'a BTreeMap<NodeId, Arc<NeighborhoodProof>>,
    pub bloom: BloomParams,
    pub epoch_len: Option<usize>,
}

/// A simulator node of any protocol.
pub enum AnyNode {
    Nectar(Box<dyn SimNode<ChainedMessage>>),
    Mtg(Box<dyn SimNode<BloomFilter>>),
    Mtgv2(Box<dyn SimNode<SignedIds>>),
}

impl AnyNode {
    pub fn protocol(&self) -> Protocol {
        match self {
            AnyNode::Nectar(_) => Protocol::Nectar,
            AnyNode::Mtg(_) => Protocol::Mtg,
            AnyNode::Mtgv2(_) => Protocol::Mtgv2,
        }
    }
}

/// The correct component containing the lowest correct ID.
pub fn default_favored(g: &Graph, byzantine: &NodeSet) -> NodeSet {
    let (rest, ids) = g.without(byzantine);
    if rest.n() == 0 {
        return NodeSet::new();
    }
    crate::graph::reachable_component(&rest, 0).iter().map(|i| ids[i]).collect()
}

/// Builds Byzantine node `id` running `strategy` for `protocol`.
pub fn make_adversary(
    protocol: Protocol,
    strategy: &Strategy,
    key: KeyPair,
    ctx: &AdversaryContext<'_>,
) -> Result<AnyNode, AdversaryError> {
    let kind = strategy.kind();
    if !kind.applies_to(protocol) {
        return Err(AdversaryError::Inapplicable { protocol, kind });
    }
    let id = key.node();
    if !ctx.byzantine.contains(id) {
        return Err(AdversaryError::NotByzantine(id));
    }
    let g = ctx.graph;
    let n = g.n();
    let allowed = match strategy {
        Strategy::OneSided { favored } => {
            let favored = favored.clone().unwrap_or_else(|| default_favored(g, ctx.byzantine));
            if let Some(node) = favored.iter().find(|&v| v >= n) {
                return Err(AdversaryError::FavoredRange { node, n });
            }
            Some(favored.iter().chain(ctx.byzantine.iter()).collect::<NodeSet>())
        }
        _ => None,
    };
    let silent = kind == StrategyKind::Silent;
    Ok(match protocol {
        Protocol::Mtg => {
            let inner = MtgState::new(id, n, g.neighbors(id), ctx.bloom, ctx.epoch_len);
            if kind == StrategyKind::AllOnesFilter {
                AnyNode::Mtg(Box::new(AllOnes {
                    neighbors: g.neighbors(id).to_vec(),
                    filter: BloomFilter::all_ones(ctx.bloom),
                }))
            } else {
                AnyNode::Mtg(Box::new(Shield { inner, allowed, silent }))
            }
        }
        Protocol::Mtgv2 => {
            let inner = Mtgv2State::new(&key, n, g.neighbors(id), Arc::clone(&ctx.dir), ctx.epoch_len);
            AnyNode::Mtgv2(Box::new(Shield { inner, allowed, silent }))
        }
        Protocol::Nectar => {
            let inner = NectarState::init(NectarConfig { n, t: ctx.t, id }, key, Arc::clone(&ctx.dir), ctx.proofs)?;
            match strategy {
                Strategy::FakeByzEdges { peers } => {
                    let peers = peers.clone().unwrap_or_else(|| ctx.byzantine.clone());
                    if let Some(p) = peers.iter().find(|&p| !ctx.byzantine.contains(p)) {
                        return Err(AdversaryError::PeerNotByzantine(p));
                    }
                    let me = ctx.coord.key(id).ok_or(AdversaryError::NotByzantine(id))?;
                    let fakes = peers
                        .iter()
                        .filter(|&p| p != id && !g.has_edge(id, p))
                        .filter_map(|p| ctx.coord.key(p))
                        .map(|pk| Arc::new(make_proof(me, pk).expect("distinct peers")))
                        .collect();
                    AnyNode::Nectar(Box::new(NectarAdversary::new(inner, Mode::Fake(fakes), Arc::clone(&ctx.coord))))
                }
                Strategy::WithholdOwnEdges => {
                    AnyNode::Nectar(Box::new(NectarAdversary::new(inner, Mode::Withhold, Arc::clone(&ctx.coord))))
                }
                Strategy::StaleChainInject => {
                    AnyNode::Nectar(Box::new(NectarAdversary::new(inner, Mode::Inject, Arc::clone(&ctx.coord))))
                }
                _ => AnyNode::Nectar(Box::new(Shield { inner, allowed, silent })),
            }
        }
    })
}

/// Runs a correct state machine but filters or suppresses what it sends.
struct Shield<N> {
    inner: N,
    allowed: Option<NodeSet>,
    silent: bool,
}

impl<M, N: SimNode<M>> SimNode<M> for Shield<N> {
    fn send(&mut self, round: usize) -> Result<Vec<Outgoing<M>>, NodeError> {
        let out = self.inner.send(round)?;
        if self.silent {
            return Ok(vec![]);
        }
        let Some(allowed) = &self.allowed else {
            return Ok(out);
        };
        Ok(out
            .into_iter()
            .filter_map(|mut o| {
                o.dests.retain(|&d| allowed.contains(d));
                (!o.dests.is_empty()).then_some(o)
            })
            .collect())
    }

    fn receive(&mut self, round: usize, from: NodeId, msg: &M) -> Result<(), NodeError> {
        if self.silent {
            return Ok(());
        }
        self.inner.receive(round, from, msg)
    }

    fn decide(&mut self) -> Result<Option<Decision>, NodeError> {
        Ok(None)
    }

    fn is_byzantine(&self) -> bool {
        true
    }
}

struct AllOnes {
    neighbors: Vec<NodeId>,
    filter: BloomFilter,
}

impl SimNode<BloomFilter> for AllOnes {
    fn send(&mut self, _round: usize) -> Result<Vec<Outgoing<BloomFilter>>, NodeError> {
        if self.neighbors.is_empty() {
            return Ok(vec![]);
        }
        Ok(vec![Outgoing::new(self.neighbors.clone(), self.filter.clone())])
    }

    fn receive(&mut self, _: usize, _: NodeId, _: &BloomFilter) -> Result<(), NodeError> {
        Ok(())
    }

    fn decide(&mut self) -> Result<Option<Decision>, NodeError> {
        Ok(None)
    }

    fn is_byzantine(&self) -> bool {
        true
    }
}

enum Mode {
    Withhold,
    Fake(Vec<Arc<NeighborhoodProof>>),
    Inject,
}

/// NECTAR adversaries that alter message content rather than recipients.
struct NectarAdversary {
    inner: NectarState,
    mode: Mode,
    coord: Arc<Coordinator>,
    /// Chains emitted in the previous round, for stale replays.
    last_sent: Vec<Outgoing<ChainedMessage>>,
}

impl NectarAdversary {
    fn new(inner: NectarState, mode: Mode, coord: Arc<Coordinator>) -> Self {
        Self { inner, mode, coord, last_sent: Vec::new() }
    }

    /// Chains one link longer than `round` allows: a pending relay signed by
    /// an accomplice and then by this node.
    fn early_chains(&self) -> Vec<ChainedMessage> {
        let me = self.inner.key();
        self.inner
            .pending()
            .iter()
            .filter_map(|(msg, _)| {
                let used: BTreeSet<NodeId> = msg.signers().collect();
                let accomplice = self.coord.members().find(|&b| b != me.node() && !used.contains(&b))?;
                msg.extend(self.coord.key(accomplice)?).ok()?.extend(me).ok()
            })
            .collect()
    }
}

impl SimNode<ChainedMessage> for NectarAdversary {
    fn send(&mut self, round: usize) -> Result<Vec<Outgoing<ChainedMessage>>, NodeError> {
        let early = match self.mode {
            Mode::Inject => self.early_chains(),
            _ => vec![],
        };
        let mut out = self.inner.round_outgoing(round)?;
        let id = self.inner.id();
        let all: Vec<NodeId> = self.inner.neighbors().to_vec();
        match &self.mode {
            Mode::Withhold => {
                out.retain(|o| {
                    let (u, v) = o.msg.edge();
                    u != id && v != id
                });
            }
            Mode::Fake(fakes) if round == 1 && !all.is_empty() => {
                for p in fakes {
                    out.push(Outgoing::new(all.clone(), ChainedMessage::originate(Arc::clone(p), self.inner.key())));
                }
            }
            Mode::Inject => {
                let stale = std::mem::replace(&mut self.last_sent, out.clone());
                if !all.is_empty() {
                    out.extend(stale.into_iter().map(|o| Outgoing::new(all.clone(), o.msg)));
                    out.extend(early.into_iter().map(|m| Outgoing::new(all.clone(), m)));
                }
            }
            Mode::Fake(_) => {}
        }
        Ok(out)
    }

    fn receive(&mut self, round: usize, from: NodeId, msg: &ChainedMessage) -> Result<(), NodeError> {
        self.inner.on_receive(msg, from, round);
        Ok(())
    }

    fn decide(&mut self) -> Result<Option<Decision>, NodeError> {
        Ok(None)
    }

    fn is_byzantine(&self) -> bool {
        true
    }

    fn discovered(&self) -> Option<BTreeSet<Edge>> {
        None
    }
}
