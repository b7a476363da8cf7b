//! The NECTAR node: n − 1 rounds of signed edge propagation followed by a
//! connectivity decision over the discovered graph.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::crypto::{verify_chain, verify_proof, ChainedMessage, Edge, KeyDirectory, KeyPair, NeighborhoodProof};
use crate::decision::Decision;
use crate::graph::{reachable_component, vertex_connectivity_capped, Graph, NodeId};
use crate::simnet::{NodeError, Outgoing, Payload, SimNode, Transcript};

impl Payload for ChainedMessage {
    fn wire_len(&self, sig_len: usize) -> usize {
        ChainedMessage::wire_len(self, sig_len)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InitError {
    #[error("node {node} is outside 0..{n}")]
    NodeRange { node: NodeId, n: usize },
    #[error("key pair belongs to node {key}, not {node}")]
    KeyMismatch { node: NodeId, key: NodeId },
    #[error("neighbor {0} has no neighborhood proof")]
    MissingProof(NodeId),
    #[error("proof supplied for {0}, which is not a neighbor")]
    UnexpectedProof(NodeId),
    #[error("proof for neighbor {neighbor} names edge {edge:?}")]
    WrongEdge { neighbor: NodeId, edge: Edge },
    #[error("proof for neighbor {0} does not verify")]
    InvalidProof(NodeId),
    #[error("key directory covers {got} nodes, expected {n}")]
    Directory { n: usize, got: usize },
}

/// Static inputs of a node.
#[derive(Clone, Debug)]
pub struct NectarConfig {
    pub n: usize,
    pub t: usize,
    pub id: NodeId,
}

/// Per-node protocol state.
#[derive(Debug)]
pub struct NectarState {
    cfg: NectarConfig,
    neighbors: Vec<NodeId>,
    key: KeyPair,
    dir: Arc<KeyDirectory>,
    /// Flat `n × n` matrix; an edge is stored once at `u * n + v`, `u < v`.
    discovered: Vec<Option<Arc<NeighborhoodProof>>>,
    edge_count: usize,
    to_be_sent: Vec<(ChainedMessage, NodeId)>,
    /// Last round whose send phase ran.
    round: usize,
    decision: Option<Decision>,
}

impl NectarState {
    /// `proofs` maps each neighbor to the proof of the shared edge; the
    /// neighborhood is its key set.
    pub fn init(
        cfg: NectarConfig,
        key: KeyPair,
        dir: Arc<KeyDirectory>,
        proofs: &BTreeMap<NodeId, Arc<NeighborhoodProof>>,
    ) -> Result<Self, InitError> {
        let NectarConfig { n, id, .. } = cfg;
        if id >= n {
            return Err(InitError::NodeRange { node: id, n });
        }
        if key.node() != id {
            return Err(InitError::KeyMismatch { node: id, key: key.node() });
        }
        if dir.len() != n {
            return Err(InitError::Directory { n, got: dir.len() });
        }
        let mut state = Self {
            cfg,
            neighbors: Vec::with_capacity(proofs.len()),
            key,
            dir,
            discovered: vec![None; n * n],
            edge_count: 0,
            to_be_sent: Vec::new(),
            round: 0,
            decision: None,
        };
        for (&nb, proof) in proofs {
            if nb >= n || nb == id {
                return Err(InitError::UnexpectedProof(nb));
            }
            if proof.edge() != (id.min(nb), id.max(nb)) {
                return Err(InitError::WrongEdge { neighbor: nb, edge: proof.edge() });
            }
            if !verify_proof(proof, &state.dir) {
                return Err(InitError::InvalidProof(nb));
            }
            state.neighbors.push(nb);
            state.record(Arc::clone(proof));
        }
        Ok(state)
    }

    /// Like [`init`](Self::init), additionally checking that the proofs cover
    /// exactly `neighbors`.
    pub fn init_with_neighbors(
        cfg: NectarConfig,
        neighbors: &[NodeId],
        key: KeyPair,
        dir: Arc<KeyDirectory>,
        proofs: &BTreeMap<NodeId, Arc<NeighborhoodProof>>,
    ) -> Result<Self, InitError> {
        if let Some(&nb) = neighbors.iter().find(|nb| !proofs.contains_key(nb)) {
            return Err(InitError::MissingProof(nb));
        }
        if let Some(&nb) = proofs.keys().find(|nb| !neighbors.contains(nb)) {
            return Err(InitError::UnexpectedProof(nb));
        }
        Self::init(cfg, key, dir, proofs)
    }

    pub fn id(&self) -> NodeId {
        self.cfg.id
    }

    pub fn neighbors(&self) -> &[NodeId] {
        &self.neighbors
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Chains accepted in the current round, to be relayed in the next.
    pub fn pending(&self) -> &[(ChainedMessage, NodeId)] {
        &self.to_be_sent
    }

    pub fn key(&self) -> &KeyPair {
        &self.key
    }

    pub fn decision(&self) -> Option<Decision> {
        self.decision
    }

    fn slot(&self, (u, v): Edge) -> usize {
        u * self.cfg.n + v
    }

    fn record(&mut self, proof: Arc<NeighborhoodProof>) {
        let slot = self.slot(proof.edge());
        if self.discovered[slot].is_none() {
            self.edge_count += 1;
        }
        self.discovered[slot] = Some(proof);
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u != v && u.max(v) < self.cfg.n && self.discovered[self.slot((u.min(v), u.max(v)))].is_some()
    }

    pub fn proof(&self, u: NodeId, v: NodeId) -> Option<&Arc<NeighborhoodProof>> {
        if u == v || u.max(v) >= self.cfg.n {
            return None;
        }
        self.discovered[self.slot((u.min(v), u.max(v)))].as_ref()
    }

    pub fn discovered_edges(&self) -> BTreeSet<Edge> {
        self.discovered.iter().flatten().map(|p| p.edge()).collect()
    }

    pub fn discovered_count(&self) -> usize {
        self.edge_count
    }

    /// The discovered matrix as a graph over all `n` nodes.
    pub fn view(&self) -> Graph {
        let mut g = Graph::empty(self.cfg.n);
        for p in self.discovered.iter().flatten() {
            // Recorded proofs always name two distinct in-range nodes.
            let _ = g.add_edge(p.u, p.v);
        }
        g
    }

    /// Messages for round `round`, which must follow the previous call.
    pub fn round_outgoing(&mut self, round: usize) -> Result<Vec<Outgoing<ChainedMessage>>, NodeError> {
        if round != self.round + 1 || self.decision.is_some() {
            return Err(NodeError::OutOfOrder { expected: self.round + 1, got: round });
        }
        self.round = round;
        if round == 1 {
            let own: Vec<Arc<NeighborhoodProof>> =
                self.neighbors.iter().filter_map(|&nb| self.proof(self.cfg.id, nb).cloned()).collect();
            return Ok(own
                .into_iter()
                .map(|p| Outgoing::new(self.neighbors.clone(), ChainedMessage::originate(p, &self.key)))
                .collect());
        }
        let buffered = std::mem::take(&mut self.to_be_sent);
        let mut out = Vec::with_capacity(buffered.len());
        for (msg, from) in buffered {
            let dests: Vec<NodeId> = self.neighbors.iter().copied().filter(|&nb| nb != from).collect();
            if dests.is_empty() {
                continue;
            }
            let signed = msg.extend(&self.key).map_err(|e| NodeError::Protocol(e.to_string()))?;
            out.push(Outgoing::new(dests, signed));
        }
        Ok(out)
    }

    /// Handles a chain received in `round`. Anything that fails a check is
    /// dropped without effect; the return value tells whether it was kept.
    pub fn on_receive(&mut self, msg: &ChainedMessage, from: NodeId, round: usize) -> bool {
        let n = self.cfg.n;
        let (u, v) = msg.edge();
        if round != self.round || msg.len() != round || u >= v || v >= n {
            return false;
        }
        if self.has_edge(u, v) || msg.last_signer() != Some(from) || !self.neighbors.contains(&from) {
            return false;
        }
        if !verify_chain(msg, &self.dir).valid {
            return false;
        }
        self.record(Arc::clone(msg.proof()));
        self.to_be_sent.push((msg.clone(), from));
        true
    }

    /// Decision after round `n − 1`.
    pub fn decide(&mut self) -> Result<Decision, NodeError> {
        if let Some(d) = self.decision {
            return Ok(d);
        }
        let n = self.cfg.n;
        let needed = n.saturating_sub(1);
        if self.round != needed {
            return Err(NodeError::Premature { needed, done: self.round });
        }
        let d = if n == 1 {
            Decision::NOT_PARTITIONABLE
        } else {
            let view = self.view();
            let r = reachable_component(&view, self.cfg.id).len();
            if r != n {
                Decision::partitionable(true)
            } else if vertex_connectivity_capped(&view, self.cfg.t + 1) > self.cfg.t {
                Decision::NOT_PARTITIONABLE
            } else {
                Decision::partitionable(false)
            }
        };
        self.decision = Some(d);
        Ok(d)
    }
}

impl SimNode<ChainedMessage> for NectarState {
    fn send(&mut self, round: usize) -> Result<Vec<Outgoing<ChainedMessage>>, NodeError> {
        self.round_outgoing(round)
    }

    fn receive(&mut self, round: usize, from: NodeId, msg: &ChainedMessage) -> Result<(), NodeError> {
        self.on_receive(msg, from, round);
        Ok(())
    }

    fn decide(&mut self) -> Result<Option<Decision>, NodeError> {
        NectarState::decide(self).map(Some)
    }

    fn discovered(&self) -> Option<BTreeSet<Edge>> {
        Some(self.discovered_edges())
    }
}

/// Proof of every edge of `g`, grouped per node by neighbor.
pub fn provision_proofs(g: &Graph, keys: &[KeyPair]) -> Vec<BTreeMap<NodeId, Arc<NeighborhoodProof>>> {
    let mut per_node = vec![BTreeMap::new(); g.n()];
    for (u, v) in g.edges() {
        let p = Arc::new(crate::crypto::make_proof(&keys[u], &keys[v]).expect("edge endpoints are distinct"));
        per_node[u].insert(v, Arc::clone(&p));
        per_node[v].insert(u, p);
    }
    per_node
}

/// All-correct NECTAR nodes for `g`.
pub fn correct_nodes(g: &Graph, t: usize, keys: &[KeyPair], dir: &Arc<KeyDirectory>) -> Vec<NectarState> {
    let proofs = provision_proofs(g, keys);
    (0..g.n())
        .map(|id| {
            NectarState::init(NectarConfig { n: g.n(), t, id }, keys[id].clone(), Arc::clone(dir), &proofs[id])
                .expect("provisioned state is consistent")
        })
        .collect()
}

/// Messages a correct node may send over a run: each edge it knows of is
/// relayed at most once, to at most all of its neighbors.
pub fn message_bound(tr: &Transcript, v: NodeId) -> u64 {
    let g = &tr.graph;
    let known = match &tr.discovered[v] {
        Some(d) => g.edges().filter(|e| !d.contains(e)).count() + d.len(),
        None => g.edge_count(),
    };
    (known * g.degree(v)) as u64
}

/// Outcome of checking a transcript against the message-complexity bound.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundCheck {
    /// Correct nodes that sent more than [`message_bound`] messages.
    pub node_violations: Vec<NodeId>,
    /// Whether the total message count stays within `n^4`.
    pub total_ok: bool,
}

impl BoundCheck {
    pub fn ok(&self) -> bool {
        self.node_violations.is_empty() && self.total_ok
    }
}

pub fn check_message_bound(tr: &Transcript) -> BoundCheck {
    let n = tr.n() as u64;
    BoundCheck {
        node_violations: tr.correct_nodes().filter(|&v| tr.messages_sent[v] > message_bound(tr, v)).collect(),
        total_ok: tr.total_messages() <= n.pow(4),
    }
}
