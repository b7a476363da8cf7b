use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::crypto::{KeyDirectory, KeyPair, Signature, NODE_ID_LEN};
use crate::decision::{Decision, Verdict};
use crate::graph::NodeId;
use crate::simnet::{NodeError, Outgoing, Payload, SimNode};

/// A node ID signed by that node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedId {
    pub id: NodeId,
    pub sig: Signature,
}

/// Batch of signed IDs sent to one neighbor in one round.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignedIds(pub Vec<Arc<SignedId>>);

impl Payload for SignedIds {
    fn wire_len(&self, sig_len: usize) -> usize {
        self.0.len() * (NODE_ID_LEN + sig_len)
    }
}

fn id_encoding(id: NodeId) -> [u8; 6] {
    let mut out = [0u8; 6];
    out[..2].copy_from_slice(b"ID");
    out[2..].copy_from_slice(&(id as u32).to_be_bytes());
    out
}

pub fn sign_id(key: &KeyPair) -> SignedId {
    SignedId { id: key.node(), sig: key.sign(&id_encoding(key.node())) }
}

pub fn verify_id(s: &SignedId, dir: &KeyDirectory) -> bool {
    dir.verify(s.id, &id_encoding(s.id), &s.sig)
}

/// MtGv2 node: floods verified signed IDs, each at most once per neighbor.
#[derive(Clone, Debug)]
pub struct Mtgv2State {
    id: NodeId,
    n: usize,
    neighbors: Vec<NodeId>,
    dir: Arc<KeyDirectory>,
    collected: BTreeMap<NodeId, Arc<SignedId>>,
    sent_log: BTreeSet<(NodeId, NodeId)>,
    epoch_len: usize,
    round: usize,
    decision: Option<Verdict>,
}

impl Mtgv2State {
    pub fn new(
        key: &KeyPair,
        n: usize,
        neighbors: &[NodeId],
        dir: Arc<KeyDirectory>,
        epoch_len: Option<usize>,
    ) -> Self {
        let own = Arc::new(sign_id(key));
        Self {
            id: key.node(),
            n,
            neighbors: neighbors.to_vec(),
            dir,
            collected: BTreeMap::from([(key.node(), own)]),
            sent_log: BTreeSet::new(),
            epoch_len: epoch_len.unwrap_or(n.saturating_sub(1)),
            round: 0,
            decision: None,
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn collected(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.collected.keys().copied()
    }

    /// Verifies and stores the IDs of one inbound batch. A neighbor that sent
    /// an ID already holds it, so it is never sent back.
    pub fn absorb(&mut self, from: NodeId, batch: &SignedIds) {
        for s in &batch.0 {
            if s.id >= self.n || !verify_id(s, &self.dir) {
                continue;
            }
            self.collected.entry(s.id).or_insert_with(|| Arc::clone(s));
            self.sent_log.insert((s.id, from));
        }
    }

    fn emit(&mut self) -> Vec<Outgoing<SignedIds>> {
        let mut out = Vec::new();
        for &nb in &self.neighbors {
            let fresh: Vec<Arc<SignedId>> =
                self.collected.values().filter(|s| !self.sent_log.contains(&(s.id, nb))).cloned().collect();
            if fresh.is_empty() {
                continue;
            }
            self.sent_log.extend(fresh.iter().map(|s| (s.id, nb)));
            out.push(Outgoing::to(nb, SignedIds(fresh)));
        }
        out
    }
}

/// Absorbs `inbound` and forwards every collected ID not yet sent to each
/// neighbor.
pub fn mtgv2_step(
    s: &mut Mtgv2State,
    inbound: &[(NodeId, SignedIds)],
    round: usize,
) -> Result<Vec<Outgoing<SignedIds>>, NodeError> {
    if round > s.epoch_len {
        return Err(NodeError::PastEpoch { epoch: s.epoch_len, round });
    }
    if round != s.round + 1 {
        return Err(NodeError::OutOfOrder { expected: s.round + 1, got: round });
    }
    s.round = round;
    for (from, batch) in inbound {
        s.absorb(*from, batch);
    }
    Ok(s.emit())
}

/// `NotPartitionable` iff all `n` IDs were collected.
pub fn mtgv2_decide(s: &mut Mtgv2State) -> Verdict {
    let v = if s.collected.len() == s.n { Verdict::NotPartitionable } else { Verdict::Partitionable };
    s.decision = Some(v);
    v
}

impl SimNode<SignedIds> for Mtgv2State {
    fn send(&mut self, round: usize) -> Result<Vec<Outgoing<SignedIds>>, NodeError> {
        mtgv2_step(self, &[], round)
    }

    fn receive(&mut self, _round: usize, from: NodeId, msg: &SignedIds) -> Result<(), NodeError> {
        self.absorb(from, msg);
        Ok(())
    }

    fn decide(&mut self) -> Result<Option<Decision>, NodeError> {
        if self.round != self.epoch_len {
            return Err(NodeError::Premature { needed: self.epoch_len, done: self.round });
        }
        Ok(Some(Decision::from_verdict(mtgv2_decide(self))))
    }
}
