//! Lockstep synchronous-round scheduler with byte accounting.
//!
//! Each round runs in two phases separated by a barrier: every node (in
//! ascending ID order) produces its outgoing messages, then every envelope
//! whose endpoints share an edge is delivered, tagged with the same round.
//! After the last round each node decides.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::crypto::{Edge, DEFAULT_SIG_LEN};
use crate::decision::{Decision, Verdict};
use crate::graph::{Graph, NodeId, NodeSet};

/// Canonical wire size of a message, given the configured signature length.
pub trait Payload {
    fn wire_len(&self, sig_len: usize) -> usize;
}

/// One message addressed to several neighbors. Each destination receives
/// its own envelope and is billed separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outgoing<M> {
    pub dests: Vec<NodeId>,
    pub msg: M,
}

impl<M> Outgoing<M> {
    pub fn new(dests: Vec<NodeId>, msg: M) -> Self {
        Self { dests, msg }
    }

    pub fn to(dest: NodeId, msg: M) -> Self {
        Self { dests: vec![dest], msg }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NodeError {
    #[error("round {got} requested, expected round {expected}")]
    OutOfOrder { expected: usize, got: usize },
    #[error("round {round} is past the epoch of {epoch} rounds")]
    PastEpoch { epoch: usize, round: usize },
    #[error("decision requested before round {needed} completed (last round {done})")]
    Premature { needed: usize, done: usize },
    #[error("{0}")]
    Protocol(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("expected {expected} nodes, got {got}")]
    NodeCount { expected: usize, got: usize },
    #[error("node {node} failed in round {round}: {source}")]
    Node {
        node: NodeId,
        round: usize,
        #[source]
        source: NodeError,
    },
    #[error("rounds must be at least 1 for n = {0}")]
    NoRounds(usize),
}

/// A simulated participant, correct or Byzantine.
pub trait SimNode<M>: Send {
    fn send(&mut self, round: usize) -> Result<Vec<Outgoing<M>>, NodeError>;
    fn receive(&mut self, round: usize, from: NodeId, msg: &M) -> Result<(), NodeError>;
    fn decide(&mut self) -> Result<Option<Decision>, NodeError>;

    fn is_byzantine(&self) -> bool {
        false
    }

    /// The node's discovered edge set, for protocols that build one.
    fn discovered(&self) -> Option<BTreeSet<Edge>> {
        None
    }
}

impl<M, N: SimNode<M> + ?Sized> SimNode<M> for Box<N> {
    fn send(&mut self, round: usize) -> Result<Vec<Outgoing<M>>, NodeError> {
        (**self).send(round)
    }
    fn receive(&mut self, round: usize, from: NodeId, msg: &M) -> Result<(), NodeError> {
        (**self).receive(round, from, msg)
    }
    fn decide(&mut self) -> Result<Option<Decision>, NodeError> {
        (**self).decide()
    }
    fn is_byzantine(&self) -> bool {
        (**self).is_byzantine()
    }
    fn discovered(&self) -> Option<BTreeSet<Edge>> {
        (**self).discovered()
    }
}

/// Header of one delivered (or dropped) message.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RoundEnvelope {
    pub round: usize,
    pub from: NodeId,
    pub to: NodeId,
    pub bytes: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct RunSpec {
    pub rounds: usize,
    pub seed: u64,
    /// Resilience parameter the nodes were configured with (ground truth only).
    pub t: usize,
    pub sig_len: usize,
    /// Keep per-round envelope headers in the transcript.
    pub trace: bool,
}

impl RunSpec {
    pub fn new(rounds: usize, seed: u64) -> Self {
        Self { rounds, seed, t: 0, sig_len: DEFAULT_SIG_LEN, trace: false }
    }

    pub fn t(mut self, t: usize) -> Self {
        self.t = t;
        self
    }

    pub fn sig_len(mut self, sig_len: usize) -> Self {
        self.sig_len = sig_len;
        self
    }

    pub fn trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }
}

#[derive(Clone, Debug)]
pub struct Transcript {
    pub graph: Graph,
    pub byzantine: NodeSet,
    pub t: usize,
    pub seed: u64,
    pub rounds: usize,
    pub sig_len: usize,
    /// Sum of envelope sizes per sender.
    pub bytes_sent: Vec<u64>,
    pub messages_sent: Vec<u64>,
    /// Sum of distinct emission sizes per sender: a message multicast to
    /// several neighbors is counted once.
    pub broadcast_bytes: Vec<u64>,
    /// Envelopes addressed across non-edges, never delivered.
    pub dropped: u64,
    pub decisions: Vec<Option<Decision>>,
    pub discovered: Vec<Option<BTreeSet<Edge>>>,
    /// Per-round envelope headers, when tracing was requested.
    pub trace: Option<Vec<Vec<RoundEnvelope>>>,
}

impl Transcript {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn correct_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.n()).filter(|&v| !self.byzantine.contains(v))
    }

    pub fn total_messages(&self) -> u64 {
        self.messages_sent.iter().sum()
    }

    /// Verdict shared by every correct node, or `None` if they disagree or
    /// some correct node did not decide.
    pub fn agreed_verdict(&self) -> Option<Verdict> {
        let mut verdicts = self.correct_nodes().map(|v| self.decisions[v].map(|d| d.verdict));
        let first = verdicts.next()??;
        verdicts.all(|v| v == Some(first)).then_some(first)
    }
}

/// Runs the nodes over `g` for `spec.rounds` rounds.
///
/// `rounds = 0` is accepted only for a single-node system.
pub fn run<M, N>(g: &Graph, nodes: &mut [N], spec: RunSpec) -> Result<Transcript, SimError>
where
    M: Payload,
    N: SimNode<M>,
{
    let n = g.n();
    if nodes.len() != n {
        return Err(SimError::NodeCount { expected: n, got: nodes.len() });
    }
    if spec.rounds == 0 && n > 1 {
        return Err(SimError::NoRounds(n));
    }
    let mut bytes_sent = vec![0u64; n];
    let mut messages_sent = vec![0u64; n];
    let mut broadcast_bytes = vec![0u64; n];
    let mut dropped = 0;
    let mut trace = spec.trace.then(Vec::new);

    for round in 1..=spec.rounds {
        let mut outbox = Vec::with_capacity(n);
        for (id, node) in nodes.iter_mut().enumerate() {
            let out = node.send(round).map_err(|source| SimError::Node { node: id, round, source })?;
            outbox.push(out);
        }
        let mut headers = Vec::new();
        for (from, out) in outbox.iter().enumerate() {
            for o in out {
                let len = o.msg.wire_len(spec.sig_len);
                let mut any = false;
                for &to in &o.dests {
                    if to >= n || !g.has_edge(from, to) {
                        dropped += 1;
                        continue;
                    }
                    any = true;
                    bytes_sent[from] += len as u64;
                    messages_sent[from] += 1;
                    if trace.is_some() {
                        headers.push(RoundEnvelope { round, from, to, bytes: len });
                    }
                    nodes[to].receive(round, from, &o.msg).map_err(|source| SimError::Node {
                        node: to,
                        round,
                        source,
                    })?;
                }
                if any {
                    broadcast_bytes[from] += len as u64;
                }
            }
        }
        if let Some(t) = trace.as_mut() {
            t.push(headers);
        }
    }

    let mut decisions = Vec::with_capacity(n);
    for (id, node) in nodes.iter_mut().enumerate() {
        decisions.push(node.decide().map_err(|source| SimError::Node { node: id, round: spec.rounds, source })?);
    }
    let byzantine = nodes.iter().enumerate().filter(|(_, nd)| nd.is_byzantine()).map(|(i, _)| i).collect();
    Ok(Transcript {
        graph: g.clone(),
        byzantine,
        t: spec.t,
        seed: spec.seed,
        rounds: spec.rounds,
        sig_len: spec.sig_len,
        bytes_sent,
        messages_sent,
        broadcast_bytes,
        dropped,
        decisions,
        discovered: nodes.iter().map(|nd| nd.discovered()).collect(),
        trace,
    })
}

/// Summary quantities of one run, over correct nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measurement {
    pub bytes_per_node: Vec<u64>,
    pub max_bytes: u64,
    pub mean_bytes: f64,
    pub mean_broadcast_bytes: f64,
    pub verdicts: Vec<Option<Verdict>>,
    /// Fraction of correct nodes whose verdict equals `expected`; `None`
    /// when no expectation was supplied or there are no correct nodes.
    pub success_rate: Option<f64>,
}

pub fn measure(tr: &Transcript, expected: Option<Verdict>) -> Measurement {
    let correct: Vec<NodeId> = tr.correct_nodes().collect();
    let c = correct.len().max(1) as f64;
    let mean_of = |v: &[u64]| correct.iter().map(|&i| v[i] as f64).sum::<f64>() / c;
    let verdicts: Vec<Option<Verdict>> = tr.decisions.iter().map(|d| d.map(|d| d.verdict)).collect();
    let success_rate = expected
        .filter(|_| !correct.is_empty())
        .map(|e| correct.iter().filter(|&&i| verdicts[i] == Some(e)).count() as f64 / correct.len() as f64);
    Measurement {
        max_bytes: correct.iter().map(|&i| tr.bytes_sent[i]).max().unwrap_or(0),
        mean_bytes: mean_of(&tr.bytes_sent),
        mean_broadcast_bytes: mean_of(&tr.broadcast_bytes),
        bytes_per_node: tr.bytes_sent.clone(),
        verdicts,
        success_rate,
    }
}
