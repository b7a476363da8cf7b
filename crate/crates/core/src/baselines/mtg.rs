use crate::decision::{Decision, Verdict};
use crate::graph::NodeId;
use crate::simnet::{NodeError, Outgoing, SimNode};

use super::{BloomFilter, BloomParams};

/// MtG node: floods the union of every filter it has seen.
#[derive(Clone, Debug)]
pub struct MtgState {
    id: NodeId,
    n: usize,
    neighbors: Vec<NodeId>,
    filter: BloomFilter,
    epoch_len: usize,
    round: usize,
    inbox: Vec<BloomFilter>,
    decision: Option<Verdict>,
}

impl MtgState {
    /// `epoch_len` defaults to `n − 1` when `None`.
    pub fn new(id: NodeId, n: usize, neighbors: &[NodeId], params: BloomParams, epoch_len: Option<usize>) -> Self {
        let mut filter = BloomFilter::new(params);
        filter.insert(id);
        Self {
            id,
            n,
            neighbors: neighbors.to_vec(),
            filter,
            epoch_len: epoch_len.unwrap_or(n.saturating_sub(1)),
            round: 0,
            inbox: Vec::new(),
            decision: None,
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn filter(&self) -> &BloomFilter {
        &self.filter
    }

    pub fn epoch_len(&self) -> usize {
        self.epoch_len
    }
}

/// Merges `inbound` into the node's filter and emits the result to every
/// neighbor.
pub fn mtg_step(
    s: &mut MtgState,
    inbound: &[BloomFilter],
    round: usize,
) -> Result<Vec<Outgoing<BloomFilter>>, NodeError> {
    if round > s.epoch_len {
        return Err(NodeError::PastEpoch { epoch: s.epoch_len, round });
    }
    if round != s.round + 1 {
        return Err(NodeError::OutOfOrder { expected: s.round + 1, got: round });
    }
    s.round = round;
    for f in inbound {
        s.filter.merge(f);
    }
    if s.neighbors.is_empty() {
        return Ok(vec![]);
    }
    Ok(vec![Outgoing::new(s.neighbors.clone(), s.filter.clone())])
}

/// `NotPartitionable` iff every node ID queries true.
pub fn mtg_decide(s: &mut MtgState) -> Verdict {
    for f in std::mem::take(&mut s.inbox) {
        s.filter.merge(&f);
    }
    let v = if (0..s.n).all(|i| s.filter.contains(i)) { Verdict::NotPartitionable } else { Verdict::Partitionable };
    s.decision = Some(v);
    v
}

impl SimNode<BloomFilter> for MtgState {
    fn send(&mut self, round: usize) -> Result<Vec<Outgoing<BloomFilter>>, NodeError> {
        let inbox = std::mem::take(&mut self.inbox);
        mtg_step(self, &inbox, round)
    }

    fn receive(&mut self, _round: usize, _from: NodeId, msg: &BloomFilter) -> Result<(), NodeError> {
        self.inbox.push(msg.clone());
        Ok(())
    }

    fn decide(&mut self) -> Result<Option<Decision>, NodeError> {
        if self.round != self.epoch_len {
            return Err(NodeError::Premature { needed: self.epoch_len, done: self.round });
        }
        Ok(Some(Decision::from_verdict(mtg_decide(self))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{path, Graph};
    use crate::simnet::{run, RunSpec};

    fn nodes(g: &Graph) -> Vec<MtgState> {
        (0..g.n()).map(|v| MtgState::new(v, g.n(), g.neighbors(v), BloomParams::default(), None)).collect()
    }

    #[test]
    fn isolated_node_knows_only_itself() {
        let mut s = MtgState::new(0, 3, &[], BloomParams::default(), None);
        assert!(mtg_step(&mut s, &[], 1).unwrap().is_empty());
        assert!(s.filter().contains(0));
        assert_eq!(mtg_decide(&mut s), Verdict::Partitionable);
    }

    #[test]
    fn path_floods_in_two_rounds() {
        let g = path(3);
        let mut ns = nodes(&g);
        let tr = run(&g, &mut ns, RunSpec::new(2, 0)).unwrap();
        assert!((0..3).all(|i| ns[0].filter().contains(i)));
        assert_eq!(tr.agreed_verdict(), Some(Verdict::NotPartitionable));
        assert_eq!(tr.bytes_sent, vec![64, 128, 64]);
    }

    #[test]
    fn all_ones_inbound_saturates() {
        let p = BloomParams::default();
        let mut s = MtgState::new(0, 4, &[1], p, None);
        mtg_step(&mut s, &[BloomFilter::all_ones(p)], 1).unwrap();
        assert_eq!(s.filter(), &BloomFilter::all_ones(p));
        assert_eq!(mtg_decide(&mut s), Verdict::NotPartitionable);
    }

    #[test]
    fn rounds_past_the_epoch_fail() {
        let mut s = MtgState::new(0, 2, &[1], BloomParams::default(), None);
        mtg_step(&mut s, &[], 1).unwrap();
        assert!(mtg_step(&mut s, &[], 2).is_err());
    }
}
