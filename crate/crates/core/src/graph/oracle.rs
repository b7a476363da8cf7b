//! Brute-force partitionability oracles. These enumerate node subsets
//! directly and share no code with the max-flow connectivity routine.

use super::{is_partitioned, Graph, GraphError, NodeId, NodeSet};

/// Largest graph the subset enumeration accepts.
pub const ORACLE_MAX_NODES: usize = 16;

/// True iff removing `set` leaves a partitioned remainder.
pub fn is_vertex_cut(g: &Graph, set: &NodeSet) -> bool {
    is_partitioned(&g.without(set).0)
}

/// True iff some node set of size at most `t` disconnects the remaining nodes,
/// by enumerating every subset of size `0..=t`.
pub fn byz_partitionable_oracle(g: &Graph, t: usize) -> Result<bool, GraphError> {
    let n = g.n();
    if n > ORACLE_MAX_NODES {
        return Err(GraphError::TooLarge { n, limit: ORACLE_MAX_NODES });
    }
    if t >= n {
        return Err(GraphError::Parameter(format!("t = {t} must be below n = {n}")));
    }
    Ok(any_subset(n, t, |set| is_vertex_cut(g, set)))
}

/// True iff some subset of `candidates` is a vertex cut of `g`. Used to check
/// the `confirmed` output: a correct node may only confirm when the Byzantine
/// nodes (or some of them) actually separate the network.
pub fn contains_vertex_cut(g: &Graph, candidates: &NodeSet) -> bool {
    let ids: Vec<NodeId> = candidates.iter().collect();
    (0u64..1 << ids.len()).any(|mask| {
        let set: NodeSet = ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect();
        is_vertex_cut(g, &set)
    })
}

fn any_subset(n: usize, max_size: usize, mut pred: impl FnMut(&NodeSet) -> bool) -> bool {
    (0u32..1 << n).filter(|m| m.count_ones() as usize <= max_size).any(|mask| {
        let set: NodeSet = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        pred(&set)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, path, star};

    #[test]
    fn star_is_one_partitionable() {
        assert!(byz_partitionable_oracle(&star(5), 1).unwrap());
        assert!(!byz_partitionable_oracle(&star(5), 0).unwrap());
    }

    #[test]
    fn complete_graph_never_partitionable_below_n_minus_one() {
        assert!(!byz_partitionable_oracle(&complete(5), 3).unwrap());
    }

    #[test]
    fn budget_and_parameter_errors() {
        let big = path(ORACLE_MAX_NODES + 1);
        assert!(matches!(byz_partitionable_oracle(&big, 1), Err(GraphError::TooLarge { .. })));
        assert!(matches!(byz_partitionable_oracle(&path(3), 3), Err(GraphError::Parameter(_))));
    }

    #[test]
    fn vertex_cut_subsets() {
        let g = path(5);
        assert!(is_vertex_cut(&g, &NodeSet::from([2])));
        assert!(!is_vertex_cut(&g, &NodeSet::from([0])));
        assert!(contains_vertex_cut(&g, &NodeSet::from([0, 2])));
        assert!(!contains_vertex_cut(&g, &NodeSet::from([0, 4])));
    }
}
