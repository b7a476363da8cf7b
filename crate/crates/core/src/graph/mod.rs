//! Static undirected topologies and the ground-truth oracles built on them.
//!
//! The simulator owns the [`Graph`]; protocol nodes only ever see their own
//! neighborhood and whatever edges they learn through messages.

mod connectivity;
mod drone;
mod generators;
mod io;
mod oracle;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use connectivity::{local_connectivity, vertex_connectivity, vertex_connectivity_capped};
pub use drone::{gen_drone, DroneParams};
pub use generators::{
    complete, cycle, gen_bridge_attack, gen_split_sides, gen_topology, generalized_wheel, gnp_connected, k_diamond,
    k_pasted_tree, k_regular, multipartite_wheel, path, star, TopologyKind,
};
pub use io::{parse_graph, read_graph, write_graph};
pub use oracle::{byz_partitionable_oracle, contains_vertex_cut, is_vertex_cut, ORACLE_MAX_NODES};

/// Node identifier, dense in `0..n`.
pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("invalid edge ({0}, {1}) for a graph of {2} nodes")]
    InvalidEdge(NodeId, NodeId, usize),
    #[error("generation failed after {attempts} attempts: {reason}")]
    Generation { attempts: usize, reason: String },
    #[error("graph with {n} nodes exceeds the enumeration budget of {limit} nodes")]
    TooLarge { n: usize, limit: usize },
    #[error("graph file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An undirected simple graph over nodes `0..n`.
///
/// Adjacency lists are kept sorted and duplicate-free, so two graphs with the
/// same edge set compare equal and iterate identically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n] }
    }

    /// Builds a graph from an edge list. Repeated edges (in either orientation)
    /// are merged; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Inserts `{u, v}`. Returns `false` if the edge was already present.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool, GraphError> {
        let n = self.n();
        if u == v || u >= n || v >= n {
            return Err(GraphError::InvalidEdge(u, v, n));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                Ok(true)
            }
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges in canonical `(min, max)` order, sorted lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn is_complete(&self) -> bool {
        let n = self.n();
        self.adj.iter().all(|ns| ns.len() + 1 == n)
    }

    /// Subgraph induced by `keep`, relabeled densely in ascending order of the
    /// original IDs. The second element maps new IDs back to original ones.
    pub fn induced(&self, keep: &NodeSet) -> (Graph, Vec<NodeId>) {
        let order: Vec<NodeId> = keep.iter().filter(|&v| v < self.n()).collect();
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in order.iter().enumerate() {
            index[v] = i;
        }
        let mut sub = Graph::empty(order.len());
        for (i, &v) in order.iter().enumerate() {
            sub.adj[i] = self.adj[v].iter().filter_map(|&w| (index[w] != usize::MAX).then_some(index[w])).collect();
            sub.adj[i].sort_unstable();
        }
        (sub, order)
    }

    /// Induced subgraph on every node except `removed`.
    pub fn without(&self, removed: &NodeSet) -> (Graph, Vec<NodeId>) {
        let keep: NodeSet = (0..self.n()).filter(|v| !removed.contains(*v)).collect();
        self.induced(&keep)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            let mut comp = bfs(self, s, &mut seen);
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Longest shortest path, or `None` when the graph is disconnected or empty.
    pub fn diameter(&self) -> Option<usize> {
        if self.n() == 0 || is_partitioned(self) {
            return None;
        }
        (0..self.n()).map(|s| *bfs_distances(self, s).iter().max().unwrap()).max()
    }

    /// Hex SHA-256 over the canonical text encoding; stable across runs.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{} {}\n", self.n(), self.edge_count()));
        for (u, v) in self.edges() {
            h.update(format!("{u} {v}\n"));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("n", &self.n()).field("edges", &self.edges().collect::<Vec<_>>()).finish()
    }
}

fn bfs(g: &Graph, start: NodeId, seen: &mut [bool]) -> Vec<NodeId> {
    let mut comp = vec![start];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                comp.push(w);
                queue.push_back(w);
            }
        }
    }
    comp
}

fn bfs_distances(g: &Graph, start: NodeId) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// A set of node IDs (Byzantine placements, components, favored sides).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeSet(BTreeSet<NodeId>);

impl NodeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.contains(&v)
    }

    pub fn insert(&mut self, v: NodeId) -> bool {
        self.0.insert(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }

    pub fn max(&self) -> Option<NodeId> {
        self.0.last().copied()
    }

    pub fn is_within(&self, n: usize) -> bool {
        self.max().is_none_or(|m| m < n)
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[NodeId; N]> for NodeSet {
    fn from(ids: [NodeId; N]) -> Self {
        ids.into_iter().collect()
    }
}

/// True iff `g` has two or more connected components.
pub fn is_partitioned(g: &Graph) -> bool {
    if g.n() < 2 {
        return false;
    }
    let mut seen = vec![false; g.n()];
    bfs(g, 0, &mut seen).len() < g.n()
}

/// The connected component containing `start` (including `start`).
pub fn reachable_component(g: &Graph, start: NodeId) -> NodeSet {
    let mut seen = vec![false; g.n()];
    bfs(g, start, &mut seen).into_iter().collect()
}
