//! Vertex connectivity by unit-capacity max-flow on the node-split graph.
//!
//! Every vertex `v` becomes `v_in -> v_out` with capacity 1, so a max-flow
//! from `s_out` to `t_in` counts internally vertex-disjoint `s`-`t` paths
//! (Menger). Global connectivity is the minimum over the pairs of the
//! Esfahanian-Hakimi scheme: a minimum-degree vertex `v` against all of its
//! non-neighbors, plus every non-adjacent pair of neighbors of `v`.

use std::collections::VecDeque;

use super::{is_partitioned, Graph, NodeId};

struct Arc {
    to: usize,
    cap: u32,
    init: u32,
    rev: usize,
}

struct SplitNetwork {
    arcs: Vec<Vec<Arc>>,
}

impl SplitNetwork {
    /// Flow from `s_out` to `t_in` never uses the split arcs of `s` or `t`,
    /// so one network serves every pair.
    fn new(g: &Graph) -> Self {
        let mut net = Self { arcs: (0..2 * g.n()).map(|_| Vec::new()).collect() };
        for v in 0..g.n() {
            net.push(2 * v, 2 * v + 1, 1);
        }
        for (u, v) in g.edges() {
            net.push(2 * u + 1, 2 * v, 1);
            net.push(2 * v + 1, 2 * u, 1);
        }
        net
    }

    fn push(&mut self, from: usize, to: usize, cap: u32) {
        let rev_from = self.arcs[to].len();
        let rev_to = self.arcs[from].len();
        self.arcs[from].push(Arc { to, cap, init: cap, rev: rev_from });
        self.arcs[to].push(Arc { to: from, cap: 0, init: 0, rev: rev_to });
    }

    fn reset(&mut self) {
        self.arcs.iter_mut().flatten().for_each(|a| a.cap = a.init);
    }

    fn max_flow(&mut self, s: NodeId, t: NodeId, limit: usize, parent: &mut [Option<(usize, usize)>]) -> usize {
        self.reset();
        let mut flow = 0;
        while flow < limit && self.augment(2 * s + 1, 2 * t, parent) {
            flow += 1;
        }
        flow
    }

    /// One BFS augmentation; returns false when the sink is unreachable.
    fn augment(&mut self, source: usize, sink: usize, parent: &mut [Option<(usize, usize)>]) -> bool {
        parent.iter_mut().for_each(|p| *p = None);
        let mut queue = VecDeque::from([source]);
        let mut reached = false;
        'search: while let Some(u) = queue.pop_front() {
            for (i, arc) in self.arcs[u].iter().enumerate() {
                if arc.cap > 0 && arc.to != source && parent[arc.to].is_none() {
                    parent[arc.to] = Some((u, i));
                    if arc.to == sink {
                        reached = true;
                        break 'search;
                    }
                    queue.push_back(arc.to);
                }
            }
        }
        if !reached {
            return false;
        }
        let mut node = sink;
        while let Some((prev, i)) = parent[node] {
            let rev = self.arcs[prev][i].rev;
            self.arcs[prev][i].cap -= 1;
            self.arcs[node][rev].cap += 1;
            node = prev;
            if node == source {
                break;
            }
        }
        true
    }
}

/// Number of internally vertex-disjoint paths between two distinct,
/// non-adjacent nodes, saturating at `limit`. `None` if `s == t` or the nodes
/// are adjacent (no vertex set separates them).
pub fn local_connectivity(g: &Graph, s: NodeId, t: NodeId, limit: usize) -> Option<usize> {
    if s == t || g.has_edge(s, t) {
        return None;
    }
    let mut parent = vec![None; 2 * g.n()];
    Some(SplitNetwork::new(g).max_flow(s, t, limit, &mut parent))
}

/// Vertex connectivity `κ(g)`: `n - 1` for complete graphs, 0 for
/// disconnected graphs and for `n <= 1`.
pub fn vertex_connectivity(g: &Graph) -> usize {
    vertex_connectivity_capped(g, usize::MAX)
}

/// `min(κ(g), cap)`. Deciding `κ > t` only needs `cap = t + 1`, which bounds
/// every flow computation by `t + 1` augmentations.
pub fn vertex_connectivity_capped(g: &Graph, cap: usize) -> usize {
    let n = g.n();
    if n <= 1 || cap == 0 || is_partitioned(g) {
        return 0;
    }
    if g.is_complete() {
        return (n - 1).min(cap);
    }
    if cap == 1 {
        return 1;
    }
    let v = (0..n).min_by_key(|&v| g.degree(v)).unwrap();
    let mut best = g.degree(v).min(cap);
    let mut net = SplitNetwork::new(g);
    let mut parent = vec![None; 2 * n];
    let nbrs = g.neighbors(v);
    let pairs = (0..n)
        .filter(|&w| w != v && !g.has_edge(v, w))
        .map(|w| (v, w))
        .chain(nbrs.iter().enumerate().flat_map(|(i, &x)| nbrs[i + 1..].iter().map(move |&y| (x, y))))
        .filter(|&(x, y)| !g.has_edge(x, y));
    for (x, y) in pairs {
        best = best.min(net.max_flow(x, y, best, &mut parent));
        if best == 0 {
            break;
        }
    }
    best
}
