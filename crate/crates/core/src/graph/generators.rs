//! Topology generators: the connectivity-parameterized families, the
//! bridge-attack constructions, and a few fixed shapes used throughout tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{is_partitioned, vertex_connectivity_capped, Graph, GraphError, NodeId, NodeSet};

/// How many freshly sampled regular graphs to try before giving up on
/// reaching the requested connectivity.
const REGULAR_RETRIES: usize = 20;
/// Restarts of the sequential pairing inside one regular-graph sample.
const PAIRING_RESTARTS: usize = 1000;
/// Resamples of a random side before declaring the density too low.
const SIDE_RETRIES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyKind {
    KRegular,
    KPastedTree,
    KDiamond,
    GeneralizedWheel,
    MultipartiteWheel,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 5] = [
        TopologyKind::KRegular,
        TopologyKind::KPastedTree,
        TopologyKind::KDiamond,
        TopologyKind::GeneralizedWheel,
        TopologyKind::MultipartiteWheel,
    ];
}

/// Generates a graph of the given family with vertex connectivity at least
/// `k` (exactly `k` for regular graphs). Deterministic in `seed`.
pub fn gen_topology(kind: TopologyKind, n: usize, k: usize, seed: u64) -> Result<Graph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        TopologyKind::KRegular => {
            for _ in 0..REGULAR_RETRIES {
                let g = k_regular(n, k, &mut rng)?;
                if vertex_connectivity_capped(&g, k) == k {
                    return Ok(g);
                }
            }
            Err(GraphError::Generation {
                attempts: REGULAR_RETRIES,
                reason: format!("no {k}-connected {k}-regular graph on {n} nodes sampled"),
            })
        }
        TopologyKind::KPastedTree => k_pasted_tree(n, k),
        TopologyKind::KDiamond => k_diamond(n, k),
        TopologyKind::GeneralizedWheel => {
            let hub = wheel_hub(n, k)?;
            generalized_wheel(n, hub)
        }
        TopologyKind::MultipartiteWheel => {
            let hub = wheel_hub(n, k)?;
            multipartite_wheel(n, hub, 2)
        }
    }
}

fn wheel_hub(n: usize, k: usize) -> Result<usize, GraphError> {
    if k < 2 || n < k + 1 {
        return Err(GraphError::Parameter(format!("wheel needs k >= 2 and n >= k + 1 (n = {n}, k = {k})")));
    }
    Ok(k - 2)
}

/// Uniform-ish random `k`-regular graph by sequential random pairing of
/// stubs, restarting when no admissible pair is left.
pub fn k_regular<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<Graph, GraphError> {
    if k >= n || !(n * k).is_multiple_of(2) {
        return Err(GraphError::Parameter(format!("no {k}-regular graph on {n} nodes (need k < n and n*k even)")));
    }
    for _ in 0..PAIRING_RESTARTS {
        if let Some(g) = try_pairing(n, k, rng) {
            return Ok(g);
        }
    }
    Err(GraphError::Generation { attempts: PAIRING_RESTARTS, reason: "stub pairing kept stalling".into() })
}

fn try_pairing<R: Rng>(n: usize, k: usize, rng: &mut R) -> Option<Graph> {
    let mut g = Graph::empty(n);
    let mut stubs: Vec<NodeId> = (0..n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
    while !stubs.is_empty() {
        stubs.shuffle(rng);
        let mut leftover = Vec::new();
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b || g.has_edge(a, b) {
                leftover.extend([a, b]);
            } else {
                g.add_edge(a, b).ok()?;
            }
        }
        if !leftover.is_empty() && !has_admissible_pair(&g, &leftover) {
            return None;
        }
        stubs = leftover;
    }
    Some(g)
}

fn has_admissible_pair(g: &Graph, stubs: &[NodeId]) -> bool {
    let mut nodes = stubs.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    nodes.iter().enumerate().any(|(i, &a)| nodes[i + 1..].iter().any(|&b| !g.has_edge(a, b)))
}

/// Shape shared by the tree families: `internal` nodes per copy laid out as
/// a `k`-ary heap, every internal node owning at least `k` children, plus
/// the leaf assignment.
struct TreeSkeleton {
    internal: usize,
    internal_parent: Vec<Option<usize>>,
    leaf_parent: Vec<usize>,
}

fn tree_skeleton(n: usize, k: usize) -> Result<TreeSkeleton, GraphError> {
    if k == 0 || n < 2 * k {
        return Err(GraphError::Parameter(format!("tree families need k >= 1 and n >= 2k (n = {n}, k = {k})")));
    }
    // Largest per-copy internal count whose leaf budget still gives every
    // internal node k children: n - k*I >= I*(k-1) + 1.
    let internal = (n - 1) / (2 * k - 1);
    let leaves = n - k * internal;
    let internal_parent: Vec<Option<usize>> =
        (0..internal).map(|i| if i == 0 { None } else { Some((i - 1) / k) }).collect();
    let mut child_count = vec![0usize; internal];
    for p in internal_parent.iter().flatten() {
        child_count[*p] += 1;
    }
    let mut leaf_parent = Vec::with_capacity(leaves);
    for (p, &c) in child_count.iter().enumerate() {
        leaf_parent.extend(std::iter::repeat_n(p, k.saturating_sub(c)));
    }
    // Surplus leaves go to the deepest internal nodes first.
    let mut p = internal;
    while leaf_parent.len() < leaves {
        p = if p == 0 { internal - 1 } else { p - 1 };
        leaf_parent.push(p);
    }
    Ok(TreeSkeleton { internal, internal_parent, leaf_parent })
}

/// `k` copies of one tree skeleton whose leaves are identified ("pasted").
/// Copy `c` owns internal IDs `c*I .. (c+1)*I`; shared leaves follow.
pub fn k_pasted_tree(n: usize, k: usize) -> Result<Graph, GraphError> {
    let sk = tree_skeleton(n, k)?;
    let leaf_base = k * sk.internal;
    let mut g = Graph::empty(n);
    for c in 0..k {
        let base = c * sk.internal;
        for (i, p) in sk.internal_parent.iter().enumerate() {
            if let Some(p) = p {
                g.add_edge(base + p, base + i)?;
            }
        }
        for (l, &p) in sk.leaf_parent.iter().enumerate() {
            g.add_edge(base + p, leaf_base + l)?;
        }
    }
    Ok(g)
}

/// Same skeleton as [`k_pasted_tree`], but each internal position is a group
/// of `k` nodes fully joined to its parent group, and each leaf is joined to
/// every node of its parent group.
pub fn k_diamond(n: usize, k: usize) -> Result<Graph, GraphError> {
    let sk = tree_skeleton(n, k)?;
    let leaf_base = k * sk.internal;
    let member = |pos: usize, c: usize| c * sk.internal + pos;
    let mut g = Graph::empty(n);
    for (i, p) in sk.internal_parent.iter().enumerate() {
        if let Some(p) = *p {
            for a in 0..k {
                for b in 0..k {
                    g.add_edge(member(p, a), member(i, b))?;
                }
            }
        }
    }
    for (l, &p) in sk.leaf_parent.iter().enumerate() {
        for a in 0..k {
            g.add_edge(member(p, a), leaf_base + l)?;
        }
    }
    Ok(g)
}

/// A `hub`-clique on nodes `0..hub`, every hub node joined to every rim node,
/// and the rim nodes `hub..n` forming a cycle (an edge when only two remain).
pub fn generalized_wheel(n: usize, hub: usize) -> Result<Graph, GraphError> {
    wheel(n, hub, hub.max(1))
}

/// Like [`generalized_wheel`] but the hub is a complete multipartite graph:
/// hub nodes are dealt round-robin into `parts` independent sets.
pub fn multipartite_wheel(n: usize, hub: usize, parts: usize) -> Result<Graph, GraphError> {
    if parts == 0 {
        return Err(GraphError::Parameter("multipartite hub needs at least one part".into()));
    }
    wheel(n, hub, parts)
}

fn wheel(n: usize, hub: usize, parts: usize) -> Result<Graph, GraphError> {
    if hub >= n {
        return Err(GraphError::Parameter(format!("hub of {hub} leaves no rim in {n} nodes")));
    }
    let mut g = Graph::empty(n);
    for a in 0..hub {
        for b in a + 1..hub {
            if a % parts != b % parts {
                g.add_edge(a, b)?;
            }
        }
        for r in hub..n {
            g.add_edge(a, r)?;
        }
    }
    let rim = n - hub;
    if rim >= 2 {
        for i in 0..rim {
            let j = (i + 1) % rim;
            if i != j {
                g.add_edge(hub + i, hub + j)?;
            }
        }
    }
    Ok(g)
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    let mut g = path(n);
    if n >= 3 {
        g.add_edge(n - 1, 0).unwrap();
    }
    g
}

/// Star with center 0 and leaves `1..n`.
pub fn star(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|v| (0, v))).unwrap()
}

/// Erdős–Rényi `G(n, p)`, resampled until connected.
pub fn gnp_connected<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph, GraphError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(GraphError::Parameter(format!("edge density {p} outside (0, 1]")));
    }
    for _ in 0..SIDE_RETRIES {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v)?;
                }
            }
        }
        if !is_partitioned(&g) {
            return Ok(g);
        }
    }
    Err(GraphError::Generation { attempts: SIDE_RETRIES, reason: format!("G({n}, {p}) never came out connected") })
}

/// Two correct sides joined only through Byzantine nodes.
///
/// Layout: side one is `0..n1`, side two `n1..n1+n2`, Byzantine nodes follow.
/// Each Byzantine node links to every side node with probability `density`
/// (and to at least one node of each side), and to other Byzantine nodes with
/// the same probability. The returned set is the Byzantine placement.
pub fn gen_bridge_attack(
    n1: usize,
    n2: usize,
    byz: usize,
    density: f64,
    seed: u64,
) -> Result<(Graph, NodeSet), GraphError> {
    build_sides(n1, n2, byz, density, seed, |_| [true, true])
}

/// Two disconnected correct sides with Byzantine nodes dealt alternately into
/// them (first to side one). Each Byzantine node attaches only to its own
/// side, so the whole graph stays partitioned; used for filter-poisoning
/// experiments where the partition itself is the ground truth.
pub fn gen_split_sides(
    n1: usize,
    n2: usize,
    byz: usize,
    density: f64,
    seed: u64,
) -> Result<(Graph, NodeSet), GraphError> {
    build_sides(n1, n2, byz, density, seed, |b| [b % 2 == 0, b % 2 == 1])
}

fn build_sides(
    n1: usize,
    n2: usize,
    byz: usize,
    density: f64,
    seed: u64,
    attach: impl Fn(usize) -> [bool; 2],
) -> Result<(Graph, NodeSet), GraphError> {
    if byz == 0 || n1 == 0 || n2 == 0 {
        return Err(GraphError::Parameter("need at least one node per side and one Byzantine node".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n1 + n2 + byz;
    let mut g = Graph::empty(n);
    let sides = [(0, n1), (n1, n2)];
    for &(base, size) in &sides {
        let side = gnp_connected(size, density, &mut rng)?;
        for (u, v) in side.edges() {
            g.add_edge(base + u, base + v)?;
        }
    }
    let byz_base = n1 + n2;
    for b in 0..byz {
        let bid = byz_base + b;
        for (s, &(base, size)) in sides.iter().enumerate() {
            if !attach(b)[s] {
                continue;
            }
            let mut linked = false;
            for v in base..base + size {
                if rng.gen_bool(density) {
                    g.add_edge(bid, v)?;
                    linked = true;
                }
            }
            if !linked {
                g.add_edge(bid, base + rng.gen_range(0..size))?;
            }
        }
        for other in 0..b {
            if attach(b) == attach(other) && rng.gen_bool(density) {
                g.add_edge(bid, byz_base + other)?;
            }
        }
    }
    Ok((g, (byz_base..n).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_vertex_cut, vertex_connectivity};

    #[test]
    fn k4_is_the_only_three_regular_graph_on_four_nodes() {
        let g = gen_topology(TopologyKind::KRegular, 4, 3, 7).unwrap();
        assert_eq!(g, complete(4));
        assert_eq!(vertex_connectivity(&g), 3);
    }

    #[test]
    fn regular_parameter_errors() {
        assert!(matches!(gen_topology(TopologyKind::KRegular, 5, 3, 0), Err(GraphError::Parameter(_))));
        assert!(matches!(gen_topology(TopologyKind::KRegular, 4, 4, 0), Err(GraphError::Parameter(_))));
    }

    #[test]
    fn regular_graphs_have_exact_degree_and_connectivity() {
        for (n, k) in [(10, 3), (12, 4), (20, 5), (16, 7)] {
            let g = gen_topology(TopologyKind::KRegular, n, k, n as u64).unwrap();
            assert!((0..n).all(|v| g.degree(v) == k), "n={n} k={k}");
            assert_eq!(vertex_connectivity(&g), k, "n={n} k={k}");
        }
    }

    #[test]
    fn generators_are_seed_deterministic() {
        for kind in TopologyKind::ALL {
            let a = gen_topology(kind, 24, 4, 99).unwrap();
            let b = gen_topology(kind, 24, 4, 99).unwrap();
            assert_eq!(a, b, "{kind:?}");
        }
        let a = gen_bridge_attack(6, 7, 2, 0.4, 5).unwrap();
        let b = gen_bridge_attack(6, 7, 2, 0.4, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn structured_families_reach_target_connectivity() {
        for kind in TopologyKind::ALL {
            for (n, k) in [(12, 2), (20, 3), (30, 4), (42, 5), (33, 6)] {
                let g = gen_topology(kind, n, k, 1).unwrap();
                assert_eq!(g.n(), n);
                assert!(vertex_connectivity(&g) >= k, "{kind:?} n={n} k={k} got {}", vertex_connectivity(&g));
            }
        }
    }

    #[test]
    fn tree_families_reject_small_n() {
        assert!(k_pasted_tree(5, 3).is_err());
        assert!(k_diamond(1, 1).is_err());
    }

    #[test]
    fn generalized_wheel_with_three_hub_nodes_on_five() {
        // 3-clique hub, 2-node rim: every pair ends up adjacent.
        let g = generalized_wheel(5, 3).unwrap();
        assert_eq!(g, complete(5));
        assert_eq!(vertex_connectivity(&g), 4);
    }

    #[test]
    fn minimal_bridge_is_a_path() {
        let (g, byz) = gen_bridge_attack(1, 1, 1, 0.5, 3).unwrap();
        assert_eq!(byz, NodeSet::from([2]));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn bridge_attack_byzantine_set_is_a_cut() {
        for seed in 0..20 {
            let (g, byz) = gen_bridge_attack(5, 5, 3, 0.5, seed).unwrap();
            assert!(!is_partitioned(&g));
            assert!(is_vertex_cut(&g, &byz));
            assert!(vertex_connectivity(&g) <= 3);
        }
        let (g, _) = gen_bridge_attack(17, 17, 1, 0.3, 11).unwrap();
        assert_eq!(g.n(), 35);
        assert!(vertex_connectivity(&g) <= 1);
    }

    #[test]
    fn split_sides_stay_partitioned() {
        let (g, byz) = gen_split_sides(8, 8, 3, 0.4, 2).unwrap();
        assert!(is_partitioned(&g));
        assert_eq!(g.components().len(), 2);
        assert_eq!(byz.len(), 3);
    }

    #[test]
    fn too_sparse_side_fails_generation() {
        assert!(matches!(gen_bridge_attack(40, 5, 1, 1e-6, 0), Err(GraphError::Generation { .. })));
    }
}
