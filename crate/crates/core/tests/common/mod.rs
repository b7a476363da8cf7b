//! Test-side oracles. These deliberately avoid the library's connectivity
//! and partition routines: everything is recomputed from the edge list.
#![allow(dead_code)]

use nectar_core::graph::Graph;
use rand::Rng;

/// Connected components of `g` with the nodes in `removed` deleted,
/// by repeated depth-first search over the raw edge list.
pub fn components_without(g: &Graph, removed: &[bool]) -> usize {
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for (u, v) in g.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = removed.to_vec();
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Size of a minimum vertex cut by exhaustive search over subsets in
/// increasing size; `n − 1` when no cut exists (complete graphs), 0 for a
/// disconnected graph or a single node.
pub fn brute_force_kappa(g: &Graph) -> usize {
    let n = g.n();
    if n <= 1 {
        return 0;
    }
    for size in 0..n.saturating_sub(1) {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let removed: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            if components_without(g, &removed) >= 2 {
                return size;
            }
        }
    }
    n - 1
}

/// True iff the nodes outside `byzantine` induce two or more components.
pub fn correct_partitioned(g: &Graph, byzantine: &[usize]) -> bool {
    let mut removed = vec![false; g.n()];
    byzantine.iter().for_each(|&b| removed[b] = true);
    components_without(g, &removed) >= 2
}

/// Erdős–Rényi G(n, p) without a connectivity requirement.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}
