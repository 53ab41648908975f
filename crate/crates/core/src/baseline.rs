//! Greedy multiplicative spanner used as the first preprocessing step of
//! both sparsifiers.

use std::collections::VecDeque;

use crate::graph::{Graph, GraphBuilder, Vertex};

/// `ceil(log2(max(n, 2)))`.
pub fn ceil_log2(n: usize) -> u32 {
    let n = n.max(2);
    usize::BITS - (n - 1).leading_zeros()
}

pub fn default_stretch_parameter(n: usize) -> u32 {
    ceil_log2(n)
}

/// Greedy `(2k-1)`-spanner: scan edges by `(min endpoint, max endpoint)`
/// and keep `(u, v)` iff the spanner built so far has no `u`-`v` path of
/// at most `2k - 1` hops. Edge weights of `g` are ignored.
pub fn multiplicative_spanner(g: &Graph, k: u32) -> Graph {
    assert!(k >= 1, "stretch parameter must be positive");
    let n = g.vertex_count();
    let limit = 2 * k - 1;
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    let mut out = GraphBuilder::new(n, false);
    let mut stamp = vec![0u32; n];
    let mut depth = vec![0u32; n];
    let mut round = 0u32;
    let mut queue = VecDeque::new();
    for &(u, v, _) in g.edges() {
        round += 1;
        queue.clear();
        stamp[u] = round;
        depth[u] = 0;
        queue.push_back(u);
        let mut found = false;
        'bfs: while let Some(x) = queue.pop_front() {
            if depth[x] == limit {
                continue;
            }
            for &y in &adj[x] {
                if stamp[y] != round {
                    if y == v {
                        found = true;
                        break 'bfs;
                    }
                    stamp[y] = round;
                    depth[y] = depth[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        if !found {
            adj[u].push(v);
            adj[v].push(u);
            out.add_edge(u, v).expect("edge of a valid graph");
        }
    }
    out.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::paths::{apsp, bfs_bounded};

    #[test]
    fn log2_ceiling() {
        assert_eq!(ceil_log2(1), 1);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(4), 2);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(300), 9);
        assert_eq!(ceil_log2(1024), 10);
    }

    #[test]
    fn tree_is_kept() {
        let t = gen::random_tree(60, 3).unwrap();
        assert_eq!(multiplicative_spanner(&t, 3), t);
    }

    #[test]
    fn stretch_one_keeps_k4() {
        let k4 = gen::complete(4).unwrap();
        assert_eq!(multiplicative_spanner(&k4, 1), k4);
    }

    #[test]
    fn c9_with_k2_has_stretch_three() {
        let g = gen::cycle(9).unwrap();
        let h = multiplicative_spanner(&g, 2);
        let dg = apsp(&g, 100).unwrap();
        let dh = apsp(&h, 100).unwrap();
        for u in 0..9 {
            for v in 0..9 {
                assert!(dh.get(u, v).unwrap() <= 3 * dg.get(u, v).unwrap());
            }
        }
        // a 9-cycle has girth 9 > 4, so nothing can be dropped
        assert_eq!(h, g);
    }

    #[test]
    fn every_edge_within_stretch() {
        let g = gen::gnm(120, 900, 12).unwrap();
        let k = 3;
        let h = multiplicative_spanner(&g, k);
        assert!(h.edge_count() < g.edge_count());
        for &(u, v, _) in g.edges() {
            assert!(h.has_edge(u, v) || bfs_bounded(&h, u, 2 * k - 1).get(v).is_some());
            assert!(!h.has_edge(u, v) || g.has_edge(u, v));
        }
    }
}
