//! Consistent shortest paths and pairwise distance preservers.
//!
//! Among all shortest `(s, t)`-paths we return the one whose edge set,
//! read as a binary number with bit `rank(e)` per edge (ranks follow the
//! sorted edge order), is smallest. Equivalently: compare two candidate
//! paths by the highest-ranked edge in their symmetric difference and keep
//! the one without it. The order is additive over edges and strict over
//! distinct paths, so every pair has a unique winner and every subpath of
//! a winner is itself the winner for its endpoints. Two winners that share
//! vertices `u` and `w` therefore share the whole `u`-`w` segment, which is
//! exactly consistency. The rule ignores direction, so `path(t, s)` is the
//! reverse of `path(s, t)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, Vertex};
use crate::paths::{bfs_bounded, UNREACHABLE};

/// Fixed-width bitset over edge ranks, ordered as a big integer.
#[derive(Clone, PartialEq, Eq)]
struct EdgeKey(Vec<u64>);

impl EdgeKey {
    fn with_bit(&self, bit: usize) -> EdgeKey {
        let mut k = self.clone();
        k.0[bit / 64] |= 1u64 << (bit % 64);
        k
    }

    fn less_than(&self, other: &EdgeKey) -> bool {
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            if a != b {
                return a < b;
            }
        }
        false
    }
}

/// Hop-shortest `(s, t)`-path chosen by the consistent rule above.
/// Edge weights are ignored.
pub fn consistent_shortest_path(g: &Graph, s: Vertex, t: Vertex) -> Result<Vec<Vertex>> {
    let n = g.vertex_count();
    for v in [s, t] {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
    }
    let (a, b) = (s.min(t), s.max(t));
    let mut path = canonical_path(g, a, b)?;
    if a != s {
        path.reverse();
    }
    Ok(path)
}

fn canonical_path(g: &Graph, s: Vertex, t: Vertex) -> Result<Vec<Vertex>> {
    if s == t {
        return Ok(vec![s]);
    }
    let from_s = bfs_bounded(g, s, u32::MAX - 1);
    let total = from_s.get(t).ok_or(Error::Unreachable(s, t))?;
    let from_t = bfs_bounded(g, t, total);
    let ds = from_s.raw();
    let dt = from_t.raw();
    let on_dag = |v: Vertex| ds[v] != UNREACHABLE && dt[v] != UNREACHABLE && ds[v] + dt[v] == total;

    let mut layers: Vec<Vec<Vertex>> = vec![Vec::new(); total as usize + 1];
    for v in 0..g.vertex_count() {
        if on_dag(v) {
            layers[ds[v] as usize].push(v);
        }
    }
    let words = g.edge_count().div_ceil(64).max(1);
    let mut key: HashMap<Vertex, EdgeKey> = HashMap::new();
    let mut pred: HashMap<Vertex, Vertex> = HashMap::new();
    key.insert(s, EdgeKey(vec![0; words]));
    for layer in layers.iter().skip(1) {
        for &v in layer {
            let mut best: Option<(EdgeKey, Vertex)> = None;
            for &(p, _) in g.neighbors(v) {
                if ds[p] != UNREACHABLE && ds[p] + 1 == ds[v] {
                    if let Some(kp) = key.get(&p) {
                        let rank = g.edge_rank(p, v).expect("adjacent vertices share an edge");
                        let cand = kp.with_bit(rank);
                        if best.as_ref().is_none_or(|(bk, _)| cand.less_than(bk)) {
                            best = Some((cand, p));
                        }
                    }
                }
            }
            let (k, p) = best.expect("every DAG vertex past the source has a DAG predecessor");
            key.insert(v, k);
            pred.insert(v, p);
        }
    }
    let mut path = vec![t];
    let mut cur = t;
    while cur != s {
        cur = pred[&cur];
        path.push(cur);
    }
    path.reverse();
    Ok(path)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSystem {
    pub paths: Vec<Vec<Vertex>>,
    pub pairs: Vec<(Vertex, Vertex)>,
}

impl PathSystem {
    pub fn push(&mut self, path: Vec<Vertex>) {
        let pair = (path[0], *path.last().unwrap());
        self.paths.push(path);
        self.pairs.push(pair);
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn extend(&mut self, other: PathSystem) {
        self.paths.extend(other.paths);
        self.pairs.extend(other.pairs);
    }

    /// Renames vertices through `map` (e.g. a subgraph's new-to-old table).
    pub fn relabel(&self, map: &[Vertex]) -> PathSystem {
        PathSystem {
            paths: self.paths.iter().map(|p| p.iter().map(|&v| map[v]).collect()).collect(),
            pairs: self.pairs.iter().map(|&(a, b)| (map[a], map[b])).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preserver {
    pub subgraph: Graph,
    pub paths: PathSystem,
    /// Informational size reference `n + sqrt(n) * |pairs|`.
    pub edge_bound: f64,
}

/// Union of the consistent shortest paths of all demand pairs.
pub fn build_preserver(g: &Graph, pairs: &[(Vertex, Vertex)]) -> Result<Preserver> {
    let n = g.vertex_count();
    let mut b = GraphBuilder::new(n, false);
    let mut ps = PathSystem::default();
    for &(s, t) in pairs {
        let p = consistent_shortest_path(g, s, t)?;
        for w in p.windows(2) {
            b.add_edge(w[0], w[1])?;
        }
        ps.push(p);
    }
    Ok(Preserver {
        subgraph: b.build(),
        paths: ps,
        edge_bound: n as f64 + (n as f64).sqrt() * pairs.len() as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyViolation {
    pub first: usize,
    pub second: usize,
    /// Common vertices in order along the second path.
    pub shared: Vec<Vertex>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub pairs_checked: u64,
    pub violations: Vec<ConsistencyViolation>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Pairwise check that each two paths meet in one contiguous segment (or
/// not at all).
pub fn check_consistency(ps: &PathSystem) -> ConsistencyReport {
    let index: Vec<HashMap<Vertex, usize>> = ps
        .paths
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, &v)| (v, i)).collect())
        .collect();
    let mut report = ConsistencyReport::default();
    for i in 0..ps.paths.len() {
        for j in i + 1..ps.paths.len() {
            report.pairs_checked += 1;
            let mut shared = Vec::new();
            let mut pos_i = Vec::new();
            let mut pos_j = Vec::new();
            for (qj, v) in ps.paths[j].iter().enumerate() {
                if let Some(&pi) = index[i].get(v) {
                    shared.push(*v);
                    pos_i.push(pi as i64);
                    pos_j.push(qj as i64);
                }
            }
            if shared.len() < 2 {
                continue;
            }
            let contiguous_j = pos_j.windows(2).all(|w| w[1] == w[0] + 1);
            let step = pos_i[1] - pos_i[0];
            let contiguous_i = (step == 1 || step == -1) && pos_i.windows(2).all(|w| w[1] - w[0] == step);
            if !(contiguous_i && contiguous_j) {
                report.violations.push(ConsistencyViolation { first: i, second: j, shared });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn unique_paths() {
        let p = gen::path(4).unwrap();
        assert_eq!(consistent_shortest_path(&p, 0, 3).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(consistent_shortest_path(&p, 3, 0).unwrap(), vec![3, 2, 1, 0]);
        let k4 = gen::complete(4).unwrap();
        assert_eq!(consistent_shortest_path(&k4, 0, 1).unwrap(), vec![0, 1]);
        assert_eq!(consistent_shortest_path(&k4, 2, 2).unwrap(), vec![2]);
    }

    #[test]
    fn c4_tie_goes_through_lower_side() {
        // sides {01, 12} (ranks 0, 2) and {03, 23} (ranks 1, 3): rank 3 loses
        let c4 = gen::cycle(4).unwrap();
        assert_eq!(consistent_shortest_path(&c4, 0, 2).unwrap(), vec![0, 1, 2]);
        assert_eq!(consistent_shortest_path(&c4, 2, 0).unwrap(), vec![2, 1, 0]);
    }

    #[test]
    fn unreachable_pair() {
        let g = Graph::empty(3);
        assert_eq!(consistent_shortest_path(&g, 0, 2), Err(Error::Unreachable(0, 2)));
        assert!(build_preserver(&g, &[(0, 1)]).is_err());
    }

    #[test]
    fn empty_and_tree_preservers() {
        let g = gen::gnm(20, 40, 1).unwrap();
        let p = build_preserver(&g, &[]).unwrap();
        assert_eq!(p.subgraph.edge_count(), 0);
        let t = gen::random_tree(30, 2).unwrap();
        let pairs = [(0, 29), (5, 17), (3, 3)];
        let p = build_preserver(&t, &pairs).unwrap();
        let d = crate::distortion::additive_distortion(
            &t,
            &p.subgraph,
            &crate::distortion::AuditOptions { pairs: Some(&pairs), require_subgraph: true, ..Default::default() },
        )
        .unwrap();
        assert_eq!(d.max_additive, 0);
    }

    #[test]
    fn consistency_examples() {
        let one = PathSystem { paths: vec![vec![0, 1, 2]], pairs: vec![(0, 2)] };
        assert!(check_consistency(&one).passed());
        let disjoint = PathSystem { paths: vec![vec![0, 1], vec![2, 3]], pairs: vec![(0, 1), (2, 3)] };
        assert!(check_consistency(&disjoint).passed());
        // on the 5-vertex graph a-b-c plus a-d-c... paths share a and c, not b
        let bad = PathSystem { paths: vec![vec![0, 1, 2], vec![0, 3, 2]], pairs: vec![(0, 2), (0, 2)] };
        let rep = check_consistency(&bad);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].shared, vec![0, 2]);
        let reversed = PathSystem { paths: vec![vec![4, 0, 1, 2], vec![2, 1, 0]], pairs: vec![(4, 2), (2, 0)] };
        assert!(check_consistency(&reversed).passed());
    }

    #[test]
    fn grid_paths_are_consistent() {
        // grids have exponentially many tied shortest paths
        let g = gen::grid(6, 7).unwrap();
        let mut ps = PathSystem::default();
        for s in (0..42).step_by(5) {
            for t in (1..42).step_by(4) {
                ps.push(consistent_shortest_path(&g, s, t).unwrap());
            }
        }
        assert!(check_consistency(&ps).passed());
    }
}
