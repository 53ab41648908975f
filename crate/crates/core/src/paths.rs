//! Exact shortest-path engines: BFS for unit weights, Dijkstra otherwise,
//! an all-pairs matrix for audits, and balls.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Sentinel for "no path". Never exposed as a distance: accessors return
/// `Option`.
pub(crate) const UNREACHABLE: u32 = u32::MAX;

/// Default vertex cap for all-pairs computations.
pub const DEFAULT_AUDIT_CAP: usize = 5000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceVector {
    pub source: Vertex,
    dist: Vec<u32>,
}

impl DistanceVector {
    pub fn get(&self, v: Vertex) -> Option<u32> {
        match self.dist[v] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn to_vec(&self) -> Vec<Option<u32>> {
        (0..self.dist.len()).map(|v| self.get(v)).collect()
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.dist
    }
}

pub fn sssp(g: &Graph, s: Vertex) -> DistanceVector {
    assert!(s < g.vertex_count(), "source {s} out of range");
    let dist = if g.is_weighted() && !g.is_unit_weight() {
        dijkstra(g, s)
    } else {
        bfs(g, s)
    };
    DistanceVector { source: s, dist }
}

fn bfs(g: &Graph, s: Vertex) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; g.vertex_count()];
    let mut queue = VecDeque::new();
    dist[s] = 0;
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        let du = dist[u] + 1;
        for &(v, _) in g.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = du;
                queue.push_back(v);
            }
        }
    }
    dist
}

fn dijkstra(g: &Graph, s: Vertex) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    dist[s] = 0;
    heap.push(Reverse((0u32, s)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in g.neighbors(u) {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Breadth-first distances from `s`, exploring no farther than `limit`
/// hops. Vertices beyond the limit stay unreachable.
pub fn bfs_bounded(g: &Graph, s: Vertex, limit: u32) -> DistanceVector {
    let mut dist = vec![UNREACHABLE; g.vertex_count()];
    let mut queue = VecDeque::new();
    dist[s] = 0;
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        if dist[u] == limit {
            continue;
        }
        let du = dist[u] + 1;
        for &(v, _) in g.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = du;
                queue.push_back(v);
            }
        }
    }
    DistanceVector { source: s, dist }
}

/// `{u : d(v, u) <= r}`, sorted.
pub fn ball(g: &Graph, v: Vertex, r: u32) -> Vec<Vertex> {
    let d = if g.is_weighted() && !g.is_unit_weight() {
        sssp(g, v)
    } else {
        bfs_bounded(g, v, r)
    };
    (0..g.vertex_count())
        .filter(|&u| d.get(u).is_some_and(|x| x <= r))
        .collect()
}

/// Dense symmetric distance matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistMatrix {
    n: usize,
    data: Vec<u32>,
}

impl DistMatrix {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: Vertex, v: Vertex) -> Option<u32> {
        match self.data[u * self.n + v] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }

    pub fn row(&self, u: Vertex) -> Vec<Option<u32>> {
        (0..self.n).map(|v| self.get(u, v)).collect()
    }

    #[inline]
    pub(crate) fn raw(&self, u: Vertex, v: Vertex) -> u32 {
        self.data[u * self.n + v]
    }

    /// Updates all distances after inserting edge `(x, y)` of weight `w`.
    /// A new shortest path uses the edge at most once, so one pass over the
    /// old rows of `x` and `y` is exact.
    pub fn insert_edge(&mut self, x: Vertex, y: Vertex, w: u32) {
        let n = self.n;
        let rx: Vec<u32> = self.data[x * n..(x + 1) * n].to_vec();
        let ry: Vec<u32> = self.data[y * n..(y + 1) * n].to_vec();
        if rx[y] != UNREACHABLE && rx[y] <= w {
            return;
        }
        for a in 0..n {
            let (ax, ay) = (rx[a], ry[a]);
            if ax == UNREACHABLE && ay == UNREACHABLE {
                continue;
            }
            let row = &mut self.data[a * n..(a + 1) * n];
            for b in 0..n {
                let mut best = row[b];
                if ax != UNREACHABLE && ry[b] != UNREACHABLE {
                    best = best.min(ax + w + ry[b]);
                }
                if ay != UNREACHABLE && rx[b] != UNREACHABLE {
                    best = best.min(ay + w + rx[b]);
                }
                row[b] = best;
            }
        }
    }
}

/// All-pairs distances, one single-source run per vertex.
pub fn apsp(g: &Graph, cap: usize) -> Result<DistMatrix> {
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let rows: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|s| sssp(g, s).dist)
        .collect();
    Ok(DistMatrix {
        n,
        data: rows.concat(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use proptest::prelude::*;

    #[test]
    fn path_and_disconnected() {
        let p = gen::path(3).unwrap();
        assert_eq!(sssp(&p, 0).to_vec(), vec![Some(0), Some(1), Some(2)]);
        let e = Graph::empty(2);
        assert_eq!(sssp(&e, 0).to_vec(), vec![Some(0), None]);
    }

    #[test]
    fn weighted_triangle() {
        // routes 0->2: direct 3, via 1: 6; routes 0->1: direct 5, via 2: 4
        let g = Graph::from_weighted_edges(3, [(0, 1, 5), (1, 2, 1), (0, 2, 3)]).unwrap();
        assert_eq!(sssp(&g, 0).to_vec(), vec![Some(0), Some(4), Some(3)]);
    }

    #[test]
    fn apsp_small_cases() {
        let k3 = gen::complete(3).unwrap();
        let d = apsp(&k3, DEFAULT_AUDIT_CAP).unwrap();
        for u in 0..3 {
            for v in 0..3 {
                assert_eq!(d.get(u, v), Some(u32::from(u != v)));
            }
        }
        let e = apsp(&Graph::empty(2), DEFAULT_AUDIT_CAP).unwrap();
        assert_eq!(e.get(0, 1), None);
        let c6 = apsp(&gen::cycle(6).unwrap(), DEFAULT_AUDIT_CAP).unwrap();
        assert_eq!(c6.get(0, 3), Some(3));
        assert!(matches!(
            apsp(&gen::path(10).unwrap(), 5),
            Err(Error::CapExceeded { n: 10, cap: 5 })
        ));
    }

    #[test]
    fn balls() {
        let c6 = gen::cycle(6).unwrap();
        assert_eq!(ball(&c6, 0, 0), vec![0]);
        assert_eq!(ball(&c6, 0, 2), vec![0, 1, 2, 4, 5]);
        let p4 = gen::path(4).unwrap();
        assert_eq!(ball(&p4, 1, 1), vec![0, 1, 2]);
    }

    #[test]
    fn insert_edge_matches_recompute() {
        let g = gen::gnm(30, 35, 4).unwrap();
        let mut d = apsp(&g, 100).unwrap();
        let mut b = crate::graph::GraphBuilder::from_graph(&g);
        for &(x, y) in &[(0, 29), (3, 17), (5, 6), (11, 20)] {
            b.add_edge(x, y).unwrap();
            d.insert_edge(x, y, 1);
            assert_eq!(d, apsp(&b.clone().build(), 100).unwrap());
        }
    }

    proptest! {
        #[test]
        fn sssp_is_tight(n in 2usize..25, m in 0usize..60, seed in 0u64..500, weighted in any::<bool>()) {
            let m = m.min(n * (n - 1) / 2);
            let g0 = gen::gnm(n, m, seed).unwrap();
            let g = if weighted {
                Graph::from_weighted_edges(n, g0.edges().iter().map(|&(u, v, _)| (u, v, 1 + ((u * 31 + v * 7) % 4) as u32))).unwrap()
            } else { g0 };
            let d = sssp(&g, 0);
            prop_assert_eq!(d.get(0), Some(0));
            for &(u, v, w) in g.edges() {
                for (a, b) in [(u, v), (v, u)] {
                    if let Some(da) = d.get(a) {
                        prop_assert!(d.get(b).is_some_and(|db| db <= da + w));
                    }
                }
            }
            for v in 1..n {
                if let Some(dv) = d.get(v) {
                    let tight = g.neighbors(v).iter().any(|&(u, w)| d.get(u) == Some(dv - w.min(dv)) && d.get(u).unwrap() + w == dv);
                    prop_assert!(tight);
                }
            }
        }
    }
}
