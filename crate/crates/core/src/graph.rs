//! Undirected graphs with optional positive integer edge weights.
//!
//! A [`Graph`] is immutable once built. Edges are stored once, normalized
//! so that the smaller endpoint comes first, and sorted by
//! `(min endpoint, max endpoint)`. That order doubles as the canonical
//! edge rank used by the greedy baseline and the consistent path rule.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type Weight = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    weighted: bool,
    edges: Vec<(Vertex, Vertex, Weight)>,
    adj: Vec<Vec<(Vertex, Weight)>>,
}

impl Default for Graph {
    fn default() -> Self {
        Graph::empty(0)
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            weighted: false,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Unweighted graph. Duplicate edges collapse; self-loops are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut b = GraphBuilder::new(n, false);
        for (u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    /// Weighted graph. A repeated edge keeps its smallest weight.
    pub fn from_weighted_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex, Weight)>,
    {
        let mut b = GraphBuilder::new(n, true);
        for (u, v, w) in edges {
            b.add_weighted_edge(u, v, w)?;
        }
        Ok(b.build())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(Vertex, Vertex, Weight)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, Weight)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn weight(&self, u: Vertex, v: Vertex) -> Option<Weight> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let row = &self.adj[u];
        row.binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| row[i].1)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.weight(u, v).is_some()
    }

    /// Position of the edge in the sorted edge list.
    pub fn edge_rank(&self, u: Vertex, v: Vertex) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search_by_key(&key, |&(a, b, _)| (a, b)).ok()
    }

    /// All weights equal to one, whether or not the graph carries weights.
    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|&(_, _, w)| w == 1)
    }

    /// Same vertex set, every weight dropped.
    pub fn unweighted(&self) -> Graph {
        Graph {
            n: self.n,
            weighted: false,
            edges: self.edges.iter().map(|&(u, v, _)| (u, v, 1)).collect(),
            adj: self
                .adj
                .iter()
                .map(|row| row.iter().map(|&(x, _)| (x, 1)).collect())
                .collect(),
        }
    }

    /// Copy of the graph with the listed edges removed (missing edges ignored).
    pub fn without_edges<I>(&self, removed: I) -> Graph
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let drop: std::collections::HashSet<(Vertex, Vertex)> = removed
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        let mut b = GraphBuilder::new(self.n, self.weighted);
        for &(u, v, w) in &self.edges {
            if !drop.contains(&(u, v)) {
                b.insert_unchecked(u, v, w);
            }
        }
        b.build()
    }

    /// Connected component label per vertex, labels numbered from zero in
    /// order of their smallest vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }
}

/// Incremental edge accumulator.
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    n: usize,
    weighted: bool,
    edges: BTreeMap<(Vertex, Vertex), Weight>,
}

impl GraphBuilder {
    pub fn new(n: usize, weighted: bool) -> Self {
        GraphBuilder {
            n,
            weighted,
            edges: BTreeMap::new(),
        }
    }

    pub fn from_graph(g: &Graph) -> Self {
        let mut b = GraphBuilder::new(g.n, g.weighted);
        for &(u, v, w) in &g.edges {
            b.insert_unchecked(u, v, w);
        }
        b
    }

    fn check(&self, u: Vertex, v: Vertex) -> Result<()> {
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::VertexOutOfRange { vertex: x, n: self.n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(())
    }

    /// Returns `true` when the edge was not present before.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<bool> {
        self.add_weighted_edge(u, v, 1)
    }

    /// Returns `true` when the edge was new or its weight decreased.
    pub fn add_weighted_edge(&mut self, u: Vertex, v: Vertex, w: Weight) -> Result<bool> {
        self.check(u, v)?;
        if w == 0 {
            return Err(Error::ZeroWeight(u, v));
        }
        Ok(self.insert_unchecked(u, v, w))
    }

    fn insert_unchecked(&mut self, u: Vertex, v: Vertex, w: Weight) -> bool {
        let key = (u.min(v), u.max(v));
        match self.edges.get_mut(&key) {
            Some(old) if *old <= w => false,
            Some(old) => {
                *old = w;
                true
            }
            None => {
                self.edges.insert(key, w);
                true
            }
        }
    }

    pub fn contains(&self, u: Vertex, v: Vertex) -> bool {
        self.edges.contains_key(&(u.min(v), u.max(v)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn build(self) -> Graph {
        let mut adj: Vec<Vec<(Vertex, Weight)>> = vec![Vec::new(); self.n];
        let mut edges = Vec::with_capacity(self.edges.len());
        for (&(u, v), &w) in &self.edges {
            let w = if self.weighted { w } else { 1 };
            edges.push((u, v, w));
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Graph {
            n: self.n,
            weighted: self.weighted,
            edges,
            adj,
        }
    }
}

/// Induced subgraph on `subset`, relabeled `0..|subset|` in increasing
/// order of the original ids. Returns the graph and the new-to-old map.
///
/// The relabeling is monotone, so the relative order of edges (and hence
/// every rank-based tie-break) is the same in the subgraph as in `g`.
pub fn induced_subgraph(g: &Graph, subset: &[Vertex]) -> Result<(Graph, Vec<Vertex>)> {
    let mut old: Vec<Vertex> = subset.to_vec();
    old.sort_unstable();
    old.dedup();
    let mut new_id = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in old.iter().enumerate() {
        if v >= g.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: g.vertex_count(),
            });
        }
        new_id[v] = i;
    }
    let mut b = GraphBuilder::new(old.len(), g.is_weighted());
    for &u in &old {
        for &(v, w) in g.neighbors(u) {
            if u < v && new_id[v] != usize::MAX {
                b.insert_unchecked(new_id[u], new_id[v], w);
            }
        }
    }
    Ok((b.build(), old))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loops_and_range() {
        assert_eq!(Graph::from_edges(3, [(1, 1)]), Err(Error::SelfLoop(1)));
        assert!(matches!(
            Graph::from_edges(3, [(0, 3)]),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        ));
        assert_eq!(
            Graph::from_weighted_edges(2, [(0, 1, 0)]),
            Err(Error::ZeroWeight(0, 1))
        );
    }

    #[test]
    fn parallel_edges_collapse() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (2, 1)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges(), &[(0, 1, 1), (1, 2, 1)]);
        let w = Graph::from_weighted_edges(2, [(0, 1, 5), (1, 0, 3)]).unwrap();
        assert_eq!(w.weight(0, 1), Some(3));
    }

    #[test]
    fn induced_identity_and_k4() {
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let (h, map) = induced_subgraph(&k4, &[0, 1, 2, 3]).unwrap();
        assert_eq!(h, k4);
        assert_eq!(map, vec![0, 1, 2, 3]);
        let (h, map) = induced_subgraph(&k4, &[1, 0]).unwrap();
        assert_eq!(h.edges(), &[(0, 1, 1)]);
        assert_eq!(map, vec![0, 1]);
    }

    #[test]
    fn induced_cycle_prefix_is_path() {
        let c6 = crate::gen::cycle(6).unwrap();
        let (h, map) = induced_subgraph(&c6, &[0, 1, 2]).unwrap();
        assert_eq!(map, vec![0, 1, 2]);
        assert_eq!(h.edges(), &[(0, 1, 1), (1, 2, 1)]);
    }

    #[test]
    fn edge_rank_follows_sorted_order() {
        let g = Graph::from_edges(4, [(2, 3), (0, 3), (1, 2), (0, 1)]).unwrap();
        assert_eq!(g.edge_rank(0, 1), Some(0));
        assert_eq!(g.edge_rank(3, 0), Some(1));
        assert_eq!(g.edge_rank(2, 1), Some(2));
        assert_eq!(g.edge_rank(2, 3), Some(3));
        assert_eq!(g.edge_rank(0, 2), None);
    }
}
