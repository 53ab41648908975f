//! Exact additive distortion audit of a spanner or emulator against its
//! host graph.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::paths::{apsp, DistMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub max_additive: u64,
    pub argmax_pair: Option<(Vertex, Vertex)>,
    pub pair_count_checked: u64,
    /// distortion value -> number of pairs
    pub histogram: BTreeMap<u64, u64>,
    /// `Some` only when the subgraph check was requested.
    pub subgraph_ok: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct AuditOptions<'a> {
    pub pairs: Option<&'a [(Vertex, Vertex)]>,
    pub require_subgraph: bool,
    pub cap: usize,
}

impl Default for AuditOptions<'_> {
    fn default() -> Self {
        AuditOptions {
            pairs: None,
            require_subgraph: false,
            cap: crate::paths::DEFAULT_AUDIT_CAP,
        }
    }
}

/// First edge of `h` missing from `g`, if any.
pub fn first_non_subgraph_edge(g: &Graph, h: &Graph) -> Option<(Vertex, Vertex)> {
    h.edges()
        .iter()
        .find(|&&(u, v, _)| !g.has_edge(u, v))
        .map(|&(u, v, _)| (u, v))
}

/// Max over pairs of `d_H - d_G`. Fails on any undershoot or on a pair
/// connected in `g` but not in `h`.
pub fn additive_distortion(g: &Graph, h: &Graph, opts: &AuditOptions<'_>) -> Result<DistortionReport> {
    if g.vertex_count() != h.vertex_count() {
        return Err(Error::VertexSetMismatch(g.vertex_count(), h.vertex_count()));
    }
    let subgraph_ok = if opts.require_subgraph {
        if let Some((u, v)) = first_non_subgraph_edge(g, h) {
            return Err(Error::NotSubgraph(u, v));
        }
        Some(true)
    } else {
        None
    };
    let dg = apsp(g, opts.cap)?;
    let dh = apsp(h, opts.cap)?;
    let mut report = distortion_from_matrices(&dg, &dh, opts.pairs)?;
    report.subgraph_ok = subgraph_ok;
    Ok(report)
}

pub(crate) fn distortion_from_matrices(
    dg: &DistMatrix,
    dh: &DistMatrix,
    pairs: Option<&[(Vertex, Vertex)]>,
) -> Result<DistortionReport> {
    let n = dg.vertex_count();
    let mut report = DistortionReport {
        max_additive: 0,
        argmax_pair: None,
        pair_count_checked: 0,
        histogram: BTreeMap::new(),
        subgraph_ok: None,
    };
    let mut visit = |s: Vertex, t: Vertex| -> Result<()> {
        let (g_d, h_d) = (dg.get(s, t), dh.get(s, t));
        let extra = match (g_d, h_d) {
            (None, None) => return Ok(()),
            (Some(_), None) => return Err(Error::Disconnected(s, t)),
            // h may not connect what g does not
            (None, Some(_)) => return Err(Error::Undershoot(s, t, h_d.unwrap() as u64, u64::MAX)),
            (Some(a), Some(b)) if b < a => return Err(Error::Undershoot(s, t, b as u64, a as u64)),
            (Some(a), Some(b)) => (b - a) as u64,
        };
        report.pair_count_checked += 1;
        *report.histogram.entry(extra).or_default() += 1;
        if report.argmax_pair.is_none() || extra > report.max_additive {
            report.max_additive = extra;
            report.argmax_pair = Some((s, t));
        }
        Ok(())
    };
    match pairs {
        Some(pairs) => {
            for &(s, t) in pairs {
                if s >= n || t >= n {
                    return Err(Error::VertexOutOfRange { vertex: s.max(t), n });
                }
                visit(s, t)?;
            }
        }
        None => {
            for s in 0..n {
                for t in s + 1..n {
                    visit(s, t)?;
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeStretchReport {
    pub edges_checked: usize,
    /// Largest `d_H(u, v)` over edges `(u, v)` of `g`; `None` if some edge's
    /// endpoints are disconnected in `h`.
    pub max_stretch: Option<u32>,
    /// Edges with `d_H(u, v) > bound`, including disconnected ones.
    pub violations: Vec<(Vertex, Vertex)>,
}

/// Hop distance in `h` between the endpoints of every edge of `g`, checked
/// against `bound`. One BFS per distinct lower endpoint.
pub fn edge_stretch(g: &Graph, h: &Graph, bound: u32) -> Result<EdgeStretchReport> {
    if g.vertex_count() != h.vertex_count() {
        return Err(Error::VertexSetMismatch(g.vertex_count(), h.vertex_count()));
    }
    let mut report = EdgeStretchReport { edges_checked: 0, max_stretch: Some(0), violations: Vec::new() };
    let edges = g.edges();
    let mut i = 0;
    while i < edges.len() {
        let u = edges[i].0;
        let dist = crate::paths::bfs_bounded(h, u, u32::MAX - 1);
        while i < edges.len() && edges[i].0 == u {
            let v = edges[i].1;
            report.edges_checked += 1;
            match dist.get(v) {
                Some(d) => {
                    report.max_stretch = report.max_stretch.map(|m| m.max(d));
                    if d > bound {
                        report.violations.push((u, v));
                    }
                }
                None => {
                    report.max_stretch = None;
                    report.violations.push((u, v));
                }
            }
            i += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use proptest::prelude::*;

    #[test]
    fn edge_stretch_of_a_cycle_minus_an_edge() {
        let c = gen::cycle(6).unwrap();
        let p = c.without_edges([(0, 5)]);
        let r = edge_stretch(&c, &p, 5).unwrap();
        assert_eq!((r.edges_checked, r.max_stretch), (6, Some(5)));
        assert!(r.violations.is_empty());
        assert_eq!(edge_stretch(&c, &p, 4).unwrap().violations, vec![(0, 5)]);
        let r = edge_stretch(&c, &Graph::empty(6), 9).unwrap();
        assert_eq!((r.max_stretch, r.violations.len()), (None, 6));
    }

    #[test]
    fn identity_is_zero() {
        let g = gen::gnm(40, 90, 2).unwrap();
        let r = additive_distortion(&g, &g, &AuditOptions::default()).unwrap();
        assert_eq!(r.max_additive, 0);
    }

    #[test]
    fn c6_minus_edge() {
        let g = gen::cycle(6).unwrap();
        let h = g.without_edges([(0, 5)]);
        let r = additive_distortion(&g, &h, &AuditOptions { require_subgraph: true, ..Default::default() }).unwrap();
        assert_eq!(r.max_additive, 4);
        assert_eq!(r.argmax_pair, Some((0, 5)));
        assert_eq!(r.subgraph_ok, Some(true));
    }

    #[test]
    fn k3_vs_path() {
        let g = gen::complete(3).unwrap();
        let h = gen::path(3).unwrap();
        let r = additive_distortion(&g, &h, &AuditOptions::default()).unwrap();
        assert_eq!(r.max_additive, 1);
        assert_eq!(r.argmax_pair, Some((0, 2)));
    }

    #[test]
    fn error_paths() {
        let g = gen::path(4).unwrap();
        assert_eq!(
            additive_distortion(&g, &gen::path(3).unwrap(), &AuditOptions::default()),
            Err(Error::VertexSetMismatch(4, 3))
        );
        let h = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let sub = AuditOptions { require_subgraph: true, ..Default::default() };
        assert_eq!(additive_distortion(&g, &h, &sub), Err(Error::NotSubgraph(0, 3)));
        assert!(matches!(additive_distortion(&g, &h, &AuditOptions::default()), Err(Error::Undershoot(0, 3, 1, 3))));
        let cut = g.without_edges([(1, 2)]);
        assert!(matches!(additive_distortion(&g, &cut, &AuditOptions::default()), Err(Error::Disconnected(..))));
    }

    #[test]
    fn explicit_pairs_only() {
        let g = gen::cycle(6).unwrap();
        let h = g.without_edges([(0, 5)]);
        let pairs = [(1, 2), (2, 3)];
        let r = additive_distortion(&g, &h, &AuditOptions { pairs: Some(&pairs), ..Default::default() }).unwrap();
        assert_eq!(r.max_additive, 0);
        assert_eq!(r.pair_count_checked, 2);
    }

    proptest! {
        #[test]
        fn exact_distance_weights_never_undershoot(n in 3usize..20, m in 2usize..40, seed in 0u64..300) {
            let m = m.min(n * (n - 1) / 2);
            let g = gen::gnm(n, m, seed).unwrap();
            let d = apsp(&g, 100).unwrap();
            // emulator made of random pairs weighted by their true distance
            let mut edges: Vec<(usize, usize, u32)> = g.edges().to_vec();
            for s in 0..n { for t in s + 1..n {
                if (s * 13 + t * 7 + seed as usize).is_multiple_of(5) {
                    if let Some(w) = d.get(s, t) { if w > 0 { edges.push((s, t, w)); } }
                }
            }}
            let h = Graph::from_weighted_edges(n, edges).unwrap();
            let r = additive_distortion(&g, &h, &AuditOptions::default()).unwrap();
            prop_assert_eq!(r.max_additive, 0);
        }
    }
}
