//! Exact structural audits of lower-bound instances, and the deletion and
//! pigeonhole experiments run on composed instances.
//!
//! Audits never raise on a failed property: each finding becomes a
//! [`Check`] with a concrete witness.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::convex::Vector;
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::lower_bound::{BaseGraph, Bundle, ComposedInstance, Leg, Origin};
use crate::paths::{bfs_bounded, UNREACHABLE};

pub const AUDIT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: Value,
    /// Present exactly when the check failed.
    pub witness: Option<Value>,
}

impl Check {
    fn new(name: &str, measured: Value, witness: Option<Value>) -> Check {
        Check { name: name.to_string(), passed: witness.is_none(), measured, witness }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub schema_version: u32,
    pub subject: String,
    /// SHA-256 of the audited instance's canonical serialization.
    pub fingerprint: String,
    pub checks: Vec<Check>,
}

impl AuditReport {
    pub fn new(subject: &str, fingerprint: String) -> AuditReport {
        AuditReport { schema_version: AUDIT_SCHEMA_VERSION, subject: subject.to_string(), fingerprint, checks: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

fn edge_key(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    (u.min(v), u.max(v))
}

/// BFS distances and shortest-path counts from `s`, counts saturating at 2.
pub fn shortest_path_counts(g: &Graph, s: Vertex) -> (Vec<u32>, Vec<u8>) {
    let n = g.vertex_count();
    let mut dist = vec![UNREACHABLE; n];
    let mut count = vec![0u8; n];
    let mut queue = VecDeque::new();
    dist[s] = 0;
    count[s] = 1;
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in g.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
            if dist[v] == dist[u] + 1 {
                count[v] = count[v].saturating_add(count[u]).min(2);
            }
        }
    }
    (dist, count)
}

/// Exact number of shortest `(s, t)`-paths; zero when unreachable.
pub fn count_shortest_paths(g: &Graph, s: Vertex, t: Vertex) -> BigUint {
    let n = g.vertex_count();
    let mut dist = vec![UNREACHABLE; n];
    let mut count = vec![BigUint::zero(); n];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    dist[s] = 0;
    count[s] = BigUint::one();
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &(v, _) in g.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    for &u in &order {
        if u == t {
            break;
        }
        let cu = count[u].clone();
        for &(v, _) in g.neighbors(u) {
            if dist[v] == dist[u] + 1 {
                count[v] += &cu;
            }
        }
    }
    count[t].clone()
}

/// Hop-shortest path by BFS with first-found parents.
pub fn bfs_path(g: &Graph, s: Vertex, t: Vertex) -> Option<Vec<Vertex>> {
    let mut parent = vec![usize::MAX; g.vertex_count()];
    parent[s] = s;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        if u == t {
            break;
        }
        for &(v, _) in g.neighbors(u) {
            if parent[v] == usize::MAX {
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    if parent[t] == usize::MAX {
        return None;
    }
    let mut path = vec![t];
    while *path.last().unwrap() != s {
        path.push(parent[*path.last().unwrap()]);
    }
    path.reverse();
    Some(path)
}

/// Exact re-derivation of the base-graph structure.
pub fn check_base_graph_properties(bg: &BaseGraph) -> Result<AuditReport> {
    let spec = &bg.spec;
    let g = &bg.graph;
    let mut rep = AuditReport::new("base_graph", Bundle::Base(bg.clone()).fingerprint()?);

    let want_n = spec.vertex_count();
    rep.checks.push(Check::new(
        "vertex_count",
        json!({"vertices": g.vertex_count(), "expected": want_n}),
        (g.vertex_count() != want_n).then(|| json!({"vertices": g.vertex_count()})),
    ));

    let want_sources = (spec.r / 2) as usize * (spec.y / 2) as usize;
    let want_pairs = want_sources * spec.vectors.len();
    let bad_source = bg.sources.iter().find(|&&s| !spec.is_source(s));
    rep.checks.push(Check::new(
        "pair_count",
        json!({"sources": bg.sources.len(), "pairs": bg.pairs.len(), "expected_pairs": want_pairs}),
        if bg.sources.len() != want_sources || bg.pairs.len() != want_pairs {
            Some(json!({"sources": bg.sources.len(), "pairs": bg.pairs.len()}))
        } else {
            bad_source.map(|s| json!({"source_outside_region": s}))
        },
    ));

    let mut witness = None;
    for (k, p) in bg.pairs.iter().enumerate() {
        let w = spec.vectors.get(p.vector_index).copied();
        let ok = p.path.first() == Some(&p.s)
            && p.path.last() == Some(&p.t)
            && p.path.len() >= 2
            && w.is_some_and(|(wx, wy)| {
                p.path.windows(2).all(|e| {
                    let (a, b) = (spec.coord(e[0]), spec.coord(e[1]));
                    b.0 - a.0 == wx && b.1 - a.1 == wy && g.has_edge(e[0], e[1])
                })
            });
        if !ok {
            witness = Some(json!({"pair": k}));
            break;
        }
    }
    rep.checks.push(Check::new("paths_follow_vectors", json!({"pairs": bg.pairs.len()}), witness));

    let mut owner: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    let mut witness = None;
    for (k, p) in bg.pairs.iter().enumerate() {
        for e in p.path.windows(2) {
            let key = edge_key(e[0], e[1]);
            if let Some(&other) = owner.get(&key) {
                witness.get_or_insert_with(|| json!({"edge": key, "first": other, "second": k}));
            } else {
                owner.insert(key, k);
            }
        }
    }
    rep.checks.push(Check::new("edge_disjoint", json!({"owned_edges": owner.len()}), witness));

    let orphan = g.edges().iter().find(|&&(u, v, _)| !owner.contains_key(&(u, v)));
    rep.checks.push(Check::new(
        "edges_on_paths",
        json!({"edges": g.edge_count()}),
        orphan.map(|&(u, v, _)| json!({"edge": (u, v)})),
    ));

    let outside = bg.pairs.iter().position(|p| !spec.is_target(p.t));
    rep.checks.push(Check::new("targets_in_region", json!({}), outside.map(|k| json!({"pair": k}))));

    let (x, r) = (spec.x as usize, spec.r as usize);
    let lo = (2 * x - 3 * r).div_ceil(2 * r);
    let hi = 2 * x / r;
    let min = bg.pairs.iter().map(|p| p.path.len() - 1).min().unwrap_or(0);
    let max = bg.pairs.iter().map(|p| p.path.len() - 1).max().unwrap_or(0);
    let short = bg.pairs.iter().position(|p| p.path.len() - 1 < lo || p.path.len() - 1 > hi);
    rep.checks.push(Check::new(
        "path_lengths",
        json!({"min": min, "max": max, "lower_bound": lo, "upper_bound": hi}),
        short.map(|k| json!({"pair": k, "hops": bg.pairs[k].path.len() - 1})),
    ));

    if bg.inner.is_some() {
        let span = spec.x as i64 - (spec.r / 2) as i64;
        let off = bg.pairs.iter().position(|p| spec.coord(p.t).0 - spec.coord(p.s).0 != span);
        rep.checks.push(Check::new(
            "column_span",
            json!({"expected_span": span}),
            off.map(|k| json!({"pair": k, "span": spec.coord(bg.pairs[k].t).0 - spec.coord(bg.pairs[k].s).0})),
        ));
    }

    rep.checks.push(unique_shortest_check(g, bg.pairs.iter().map(|p| (p.s, p.t, p.path.len() - 1)).collect()));
    Ok(rep)
}

/// Each `(s, t, hops)` must have distance `hops` and exactly one shortest
/// path. Sources are processed in parallel.
fn unique_shortest_check(g: &Graph, pairs: Vec<(Vertex, Vertex, usize)>) -> Check {
    let mut by_source: Vec<(Vertex, Vec<usize>)> = Vec::new();
    let mut index: HashMap<Vertex, usize> = HashMap::new();
    for (k, &(s, _, _)) in pairs.iter().enumerate() {
        let slot = *index.entry(s).or_insert_with(|| {
            by_source.push((s, Vec::new()));
            by_source.len() - 1
        });
        by_source[slot].1.push(k);
    }
    let bad: Vec<usize> = by_source
        .par_iter()
        .flat_map_iter(|(s, ks)| {
            let (dist, count) = shortest_path_counts(g, *s);
            ks.iter()
                .copied()
                .filter(|&k| {
                    let (_, t, hops) = pairs[k];
                    dist[t] as usize != hops || count[t] != 1
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let witness = bad.iter().min().map(|&k| {
        let (s, t, hops) = pairs[k];
        let d = bfs_bounded(g, s, u32::MAX - 1).get(t);
        json!({"pair": k, "s": s, "t": t, "path_hops": hops, "distance": d,
               "shortest_paths": count_shortest_paths(g, s, t).to_string()})
    });
    Check::new("unique_shortest_paths", json!({"pairs": pairs.len(), "failures": bad.len()}), witness)
}

/// Exact re-derivation of the composed-instance structure.
pub fn check_composed_properties(inst: &ComposedInstance) -> Result<AuditReport> {
    let g = &inst.graph;
    let mut rep = AuditReport::new("composed", Bundle::Composed(inst.clone()).fingerprint()?);
    let (n_i, p_i) = (inst.inner_n(), inst.inner.pairs.len());

    rep.checks.push(Check::new(
        "subdivision_length",
        json!({"z": inst.z, "inner_vertices": n_i, "inner_pairs": p_i}),
        (inst.z * p_i != n_i).then(|| json!({"z": inst.z, "z_times_pairs": inst.z * p_i})),
    ));

    rep.checks.push(Check::new(
        "vertex_count",
        json!({"vertices": g.vertex_count(), "expected": inst.vertex_count()}),
        (g.vertex_count() != inst.vertex_count()).then(|| json!({"vertices": g.vertex_count()})),
    ));

    rep.checks.push(Check::new(
        "pair_count",
        json!({"pairs": inst.pairs.len(), "outer_pairs": inst.outer.pairs.len()}),
        (inst.pairs.len() != inst.outer.pairs.len()).then(|| json!({"pairs": inst.pairs.len()})),
    ));

    let n = g.vertex_count();
    let missing = inst.pairs.iter().enumerate().find_map(|(k, p)| {
        p.path
            .windows(2)
            .find(|e| e[0] >= n || e[1] >= n || !g.has_edge(e[0], e[1]))
            .map(|e| json!({"pair": k, "edge": (e[0], e[1])}))
    });
    rep.checks.push(Check::new("paths_in_graph", json!({"pairs": inst.pairs.len()}), missing));

    let mut owner: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    let mut witness = None;
    for (k, p) in inst.pairs.iter().enumerate() {
        for e in p.path.windows(2) {
            let key = edge_key(e[0], e[1]);
            if let Some(&other) = owner.get(&key) {
                witness.get_or_insert_with(|| json!({"edge": key, "first": other, "second": k}));
            } else {
                owner.insert(key, k);
            }
        }
    }
    if witness.is_none() {
        witness = g.edges().iter().find(|&&(u, v, _)| !owner.contains_key(&(u, v))).map(|&(u, v, _)| {
            json!({"orphan_edge": (u, v), "origin": (inst.vertex_origin(u), inst.vertex_origin(v))})
        });
    }
    rep.checks.push(Check::new(
        "edge_partition",
        json!({"edges": g.edge_count(), "owned": owner.len()}),
        witness,
    ));

    let mut witness = None;
    if inst.z >= 1 && g.vertex_count() == inst.vertex_count() {
        for e in 0..inst.outer_edges.len() {
            let sub = inst.subdivided_path(e);
            let ok = sub.len() == inst.z + 1
                && sub.windows(2).all(|w| g.has_edge(w[0], w[1]))
                && sub[1..sub.len() - 1].iter().all(|&v| g.degree(v) == 2);
            if !ok {
                witness = Some(json!({"outer_edge": e}));
                break;
            }
        }
    } else {
        witness = Some(json!({"z": inst.z}));
    }
    rep.checks.push(Check::new("subdivided_paths", json!({"outer_edges": inst.outer_edges.len()}), witness));

    let by_ends: HashMap<(Vertex, Vertex), usize> =
        inst.inner.pairs.iter().enumerate().map(|(k, p)| ((p.s, p.t), k)).collect();
    let mut used: HashMap<(Vertex, usize), usize> = HashMap::new();
    let mut witness = None;
    'pairs: for (k, p) in inst.pairs.iter().enumerate() {
        let mut i = 0;
        while i < p.path.len() {
            let Some(Origin::Inner { copy, vertex: first }) = inst.vertex_origin(p.path[i]) else {
                i += 1;
                continue;
            };
            let mut j = i;
            while j + 1 < p.path.len()
                && matches!(inst.vertex_origin(p.path[j + 1]), Some(Origin::Inner { copy: c2, .. }) if c2 == copy)
            {
                j += 1;
            }
            if j > i {
                let last = p.path[j] % n_i;
                match by_ends.get(&(first, last)) {
                    None => {
                        witness = Some(json!({"pair": k, "copy": copy, "run": (first, last)}));
                        break 'pairs;
                    }
                    Some(&ip) => {
                        if let Some(other) = used.insert((copy, ip), k) {
                            witness = Some(json!({"copy": copy, "inner_pair": ip, "pairs": (other, k)}));
                            break 'pairs;
                        }
                    }
                }
            }
            i = j + 1;
        }
    }
    rep.checks.push(Check::new("distinct_inner_paths", json!({"copy_uses": used.len()}), witness));
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceRecord {
    pub s: Vertex,
    pub t: Vertex,
    pub delta_x: i64,
    pub delta_y: i64,
    pub d: i64,
    /// `delta_y + i* delta_x`; the inequality is `lhs <= rhs` after
    /// clearing the positive denominators.
    pub lhs: i64,
    /// `i* (r_I - c + i*) d`.
    pub rhs: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDistanceCheck {
    pub star_pair: usize,
    /// 1-based index of the star pair's vector.
    pub i_star: usize,
    pub v_star: Vector,
    pub star_hops: usize,
    pub records: Vec<DistanceRecord>,
    pub failures: usize,
}

impl GraphDistanceCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// For every source and every reachable vertex in the last `r_I/2`
/// columns, checks `(delta_y / i* + delta_x) / (r_I - c + i*) <= d` with
/// `d = d(s, t) - |star path|` by BFS.
pub fn check_graph_distance_property(inner: &BaseGraph, star_pair: usize) -> Result<GraphDistanceCheck> {
    let params = inner
        .inner
        .ok_or_else(|| Error::InvalidParams("graph distance check needs an inner graph".into()))?;
    let star = inner
        .pairs
        .get(star_pair)
        .ok_or_else(|| Error::InvalidParams(format!("star pair {star_pair} out of range")))?;
    let spec = &inner.spec;
    let c = params.c as i64;
    let i_star = star.vector_index + 1;
    let v_star = spec.vectors[star.vector_index];
    let star_hops = star.path.len() - 1;
    let (ss, st) = (spec.coord(star.s), spec.coord(star.t));
    let star_disp = (st.0 - ss.0, st.1 - ss.1);
    let denom = i_star as i64 * (spec.r as i64 - c + i_star as i64);
    let first_col = spec.x as i64 - (spec.r / 2) as i64 + 1;
    let g = &inner.graph;

    let records: Vec<DistanceRecord> = inner
        .sources
        .par_iter()
        .flat_map_iter(|&s| {
            let dist = bfs_bounded(g, s, u32::MAX - 1);
            let sc = spec.coord(s);
            let mut out = Vec::new();
            for col in first_col..=spec.x as i64 {
                for row in 1..=spec.y as i64 {
                    let t = spec.vertex_id(col, row);
                    let Some(dt) = dist.get(t) else { continue };
                    let delta_x = (col - sc.0) - star_disp.0;
                    let delta_y = (row - sc.1) - star_disp.1;
                    let d = dt as i64 - star_hops as i64;
                    let lhs = delta_y + i_star as i64 * delta_x;
                    let rhs = denom * d;
                    out.push(DistanceRecord { s, t, delta_x, delta_y, d, lhs, rhs, pass: lhs <= rhs });
                }
            }
            out
        })
        .collect();
    let failures = records.iter().filter(|r| !r.pass).count();
    Ok(GraphDistanceCheck { star_pair, i_star, v_star, star_hops, records, failures })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy", content = "edges")]
pub enum DeletionPolicy {
    /// First edge of each inner-copy segment of the path.
    OneEdgePerInnerCopy,
    /// Every other edge, starting with the first.
    HalfOfPath,
    Explicit(Vec<(Vertex, Vertex)>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StretchRecord {
    pub pair_index: usize,
    pub deleted: Vec<(Vertex, Vertex)>,
    pub d_before: u64,
    /// `None` when the deletion disconnects the pair.
    pub d_after: Option<u64>,
    pub stretch: Option<u64>,
    /// Inner copies the canonical path crosses.
    pub inner_copies: usize,
    pub z: usize,
    /// Whether a shortest surviving route crosses the same subdivided
    /// paths, in the same order, as the canonical path.
    pub same_subdivided_route: Option<bool>,
}

fn subdivided_sequence(inst: &ComposedInstance, path: &[Vertex]) -> Vec<usize> {
    inst.legs(path)
        .into_iter()
        .filter_map(|l| match l {
            Leg::Subdivided(e) => Some(e),
            Leg::Copy(_) => None,
        })
        .collect()
}

/// Deletes `F` from the pair's canonical path and measures the exact
/// distance increase.
pub fn deletion_stretch_experiment(
    inst: &ComposedInstance,
    pair_index: usize,
    policy: &DeletionPolicy,
) -> Result<StretchRecord> {
    let pair = inst
        .pairs
        .get(pair_index)
        .ok_or_else(|| Error::InvalidParams(format!("pair {pair_index} out of range")))?;
    let path_edges: Vec<(Vertex, Vertex)> = pair.path.windows(2).map(|e| edge_key(e[0], e[1])).collect();
    let legs = inst.legs(&pair.path);
    let inner_copies = legs.iter().filter(|l| matches!(l, Leg::Copy(_))).count();
    let deleted: Vec<(Vertex, Vertex)> = match policy {
        DeletionPolicy::OneEdgePerInnerCopy => {
            let mut out = Vec::new();
            let mut last: Option<Leg> = None;
            for (k, e) in pair.path.windows(2).enumerate() {
                let leg = inst.legs(e)[0];
                if matches!(leg, Leg::Copy(_)) && last != Some(leg) {
                    out.push(path_edges[k]);
                }
                last = Some(leg);
            }
            out
        }
        DeletionPolicy::HalfOfPath => path_edges.iter().step_by(2).copied().collect(),
        DeletionPolicy::Explicit(edges) => {
            let on_path: HashSet<(Vertex, Vertex)> = path_edges.iter().copied().collect();
            let mut out = Vec::new();
            for &(u, v) in edges {
                let key = edge_key(u, v);
                if !on_path.contains(&key) {
                    return Err(Error::InvalidParams(format!("edge {key:?} is not on the canonical path")));
                }
                out.push(key);
            }
            out
        }
    };
    let d_before = bfs_bounded(&inst.graph, pair.s, u32::MAX - 1)
        .get(pair.t)
        .ok_or(Error::Unreachable(pair.s, pair.t))? as u64;
    let h = inst.graph.without_edges(deleted.iter().copied());
    let route = bfs_path(&h, pair.s, pair.t);
    let d_after = route.as_ref().map(|p| (p.len() - 1) as u64);
    let same = route.as_ref().map(|p| subdivided_sequence(inst, p) == subdivided_sequence(inst, &pair.path));
    Ok(StretchRecord {
        pair_index,
        deleted,
        d_before,
        d_after,
        stretch: d_after.map(|d| d - d_before),
        inner_copies,
        z: inst.z,
        same_subdivided_route: same,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PigeonholeRecord {
    pub pair_index: usize,
    pub path_edges: usize,
    pub missing_edges: usize,
    pub missing_fraction: f64,
    /// `|E(candidate)| <= |E| / 2`; the half-missing guarantee needs it.
    pub budget_met: bool,
    pub d_g: u64,
    pub d_h: Option<u64>,
    pub distortion: Option<u64>,
}

/// Picks the canonical pair with the largest fraction of edges missing
/// from `candidate` and measures its exact distortion there.
pub fn pigeonhole_adversary(inst: &ComposedInstance, candidate: &Graph) -> Result<PigeonholeRecord> {
    let g = &inst.graph;
    if candidate.vertex_count() != g.vertex_count() {
        return Err(Error::VertexSetMismatch(g.vertex_count(), candidate.vertex_count()));
    }
    if let Some(&(u, v, _)) = candidate.edges().iter().find(|&&(u, v, _)| !g.has_edge(u, v)) {
        return Err(Error::NotSubgraph(u, v));
    }
    if inst.pairs.is_empty() {
        return Err(Error::InvalidParams("instance has no canonical pairs".into()));
    }
    let budget_met = 2 * candidate.edge_count() <= g.edge_count();
    let mut best = (0usize, 0usize, 1usize);
    for (k, p) in inst.pairs.iter().enumerate() {
        let total = p.path.len() - 1;
        let missing = p.path.windows(2).filter(|e| !candidate.has_edge(e[0], e[1])).count();
        if k == 0 || missing * best.2 > best.1 * total {
            best = (k, missing, total);
        }
    }
    let (k, missing, total) = best;
    if budget_met && 2 * missing < total {
        return Err(Error::InvariantViolation(format!(
            "budget met but the worst pair {k} misses only {missing} of {total} edges"
        )));
    }
    let p = &inst.pairs[k];
    let d_g = bfs_bounded(g, p.s, u32::MAX - 1).get(p.t).ok_or(Error::Unreachable(p.s, p.t))? as u64;
    let d_h = bfs_bounded(candidate, p.s, u32::MAX - 1).get(p.t).map(u64::from);
    Ok(PigeonholeRecord {
        pair_index: k,
        path_edges: total,
        missing_edges: missing,
        missing_fraction: missing as f64 / total as f64,
        budget_met,
        d_g,
        d_h,
        distortion: d_h.map(|d| d - d_g),
    })
}

/// Keeps the edges at even positions of the sorted edge list.
pub fn parity_candidate(g: &Graph) -> Graph {
    Graph::from_edges(g.vertex_count(), g.edges().iter().step_by(2).map(|&(u, v, _)| (u, v)))
        .expect("subset of a valid edge list")
}
