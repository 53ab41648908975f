//! Lower-bound instances: grid base graphs driven by a vector set, the
//! inner and outer graphs built from them, and their composition.
//!
//! Grid point `(col, row)`, with `1 <= col <= x` and `1 <= row <= y`, has id
//! `(col - 1) * y + (row - 1)`. Every vector has a positive first
//! coordinate, so canonical paths run towards larger ids.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::convex::{ConvexVectorSet, Vector};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder, Vertex};
use crate::io::{parse_edge_list, to_edge_list};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseGraphSpec {
    pub x: u32,
    pub y: u32,
    pub r: u32,
    pub vectors: Vec<Vector>,
}

impl BaseGraphSpec {
    pub fn vertex_count(&self) -> usize {
        self.x as usize * self.y as usize
    }

    /// Id of the 1-based grid point `(col, row)`.
    pub fn vertex_id(&self, col: i64, row: i64) -> Vertex {
        ((col - 1) * self.y as i64 + (row - 1)) as Vertex
    }

    pub fn coord(&self, v: Vertex) -> (i64, i64) {
        let y = self.y as usize;
        ((v / y) as i64 + 1, (v % y) as i64 + 1)
    }

    pub fn contains(&self, (col, row): (i64, i64)) -> bool {
        col >= 1 && row >= 1 && col <= self.x as i64 && row <= self.y as i64
    }

    /// Source region `[1, r/2] x [1, y/2]`.
    pub fn is_source(&self, v: Vertex) -> bool {
        let (col, row) = self.coord(v);
        col <= (self.r / 2) as i64 && row <= (self.y / 2) as i64
    }

    /// Target region `[x - r, x] x [1, y]`.
    pub fn is_target(&self, v: Vertex) -> bool {
        self.coord(v).0 >= self.x as i64 - self.r as i64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::SpecViolation(m));
        let (x, y, r) = (self.x as i64, self.y as i64, self.r as i64);
        if r < 2 || r % 2 != 0 {
            return bad(format!("r = {r} must be even and at least 2"));
        }
        if y < 2 {
            return bad(format!("y = {y} must be at least 2"));
        }
        if 4 * r > x {
            return bad(format!("r = {r} exceeds x/4 for x = {x}"));
        }
        if self.vectors.is_empty() {
            return bad("vector set is empty".into());
        }
        let mut seen = HashSet::new();
        for &(wx, wy) in &self.vectors {
            if !seen.insert((wx, wy)) {
                return bad(format!("duplicate vector ({wx}, {wy})"));
            }
            if 2 * wx < r || wx > r {
                return bad(format!("first coordinate of ({wx}, {wy}) outside [r/2, r] for r = {r}"));
            }
            if wy < 0 || wy > wx {
                return bad(format!("angle of ({wx}, {wy}) outside [0, pi/4]"));
            }
            if wy * 2 * x > y * wx {
                return bad(format!("angle of ({wx}, {wy}) exceeds atan(y / 2x)"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalPair {
    pub s: Vertex,
    pub t: Vertex,
    pub vector_index: usize,
    pub path: Vec<Vertex>,
}

impl CriticalPair {
    pub fn hops(&self) -> usize {
        self.path.len() - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerParams {
    pub c: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseGraph {
    pub spec: BaseGraphSpec,
    /// Stored next to the sidecar as an edge list.
    #[serde(skip)]
    pub graph: Graph,
    pub sources: Vec<Vertex>,
    /// Ordered by source id, then vector index.
    pub pairs: Vec<CriticalPair>,
    pub inner: Option<InnerParams>,
    pub stripes: Option<Vec<Vec<usize>>>,
}

impl BaseGraph {
    /// Union of the canonical paths, which is how the graph is built.
    pub fn rebuild_graph(&self) -> Result<Graph> {
        let mut b = GraphBuilder::new(self.spec.vertex_count(), false);
        for p in &self.pairs {
            for w in p.path.windows(2) {
                b.add_edge(w[0], w[1])?;
            }
        }
        Ok(b.build())
    }

    /// The driving vector set, with stripes when the graph has them.
    pub fn vector_set(&self) -> ConvexVectorSet {
        let psi_max = self.spec.vectors.iter().map(|&(x, y)| (y as f64).atan2(x as f64)).fold(0.0, f64::max);
        ConvexVectorSet {
            r: self.spec.r,
            vectors: self.spec.vectors.clone(),
            psi_max,
            stripes: self.stripes.clone(),
            psi2: None,
            widened: false,
            pool_size: self.spec.vectors.len(),
        }
    }

    pub fn pairs_with_vector(&self, i: usize) -> Vec<usize> {
        (0..self.pairs.len()).filter(|&k| self.pairs[k].vector_index == i).collect()
    }
}

/// Critical pairs `(s, s + k w)` with `k` maximal, and the union of their
/// straight-line paths.
pub fn build_base_graph(spec: &BaseGraphSpec) -> Result<BaseGraph> {
    spec.validate()?;
    let mut sources = Vec::new();
    for col in 1..=(spec.r / 2) as i64 {
        for row in 1..=(spec.y / 2) as i64 {
            sources.push(spec.vertex_id(col, row));
        }
    }
    let mut pairs = Vec::with_capacity(sources.len() * spec.vectors.len());
    let mut b = GraphBuilder::new(spec.vertex_count(), false);
    for &s in &sources {
        let (sc, sr) = spec.coord(s);
        for (i, &(wx, wy)) in spec.vectors.iter().enumerate() {
            let mut k = (spec.x as i64 - sc) / wx;
            if wy > 0 {
                k = k.min((spec.y as i64 - sr) / wy);
            }
            if k < 1 {
                return Err(Error::SpecViolation(format!("vector ({wx}, {wy}) leaves the grid from {:?}", (sc, sr))));
            }
            let path: Vec<Vertex> = (0..=k).map(|j| spec.vertex_id(sc + j * wx, sr + j * wy)).collect();
            let t = *path.last().unwrap();
            if !spec.is_target(t) {
                return Err(Error::InvariantViolation(format!(
                    "pair from {:?} with vector ({wx}, {wy}) ends at {:?}, outside the target region",
                    (sc, sr),
                    spec.coord(t)
                )));
            }
            for w in path.windows(2) {
                b.add_edge(w[0], w[1])?;
            }
            pairs.push(CriticalPair { s, t, vector_index: i, path });
        }
    }
    Ok(BaseGraph { spec: spec.clone(), graph: b.build(), sources, pairs, inner: None, stripes: None })
}

/// `{(r - c + i, i + (i + 1) + ... + c) : 1 <= i <= c}`.
pub fn inner_vectors(c: u32, r: u32) -> Vec<Vector> {
    let (c, r) = (c as i64, r as i64);
    (1..=c).map(|i| (r - c + i, (i..=c).sum())).collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Least common multiple of the first coordinates `r - c + 1 ..= r`.
pub fn inner_period(c: u32, r: u32) -> u64 {
    (r - c + 1..=r).fold(1u64, |acc, w| acc / gcd(acc, w as u64) * w as u64)
}

fn check_inner_params(c: u32, r: u32) -> Result<()> {
    if c == 0 {
        return Err(Error::SpecViolation("c must be positive".into()));
    }
    if r < c * c {
        return Err(Error::SpecViolation(format!("r_I = {r} is below c^2 = {}", c * c)));
    }
    if !r.is_multiple_of(2) {
        return Err(Error::SpecViolation(format!("r_I = {r} must be even")));
    }
    Ok(())
}

/// Inner graph on `x_i x y_i`. Requires `x_i = r_i/2` modulo the period so
/// that every pair spans exactly `x_i - r_i/2` columns.
pub fn build_inner_graph(c: u32, r_i: u32, x_i: u32, y_i: u32) -> Result<BaseGraph> {
    check_inner_params(c, r_i)?;
    let period = inner_period(c, r_i);
    if x_i as u64 % period != (r_i / 2) as u64 % period {
        return Err(Error::DivisibilityViolation(format!(
            "x_I = {x_i} is not congruent to r_I/2 = {} modulo {period}",
            r_i / 2
        )));
    }
    let spec = BaseGraphSpec { x: x_i, y: y_i, r: r_i, vectors: inner_vectors(c, r_i) };
    let mut bg = build_base_graph(&spec)?;
    let span = x_i as i64 - (r_i / 2) as i64;
    for p in &bg.pairs {
        if spec.coord(p.t).0 - spec.coord(p.s).0 != span {
            return Err(Error::InvariantViolation(format!(
                "pair {:?} -> {:?} does not span {span} columns",
                spec.coord(p.s),
                spec.coord(p.t)
            )));
        }
    }
    bg.inner = Some(InnerParams { c });
    Ok(bg)
}

/// Smallest `(x_I, y_I)` admitted by the divisibility and angle constraints.
pub fn inner_shape(c: u32, r_i: u32) -> Result<(u32, u32)> {
    check_inner_params(c, r_i)?;
    let period = inner_period(c, r_i);
    let half = (r_i / 2) as u64;
    let mut x = 4 * r_i as u64;
    let shift = (half % period + period - x % period) % period;
    x += shift;
    let x = u32::try_from(x).map_err(|_| Error::SpecViolation("x_I overflows".into()))?;
    let mut y = 2u64;
    for (wx, wy) in inner_vectors(c, r_i) {
        y = y.max((wy as u64 * 2 * x as u64).div_ceil(wx as u64));
    }
    y += y % 2;
    let y = u32::try_from(y).map_err(|_| Error::SpecViolation("y_I overflows".into()))?;
    Ok((x, y))
}

/// Outer graph on `x_o x y_o` over a striped vector set.
pub fn build_outer_graph(x_o: u32, y_o: u32, w: &ConvexVectorSet) -> Result<BaseGraph> {
    let stripes = w
        .stripes
        .clone()
        .ok_or_else(|| Error::SpecViolation("outer vector set must be partitioned into stripes".into()))?;
    let spec = BaseGraphSpec { x: x_o, y: y_o, r: w.r, vectors: w.vectors.clone() };
    let mut bg = build_base_graph(&spec)?;
    bg.stripes = Some(stripes);
    Ok(bg)
}

/// Grid shape `x = ceil(sqrt(n/2))`, `y = 2x`.
pub fn outer_shape(n: usize) -> (u32, u32) {
    let x = ((n as f64 / 2.0).sqrt().ceil() as u32).max(1);
    (x, 2 * x)
}

/// Assignment of outer vectors to inner critical pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phi {
    /// Inner pair of each outer vector; `None` for trimmed vectors.
    pub map: Vec<Option<usize>>,
    pub per_stripe: usize,
    pub trimmed_outer: usize,
    pub trimmed_inner: usize,
}

impl Phi {
    pub fn kept_outer(&self) -> Vec<usize> {
        (0..self.map.len()).filter(|&i| self.map[i].is_some()).collect()
    }
}

/// Stripe `i` goes to the inner pairs of vector `i`, in order. When the
/// sides differ in size the larger one is trimmed: highest-angle outer
/// vectors per stripe, or highest-indexed inner pairs per vector.
pub fn default_phi(outer: &ConvexVectorSet, inner: &BaseGraph) -> Result<Phi> {
    let stripes = outer
        .stripes
        .as_ref()
        .ok_or_else(|| Error::CardinalityMismatch("outer vector set has no stripes".into()))?;
    phi_from_stripes(stripes, outer.vectors.len(), inner)
}

/// [`default_phi`] from the stripe index lists alone.
pub fn phi_from_stripes(stripes: &[Vec<usize>], vector_count: usize, inner: &BaseGraph) -> Result<Phi> {
    let c = inner.spec.vectors.len();
    if stripes.len() != c {
        return Err(Error::CardinalityMismatch(format!("{} stripes but {c} inner vectors", stripes.len())));
    }
    let beta = stripes[0].len();
    if stripes.iter().any(|s| s.len() != beta) {
        return Err(Error::CardinalityMismatch("stripes have unequal sizes".into()));
    }
    let classes: Vec<Vec<usize>> = (0..c).map(|i| inner.pairs_with_vector(i)).collect();
    let class_size = classes.iter().map(Vec::len).min().unwrap_or(0);
    if classes.iter().any(|k| k.len() != class_size) {
        return Err(Error::CardinalityMismatch("inner vector classes have unequal sizes".into()));
    }
    let m = beta.min(class_size);
    if stripes.iter().flatten().any(|&i| i >= vector_count) {
        return Err(Error::CardinalityMismatch("stripe index out of range".into()));
    }
    let mut map = vec![None; vector_count];
    for (stripe, class) in stripes.iter().zip(&classes) {
        for j in 0..m {
            map[stripe[j]] = Some(class[j]);
        }
    }
    Ok(Phi { map, per_stripe: m, trimmed_outer: (beta - m) * c, trimmed_inner: (class_size - m) * c })
}

/// Outer vector set restricted to the vectors kept by `phi`, with stripes
/// and the map reindexed.
pub fn restrict_outer(outer: &ConvexVectorSet, phi: &Phi) -> (ConvexVectorSet, Phi) {
    let kept = phi.kept_outer();
    let mut new_index = vec![usize::MAX; outer.vectors.len()];
    for (k, &i) in kept.iter().enumerate() {
        new_index[i] = k;
    }
    let mut set = outer.clone();
    set.vectors = kept.iter().map(|&i| outer.vectors[i]).collect();
    set.stripes = outer.stripes.as_ref().map(|st| {
        st.iter()
            .map(|s| s.iter().filter(|&&i| new_index[i] != usize::MAX).map(|&i| new_index[i]).collect())
            .collect()
    });
    let map = kept.iter().map(|&i| phi.map[i]).collect();
    (set, Phi { map, per_stripe: phi.per_stripe, trimmed_outer: 0, trimmed_inner: phi.trimmed_inner })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Origin {
    Inner { copy: Vertex, vertex: Vertex },
    /// `position` counts from 1 at the inner copy of the edge's lower end.
    Subdivision { outer_edge: usize, position: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OuterEdge {
    pub a: Vertex,
    pub b: Vertex,
    pub vector_index: usize,
    pub inner_pair: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedPair {
    pub s: Vertex,
    pub t: Vertex,
    pub outer_pair: usize,
    pub vector_index: usize,
    pub inner_pair: usize,
    pub path: Vec<Vertex>,
}

impl ComposedPair {
    pub fn hops(&self) -> usize {
        self.path.len() - 1
    }
}

/// Piece of a route through the composed graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Leg {
    Copy(Vertex),
    Subdivided(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComposedInstance {
    #[serde(skip)]
    pub graph: Graph,
    pub z: usize,
    pub pruned: bool,
    pub phi: Phi,
    pub outer: BaseGraph,
    pub inner: BaseGraph,
    /// Indexed like `outer.graph.edges()`.
    pub outer_edges: Vec<OuterEdge>,
    pub pairs: Vec<ComposedPair>,
}

impl ComposedInstance {
    pub fn inner_n(&self) -> usize {
        self.inner.spec.vertex_count()
    }

    pub fn outer_n(&self) -> usize {
        self.outer.spec.vertex_count()
    }

    pub fn copy_vertex(&self, copy: Vertex, v: Vertex) -> Vertex {
        copy * self.inner_n() + v
    }

    /// Interior vertex `k` (0-based) of the subdivided path of edge `e`.
    pub fn subdivision_vertex(&self, e: usize, k: usize) -> Vertex {
        self.outer_n() * self.inner_n() + e * (self.z - 1) + k
    }

    pub fn vertex_count(&self) -> usize {
        self.outer_n() * self.inner_n() + self.outer_edges.len() * self.z.saturating_sub(1)
    }

    pub fn vertex_origin(&self, v: Vertex) -> Option<Origin> {
        if v >= self.vertex_count() {
            return None;
        }
        let base = self.outer_n() * self.inner_n();
        Some(if v < base {
            Origin::Inner { copy: v / self.inner_n(), vertex: v % self.inner_n() }
        } else {
            let k = v - base;
            Origin::Subdivision { outer_edge: k / (self.z - 1), position: k % (self.z - 1) + 1 }
        })
    }

    /// Subdivided path of outer edge `e`, from its lower copy to its upper one.
    pub fn subdivided_path(&self, e: usize) -> Vec<Vertex> {
        let oe = self.outer_edges[e];
        let p = &self.inner.pairs[oe.inner_pair];
        let mut path = vec![self.copy_vertex(oe.a, p.t)];
        path.extend((0..self.z - 1).map(|k| self.subdivision_vertex(e, k)));
        path.push(self.copy_vertex(oe.b, p.s));
        path
    }

    /// Copies and subdivided paths along a walk. Edges inside a copy count
    /// towards that copy; edges of a subdivided path towards the path.
    pub fn legs(&self, path: &[Vertex]) -> Vec<Leg> {
        let n_i = self.inner_n();
        let mut legs: Vec<Leg> = Vec::new();
        for w in path.windows(2) {
            let leg = match (self.vertex_origin(w[0]), self.vertex_origin(w[1])) {
                (Some(Origin::Inner { copy: a, .. }), Some(Origin::Inner { copy: b, .. })) if a == b => Leg::Copy(a),
                (Some(Origin::Subdivision { outer_edge, .. }), _) | (_, Some(Origin::Subdivision { outer_edge, .. })) => {
                    Leg::Subdivided(outer_edge)
                }
                // a direct port-to-port edge when z = 1
                _ => {
                    let (a, b) = (w[0].min(w[1]) / n_i, w[0].max(w[1]) / n_i);
                    match self.outer_edges.iter().position(|oe| oe.a == a && oe.b == b) {
                        Some(e) => Leg::Subdivided(e),
                        None => Leg::Copy(a),
                    }
                }
            };
            if legs.last() != Some(&leg) {
                legs.push(leg);
            }
        }
        legs
    }
}

/// Replaces each outer node by a copy of the inner graph and each outer
/// edge `(u, u + v)` by a path of `z = |V_I| / |P_I|` edges from the
/// target of `phi(v)` in copy `u` to its source in copy `u + v`. With
/// `prune`, a copy keeps only the inner paths its outgoing edges use.
pub fn compose(outer: &BaseGraph, inner: &BaseGraph, phi: &Phi, prune: bool) -> Result<ComposedInstance> {
    let n_i = inner.spec.vertex_count();
    let p_i = inner.pairs.len();
    if p_i == 0 || !n_i.is_multiple_of(p_i) {
        let nearest = if p_i == 0 { 0 } else { ((n_i as f64 / p_i as f64).round() as usize).max(1) * p_i };
        return Err(Error::NonIntegralZ { vertices: n_i, pairs: p_i, nearest });
    }
    let z = n_i / p_i;
    if phi.map.len() != outer.spec.vectors.len() {
        return Err(Error::CardinalityMismatch(format!(
            "map covers {} vectors, outer set has {}",
            phi.map.len(),
            outer.spec.vectors.len()
        )));
    }
    let mut targets = HashSet::new();
    for (i, m) in phi.map.iter().enumerate() {
        match m {
            None => {
                return Err(Error::CardinalityMismatch(format!(
                    "outer vector {i} has no inner pair; build the outer graph from the restricted set"
                )))
            }
            Some(p) if *p >= p_i || !targets.insert(*p) => {
                return Err(Error::CardinalityMismatch(format!("inner pair {p} is not a distinct valid index")))
            }
            Some(_) => {}
        }
    }

    let mut owner: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    for p in &outer.pairs {
        for w in p.path.windows(2) {
            let key = (w[0].min(w[1]), w[0].max(w[1]));
            if owner.insert(key, p.vector_index).is_some() {
                return Err(Error::InvariantViolation(format!("outer canonical paths share edge {key:?}")));
            }
        }
    }
    let mut outer_edges = Vec::with_capacity(outer.graph.edge_count());
    let mut edge_index = HashMap::new();
    for &(a, b, _) in outer.graph.edges() {
        let vi = *owner
            .get(&(a, b))
            .ok_or_else(|| Error::InvariantViolation(format!("outer edge ({a}, {b}) lies on no canonical path")))?;
        edge_index.insert((a, b), outer_edges.len());
        outer_edges.push(OuterEdge { a, b, vector_index: vi, inner_pair: phi.map[vi].unwrap() });
    }

    let mut inst = ComposedInstance {
        graph: Graph::default(),
        z,
        pruned: prune,
        phi: phi.clone(),
        outer: outer.clone(),
        inner: inner.clone(),
        outer_edges,
        pairs: Vec::new(),
    };
    let mut b = GraphBuilder::new(inst.vertex_count(), false);
    let mut ports = HashSet::new();
    for e in 0..inst.outer_edges.len() {
        let oe = inst.outer_edges[e];
        for (copy, side) in [(oe.a, 1u8), (oe.b, 0u8)] {
            if !ports.insert((copy, oe.inner_pair, side)) {
                let p = &inner.pairs[oe.inner_pair];
                return Err(Error::PortCollision { copy, port: if side == 0 { p.s } else { p.t } });
            }
        }
        for w in inst.subdivided_path(e).windows(2) {
            b.add_edge(w[0], w[1])?;
        }
        if prune {
            for w in inner.pairs[oe.inner_pair].path.windows(2) {
                b.add_edge(inst.copy_vertex(oe.a, w[0]), inst.copy_vertex(oe.a, w[1]))?;
            }
        }
    }
    if !prune {
        for copy in 0..inst.outer_n() {
            for &(u, v, _) in inner.graph.edges() {
                b.add_edge(inst.copy_vertex(copy, u), inst.copy_vertex(copy, v))?;
            }
        }
    }
    inst.graph = b.build();

    for (k, op) in outer.pairs.iter().enumerate() {
        let ip = phi.map[op.vector_index].unwrap();
        let inner_path = &inner.pairs[ip].path;
        let mut path = Vec::new();
        for w in op.path.windows(2) {
            path.extend(inner_path.iter().map(|&v| inst.copy_vertex(w[0], v)));
            let sub = inst.subdivided_path(edge_index[&(w[0], w[1])]);
            path.extend_from_slice(&sub[1..sub.len() - 1]);
        }
        let t = inst.copy_vertex(op.t, inner.pairs[ip].s);
        path.push(t);
        inst.pairs.push(ComposedPair {
            s: path[0],
            t,
            outer_pair: k,
            vector_index: op.vector_index,
            inner_pair: ip,
            path,
        });
    }
    Ok(inst)
}

/// Composition under [`default_phi`]. When the map trims outer vectors the
/// outer graph is rebuilt on the kept ones first.
pub fn compose_default(outer: &BaseGraph, inner: &BaseGraph, prune: bool) -> Result<ComposedInstance> {
    let set = outer.vector_set();
    let phi = default_phi(&set, inner)?;
    if phi.trimmed_outer == 0 {
        return compose(outer, inner, &phi, prune);
    }
    let (set, phi) = restrict_outer(&set, &phi);
    let rebuilt = build_outer_graph(outer.spec.x, outer.spec.y, &set)?;
    compose(&rebuilt, inner, &phi, prune)
}

/// A generated instance together with its graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bundle {
    Base(BaseGraph),
    Composed(ComposedInstance),
}

impl Bundle {
    pub fn graph(&self) -> &Graph {
        match self {
            Bundle::Base(b) => &b.graph,
            Bundle::Composed(c) => &c.graph,
        }
    }

    /// Edge list followed by the JSON sidecar.
    pub fn canonical_bytes(&self) -> Result<Vec<u8>> {
        let mut out = to_edge_list(self.graph()).into_bytes();
        out.extend(serde_json::to_vec(self)?);
        Ok(out)
    }

    pub fn fingerprint(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.canonical_bytes()?)))
    }
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let s = prefix.to_string_lossy();
    let stem = s.strip_suffix(".json").or_else(|| s.strip_suffix(".edges")).unwrap_or(&s);
    PathBuf::from(format!("{stem}.{ext}"))
}

/// Writes `<prefix>.edges` and `<prefix>.json`; returns both paths.
pub fn save_bundle(bundle: &Bundle, prefix: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    let edges = with_suffix(prefix.as_ref(), "edges");
    let json = with_suffix(prefix.as_ref(), "json");
    std::fs::write(&edges, to_edge_list(bundle.graph()))?;
    std::fs::write(&json, serde_json::to_string_pretty(bundle)?)?;
    Ok((edges, json))
}

/// Reads a bundle written by [`save_bundle`]. `prefix` may also name
/// either file.
pub fn load_bundle(prefix: impl AsRef<Path>) -> Result<Bundle> {
    let json = std::fs::read_to_string(with_suffix(prefix.as_ref(), "json"))?;
    let edges = std::fs::read_to_string(with_suffix(prefix.as_ref(), "edges"))?;
    let mut bundle: Bundle = serde_json::from_str(&json)?;
    let graph = parse_edge_list(&edges)?;
    match &mut bundle {
        Bundle::Base(b) => b.graph = graph,
        Bundle::Composed(c) => {
            c.graph = graph;
            c.inner.graph = c.inner.rebuild_graph()?;
            c.outer.graph = c.outer.rebuild_graph()?;
        }
    }
    Ok(bundle)
}

/// DOT rendering of the non-isolated part, one cluster per inner copy.
pub fn to_dot(bundle: &Bundle) -> String {
    let g = bundle.graph();
    let mut out = String::from("graph G {\n  node [shape=point];\n");
    let active: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| g.degree(v) > 0).collect();
    match bundle {
        Bundle::Base(b) => {
            for &v in &active {
                let (c, r) = b.spec.coord(v);
                let _ = writeln!(out, "  {v} [label=\"({c},{r})\"];");
            }
        }
        Bundle::Composed(inst) => {
            let mut copies: std::collections::BTreeMap<Vertex, Vec<Vertex>> = Default::default();
            for &v in &active {
                if let Some(Origin::Inner { copy, .. }) = inst.vertex_origin(v) {
                    copies.entry(copy).or_default().push(v);
                }
            }
            for (copy, members) in copies {
                let (c, r) = inst.outer.spec.coord(copy);
                let _ = writeln!(out, "  subgraph cluster_{copy} {{\n    label=\"({c},{r})\";");
                for v in members {
                    let _ = writeln!(out, "    {v};");
                }
                out.push_str("  }\n");
            }
        }
    }
    for &(u, v, _) in g.edges() {
        let _ = writeln!(out, "  {u} -- {v};");
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Small composed instance: a two-vector outer graph over the `c2` inner graph.
    Tiny,
    /// Inner graph with `c = 2`, `r_I = 4`.
    C2,
    /// Inner graph with `c = 3`, `r_I = 10`.
    C3,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Preset> {
        match s {
            "tiny" => Ok(Preset::Tiny),
            "c2" => Ok(Preset::C2),
            "c3" => Ok(Preset::C3),
            other => Err(Error::InvalidParams(format!("unknown preset {other:?}"))),
        }
    }
}

/// Inner graph on the smallest admissible grid for `(c, r_I)`.
pub fn preset_inner(c: u32, r_i: u32) -> Result<BaseGraph> {
    let (x, y) = inner_shape(c, r_i)?;
    build_inner_graph(c, r_i, x, y)
}

/// `{(1, 0), (2, 1)}` for `r = 2`, one vector per stripe.
pub fn tiny_outer_vectors() -> ConvexVectorSet {
    ConvexVectorSet {
        r: 2,
        vectors: vec![(1, 0), (2, 1)],
        psi_max: (0.5f64).atan(),
        stripes: Some(vec![vec![0], vec![1]]),
        psi2: Some(0.0),
        widened: false,
        pool_size: 2,
    }
}

pub fn tiny_instance(prune: bool) -> Result<ComposedInstance> {
    let inner = preset_inner(2, 4)?;
    let w = tiny_outer_vectors();
    let outer = build_outer_graph(8, 16, &w)?;
    let phi = default_phi(&w, &inner)?;
    compose(&outer, &inner, &phi, prune)
}

pub fn build_preset(p: Preset) -> Result<Bundle> {
    Ok(match p {
        Preset::Tiny => Bundle::Composed(tiny_instance(true)?),
        Preset::C2 => Bundle::Base(preset_inner(2, 4)?),
        Preset::C3 => Bundle::Base(preset_inner(3, 10)?),
    })
}
