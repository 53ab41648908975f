//! Shared skeleton of the recursive emulator and spanner constructions:
//! baseline, sampling, clustering, small/large cluster handling, and the
//! path-buying greedy phase.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{ceil_log2, multiplicative_spanner};
use crate::cluster::decompose;
use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, Graph, GraphBuilder, Vertex};
use crate::paths::{apsp, DistMatrix, DEFAULT_AUDIT_CAP, UNREACHABLE};
use crate::preserver::{consistent_shortest_path, PathSystem};
use crate::schedule::{alpha_for_depth, radius_for, rational_string, Kind, Rational};

/// Procedure applied at recursion depth 0. It receives a connected graph
/// and must return a graph on the same vertex set.
pub type BaseProcedure = Arc<dyn Fn(&Graph) -> Result<Graph> + Send + Sync>;

#[derive(Clone, Default)]
pub enum RecursionBase {
    /// Return the input graph itself (distortion 0).
    #[default]
    Exact,
    Custom(BaseProcedure),
}

impl fmt::Debug for RecursionBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecursionBase::Exact => f.write_str("Exact"),
            RecursionBase::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SparsifierConfig {
    pub eps: f64,
    /// Top-level radius; nested levels always use the schedule.
    pub r_override: Option<u32>,
    /// Top-level `r_hat`; nested levels compute their own.
    pub r_hat_override: Option<u32>,
    /// Top-level base exponent; defaults to the schedule value for the depth.
    pub alpha: Option<Rational>,
    pub sampling_constant: f64,
    pub c_hat: f64,
    pub greedy_stop_multiplier: u32,
    pub prefix_err_multiplier: u32,
    pub seed: u64,
    pub depth: u32,
    /// Spanner small-cluster test `|C|^3 log^6 n <= r^4` (true) or
    /// `|C|^3 <= r^4` (false).
    pub small_cluster_log_factor: bool,
    pub audit_cap: usize,
    #[serde(skip)]
    pub recursion_base: RecursionBase,
}

impl SparsifierConfig {
    pub fn new(kind: Kind) -> Self {
        SparsifierConfig {
            eps: 0.1,
            r_override: None,
            r_hat_override: None,
            alpha: None,
            sampling_constant: 4.0,
            c_hat: 3.0,
            greedy_stop_multiplier: kind.default_stop_multiplier(),
            prefix_err_multiplier: 1,
            seed: 0,
            depth: 1,
            small_cluster_log_factor: true,
            audit_cap: DEFAULT_AUDIT_CAP,
            recursion_base: RecursionBase::Exact,
        }
    }

    pub fn emulator() -> Self {
        Self::new(Kind::Emulator)
    }

    pub fn spanner() -> Self {
        Self::new(Kind::Spanner)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidEps(self.eps));
        }
        if let Some(a) = self.alpha {
            if a <= Rational::from_integer(0) || a >= Rational::from_integer(1) {
                return Err(Error::InvalidAlpha(format!("{a} not in (0, 1)")));
            }
        }
        if self.greedy_stop_multiplier < 1 || self.prefix_err_multiplier < 1 {
            return Err(Error::InvalidConfig("multipliers must be >= 1".into()));
        }
        if 2 * self.prefix_err_multiplier >= self.greedy_stop_multiplier {
            return Err(Error::InvalidConfig(format!(
                "greedy rounds need 2 * prefix multiplier ({}) below the stop multiplier ({})",
                2 * self.prefix_err_multiplier,
                self.greedy_stop_multiplier
            )));
        }
        if !(self.sampling_constant > 0.0) || !(self.c_hat >= 0.0) {
            return Err(Error::InvalidConfig("sampling constant must be positive and c_hat non-negative".into()));
        }
        if matches!(self.r_override, Some(0)) || matches!(self.r_hat_override, Some(0)) {
            return Err(Error::InvalidConfig("radius overrides must be positive".into()));
        }
        Ok(())
    }

    fn nested(&self, salt: u64) -> SparsifierConfig {
        let mut c = self.clone();
        c.depth = self.depth - 1;
        c.r_override = None;
        c.r_hat_override = None;
        c.alpha = None;
        c.seed = self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt + 1);
        c
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub baseline_edges: usize,
    pub small_cluster_edges: usize,
    pub recursive_edges: usize,
    pub greedy_edges: usize,
    pub greedy_rounds: usize,
    pub small_cluster_paths: usize,
    pub greedy_paths: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingReport {
    pub probability: f64,
    pub sampled: usize,
    /// Vertices with no sampled vertex within distance `r` although their
    /// component has more than `r` vertices.
    pub uncovered_within_r: usize,
}

/// One executed level of the recursion (depth >= 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub depth: u32,
    pub vertices: usize,
    pub input_edges: usize,
    pub alpha: String,
    pub r: u32,
    pub r_hat: u32,
    pub clusters: usize,
    pub small_clusters: usize,
    pub large_clusters: usize,
    pub output_edges: usize,
    pub stop_threshold: u64,
    pub max_distortion: u64,
}

#[derive(Clone, Debug)]
pub(crate) struct LevelOutput {
    pub graph: Graph,
    pub paths: PathSystem,
    pub stats: PhaseStats,
    pub sampling: Option<SamplingReport>,
    pub levels: Vec<LevelRecord>,
    pub r: u32,
    pub r_hat: u32,
    pub alpha: Option<Rational>,
    pub max_distortion: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyStats {
    pub rounds: usize,
    pub edges_added: usize,
    pub paths_added: usize,
}

pub(crate) fn sample_vertices(n: usize, probability: f64, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen::<f64>() < probability).collect()
}

fn sampling_report(g: &Graph, dg: &DistMatrix, sampled: &[bool], r: u32, probability: f64) -> SamplingReport {
    let n = g.vertex_count();
    let comp = g.components();
    let mut comp_size = vec![0usize; n];
    for &c in &comp {
        comp_size[c] += 1;
    }
    let uncovered = (0..n)
        .filter(|&v| comp_size[comp[v]] > r as usize)
        .filter(|&v| !(0..n).any(|u| sampled[u] && dg.raw(v, u) <= r))
        .count();
    SamplingReport { probability, sampled: sampled.iter().filter(|&&b| b).count(), uncovered_within_r: uncovered }
}

fn base_case(g: &Graph, kind: Kind, cfg: &SparsifierConfig) -> Result<Graph> {
    let out = match &cfg.recursion_base {
        RecursionBase::Exact => g.clone(),
        RecursionBase::Custom(f) => f(g)?,
    };
    if out.vertex_count() != g.vertex_count() {
        return Err(Error::VertexSetMismatch(g.vertex_count(), out.vertex_count()));
    }
    if kind == Kind::Spanner {
        if let Some((u, v)) = crate::distortion::first_non_subgraph_edge(g, &out) {
            return Err(Error::NotSubgraph(u, v));
        }
    }
    Ok(out)
}

fn is_small(kind: Kind, size: usize, r: u32, log_n: u32, log_factor: bool) -> bool {
    let (c, r, l) = (size as u128, r as u128, log_n as u128);
    match kind {
        Kind::Emulator => c * l * l <= r * r,
        Kind::Spanner if log_factor => c.pow(3) * l.pow(6) <= r.pow(4),
        Kind::Spanner => c.pow(3) <= r.pow(4),
    }
}

pub(crate) fn r_hat_for(r: u32, n: usize, c_hat: f64, eps: f64) -> u32 {
    ((r as f64) * (n as f64).powf(c_hat * eps) - 1e-9).ceil().max(1.0) as u32
}

pub(crate) fn build_level(g: &Graph, kind: Kind, cfg: &SparsifierConfig) -> Result<LevelOutput> {
    cfg.validate()?;
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::InvalidConfig(format!("need at least two vertices, got {n}")));
    }
    if cfg.depth == 0 {
        let out = base_case(g, kind, cfg)?;
        return Ok(LevelOutput {
            graph: out,
            paths: PathSystem::default(),
            stats: PhaseStats::default(),
            sampling: None,
            levels: Vec::new(),
            r: 0,
            r_hat: 0,
            alpha: None,
            max_distortion: 0,
        });
    }
    let alpha = cfg.alpha.unwrap_or_else(|| alpha_for_depth(kind, cfg.depth));
    let r = match cfg.r_override {
        Some(r) => r,
        None => radius_for(kind, n, alpha)?,
    };
    let log_n = ceil_log2(n);
    let dg = apsp(g, cfg.audit_cap)?;
    let mut h = GraphBuilder::new(n, kind == Kind::Emulator);
    let mut stats = PhaseStats::default();
    let mut paths = PathSystem::default();

    for &(u, v, _) in multiplicative_spanner(g, log_n).edges() {
        if h.add_weighted_edge(u, v, 1)? {
            stats.baseline_edges += 1;
        }
    }

    let probability = (cfg.sampling_constant * (n as f64).ln() / r as f64).min(1.0);
    let sampled = sample_vertices(n, probability, cfg.seed);
    let sampling = sampling_report(g, &dg, &sampled, r, probability);

    let decomposition = decompose(g, r, cfg.eps)?;
    let r_hat = cfg.r_hat_override.unwrap_or_else(|| r_hat_for(r, n, cfg.c_hat, cfg.eps));
    log::debug!(
        "{} level depth={} n={} r={} r_hat={} clusters={}",
        kind.name(),
        cfg.depth,
        n,
        r,
        r_hat,
        decomposition.centers.len()
    );

    let mut large = Vec::new();
    let mut small_count = 0;
    for (i, cluster) in decomposition.clusters.iter().enumerate() {
        if !is_small(kind, cluster.len(), r, log_n, cfg.small_cluster_log_factor) {
            large.push(i);
            continue;
        }
        small_count += 1;
        let members: Vec<Vertex> = cluster.iter().copied().filter(|&v| sampled[v]).collect();
        match kind {
            Kind::Emulator => {
                for (a, &s) in members.iter().enumerate() {
                    for &t in &members[a + 1..] {
                        let w = dg.raw(s, t);
                        if h.add_weighted_edge(s, t, w)? {
                            stats.small_cluster_edges += 1;
                        }
                    }
                }
            }
            Kind::Spanner => {
                let core = &decomposition.cores[i];
                let (sub, map) = induced_subgraph(g, cluster)?;
                for &s in core.iter().filter(|&&v| sampled[v]) {
                    for &t in &members {
                        // pairs with both ends in the core are handled once
                        let both_core = core.binary_search(&t).is_ok();
                        if t == s || (both_core && t < s) || dg.raw(s, t) > r {
                            continue;
                        }
                        let ls = cluster.binary_search(&s).unwrap();
                        let lt = cluster.binary_search(&t).unwrap();
                        let local = consistent_shortest_path(&sub, ls, lt)?;
                        let path: Vec<Vertex> = local.iter().map(|&x| map[x]).collect();
                        if path.len() as u32 - 1 != dg.raw(s, t) {
                            return Err(Error::InvariantViolation(format!(
                                "cluster path {s}-{t} is not shortest in the host graph"
                            )));
                        }
                        for w in path.windows(2) {
                            if h.add_edge(w[0], w[1])? {
                                stats.small_cluster_edges += 1;
                            }
                        }
                        stats.small_cluster_paths += 1;
                        paths.push(path);
                    }
                }
            }
        }
    }

    let nested: Vec<(usize, LevelOutput)> = large
        .par_iter()
        .filter(|&&i| decomposition.clusters[i].len() >= 2)
        .map(|&i| {
            let (sub, _) = induced_subgraph(g, &decomposition.clusters[i])?;
            build_level(&sub, kind, &cfg.nested(i as u64)).map(|out| (i, out))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut levels = Vec::new();
    for (i, out) in nested {
        let map = &decomposition.clusters[i];
        for &(u, v, _) in out.graph.edges() {
            let (a, b) = (map[u], map[v]);
            // nested weights come from the cluster metric; the global one is
            // never larger and keeps the no-undershoot contract
            let w = if kind == Kind::Emulator { dg.raw(a, b) } else { 1 };
            if h.add_weighted_edge(a, b, w)? {
                stats.recursive_edges += 1;
            }
        }
        levels.extend(out.levels);
    }

    let mut dh = apsp(&h.clone().build(), cfg.audit_cap)?;
    let params = GreedyParams {
        r_hat,
        stop_multiplier: cfg.greedy_stop_multiplier,
        prefix_multiplier: cfg.prefix_err_multiplier,
    };
    let greedy = greedy_phase(g, &dg, &mut h, &mut dh, params, kind, &mut paths)?;
    stats.greedy_edges = greedy.edges_added;
    stats.greedy_rounds = greedy.rounds;
    stats.greedy_paths = greedy.paths_added;

    let graph = h.build();
    let max_distortion = max_gap(&dg, &dh)?;
    levels.insert(
        0,
        LevelRecord {
            depth: cfg.depth,
            vertices: n,
            input_edges: g.edge_count(),
            alpha: rational_string(&alpha),
            r,
            r_hat,
            clusters: decomposition.centers.len(),
            small_clusters: small_count,
            large_clusters: large.len(),
            output_edges: graph.edge_count(),
            stop_threshold: params.threshold(),
            max_distortion,
        },
    );
    Ok(LevelOutput {
        graph,
        paths,
        stats,
        sampling: Some(sampling),
        levels,
        r,
        r_hat,
        alpha: Some(alpha),
        max_distortion,
    })
}

fn max_gap(dg: &DistMatrix, dh: &DistMatrix) -> Result<u64> {
    let n = dg.vertex_count();
    let mut best = 0u64;
    for s in 0..n {
        for t in s + 1..n {
            let (a, b) = (dg.raw(s, t), dh.raw(s, t));
            if a == UNREACHABLE {
                continue;
            }
            if b == UNREACHABLE {
                return Err(Error::Disconnected(s, t));
            }
            if b < a {
                return Err(Error::Undershoot(s, t, b as u64, a as u64));
            }
            best = best.max((b - a) as u64);
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyParams {
    pub r_hat: u32,
    pub stop_multiplier: u32,
    pub prefix_multiplier: u32,
}

impl GreedyParams {
    pub fn threshold(&self) -> u64 {
        self.stop_multiplier as u64 * self.r_hat as u64
    }

    fn slack(&self) -> u64 {
        self.prefix_multiplier as u64 * self.r_hat as u64
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.prefix_multiplier < 1 || 2 * self.prefix_multiplier >= self.stop_multiplier {
            return Err(Error::InvalidConfig("need 1 <= prefix multiplier and 2 * prefix < stop multiplier".into()));
        }
        Ok(())
    }
}

/// Largest `i` such that every pair inside `path[..=i]` satisfies
/// `d_H <= d_G + slack`, where `d_G` along a shortest path is the index gap.
/// Extending a violating prefix cannot repair it, so the scan stops at the
/// first failure.
fn prefix_end(path: &[Vertex], dh: &DistMatrix, slack: u64) -> usize {
    let mut i = 0;
    'extend: while i + 1 < path.len() {
        let next = path[i + 1];
        for (a, &u) in path[..=i].iter().enumerate() {
            let d = dh.raw(u, next);
            if d == UNREACHABLE || d as u64 > (i + 1 - a) as u64 + slack {
                break 'extend;
            }
        }
        i += 1;
    }
    i
}

/// Repeated lexicographic passes over pairs `s < t`. A pair with
/// `d_H > d_G + stop * r_hat` is repaired by buying the middle part of its
/// consistent shortest path: a weighted edge (emulator) or the subpath
/// itself (spanner).
pub(crate) fn greedy_phase(
    g: &Graph,
    dg: &DistMatrix,
    h: &mut GraphBuilder,
    dh: &mut DistMatrix,
    params: GreedyParams,
    kind: Kind,
    paths: &mut PathSystem,
) -> Result<GreedyStats> {
    params.check()?;
    let n = g.vertex_count();
    let threshold = params.threshold();
    let slack = params.slack();
    let mut stats = GreedyStats { rounds: 0, edges_added: 0, paths_added: 0 };
    loop {
        let mut clean = true;
        for s in 0..n {
            for t in s + 1..n {
                let d = dg.raw(s, t);
                if d == UNREACHABLE {
                    continue;
                }
                let cur = dh.raw(s, t);
                if cur != UNREACHABLE && cur as u64 <= d as u64 + threshold {
                    continue;
                }
                clean = false;
                stats.rounds += 1;
                if stats.rounds > n * n {
                    return Err(Error::NonterminationGuard(stats.rounds));
                }
                let pi = consistent_shortest_path(g, s, t)?;
                let last = pi.len() - 1;
                let i = prefix_end(&pi, dh, slack);
                let mut rev = pi.clone();
                rev.reverse();
                let j = last - prefix_end(&rev, dh, slack);
                if i >= j {
                    return Err(Error::InvariantViolation(format!(
                        "pair ({s}, {t}) violates the threshold yet its prefix and suffix overlap"
                    )));
                }
                let (x, y) = (pi[i], pi[j]);
                match kind {
                    Kind::Emulator => {
                        let w = (j - i) as u32;
                        if h.add_weighted_edge(x, y, w)? {
                            stats.edges_added += 1;
                        }
                        dh.insert_edge(x, y, w);
                    }
                    Kind::Spanner => {
                        let segment = consistent_shortest_path(g, x, y)?;
                        if segment[..] != pi[i..=j] {
                            return Err(Error::InvariantViolation(format!(
                                "subpath ({x}, {y}) of a consistent path is not the consistent path"
                            )));
                        }
                        for e in segment.windows(2) {
                            if h.add_edge(e[0], e[1])? {
                                stats.edges_added += 1;
                                dh.insert_edge(e[0], e[1], 1);
                            }
                        }
                        stats.paths_added += 1;
                        paths.push(segment);
                    }
                }
                let after = dh.raw(s, t);
                if after == UNREACHABLE || after as u64 > d as u64 + 2 * slack {
                    return Err(Error::InvariantViolation(format!(
                        "pair ({s}, {t}) still at distance {after} after its round (d_G = {d})"
                    )));
                }
            }
        }
        if clean {
            return Ok(stats);
        }
    }
}

/// Runs the greedy phase alone on a prepared `h` (which must live on the
/// vertex set of `g`); returns the grown graph, the inserted paths
/// (spanner mode) and the round statistics.
pub fn run_greedy_phase(
    g: &Graph,
    h: &Graph,
    params: GreedyParams,
    kind: Kind,
    cap: usize,
) -> Result<(Graph, PathSystem, GreedyStats)> {
    if g.vertex_count() != h.vertex_count() {
        return Err(Error::VertexSetMismatch(g.vertex_count(), h.vertex_count()));
    }
    if kind == Kind::Spanner {
        if let Some((u, v)) = crate::distortion::first_non_subgraph_edge(g, h) {
            return Err(Error::NotSubgraph(u, v));
        }
    }
    let dg = apsp(g, cap)?;
    let mut dh = apsp(h, cap)?;
    let mut builder = GraphBuilder::from_graph(h);
    if kind == Kind::Emulator && !h.is_weighted() {
        builder = GraphBuilder::new(h.vertex_count(), true);
        for &(u, v, w) in h.edges() {
            builder.add_weighted_edge(u, v, w)?;
        }
    }
    let mut paths = PathSystem::default();
    let stats = greedy_phase(g, &dg, &mut builder, &mut dh, params, kind, &mut paths)?;
    Ok((builder.build(), paths, stats))
}
