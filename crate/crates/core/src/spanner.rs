//! Recursive additive spanner: the emulator skeleton with consistent
//! shortest paths in place of weighted edges.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::Graph;
use crate::preserver::PathSystem;
use crate::schedule::{rational_string, Kind};
use crate::sparsify::{build_level, run_greedy_phase, GreedyParams, GreedyStats, LevelRecord, PhaseStats, SamplingReport, SparsifierConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpannerResult {
    pub subgraph: Graph,
    /// Paths inserted at the top level (small clusters and greedy phase).
    pub path_system: PathSystem,
    pub depth: u32,
    pub alpha: Option<String>,
    pub r: u32,
    pub r_hat: u32,
    pub stop_threshold: u64,
    pub stats: PhaseStats,
    pub sampling: Option<SamplingReport>,
    pub max_distortion: u64,
    pub levels: Vec<LevelRecord>,
}

pub fn build_spanner(g: &Graph, cfg: &SparsifierConfig) -> Result<SpannerResult> {
    let out = build_level(g, Kind::Spanner, cfg)?;
    Ok(SpannerResult {
        subgraph: out.graph.unweighted(),
        path_system: out.paths,
        depth: cfg.depth,
        alpha: out.alpha.as_ref().map(rational_string),
        r: out.r,
        r_hat: out.r_hat,
        stop_threshold: cfg.greedy_stop_multiplier as u64 * out.r_hat as u64,
        stats: out.stats,
        sampling: out.sampling,
        max_distortion: out.max_distortion,
        levels: out.levels,
    })
}

/// Greedy phase alone, starting from subgraph `h`. Returns the grown
/// subgraph, the inserted paths and the round statistics.
pub fn spanner_greedy_phase(
    g: &Graph,
    h: &Graph,
    r_hat: u32,
    stop_multiplier: u32,
    prefix_multiplier: u32,
    cap: usize,
) -> Result<(Graph, PathSystem, GreedyStats)> {
    let params = GreedyParams { r_hat, stop_multiplier, prefix_multiplier };
    run_greedy_phase(g, h, params, Kind::Spanner, cap)
}
