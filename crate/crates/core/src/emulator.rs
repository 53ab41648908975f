//! Recursive additive emulator: baseline spanner, sampled weighted edges
//! inside small clusters, recursion inside large clusters, then greedy
//! path buying with weighted shortcut edges.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::Graph;
use crate::schedule::{rational_string, Kind};
use crate::sparsify::{build_level, run_greedy_phase, GreedyParams, GreedyStats, LevelRecord, PhaseStats, SamplingReport, SparsifierConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Emulator {
    pub host_n: usize,
    /// Weighted graph on the host vertex set; every weight is the exact
    /// host distance of its endpoints.
    pub graph: Graph,
    pub depth: u32,
    pub alpha: Option<String>,
    pub r: u32,
    pub r_hat: u32,
    pub stop_threshold: u64,
    pub stats: PhaseStats,
    pub sampling: Option<SamplingReport>,
    /// Measured `max (d_H - d_G)` at the end of the top level.
    pub max_distortion: u64,
    pub levels: Vec<LevelRecord>,
}

impl Emulator {
    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }
}

pub fn build_emulator(g: &Graph, cfg: &SparsifierConfig) -> Result<Emulator> {
    let out = build_level(g, Kind::Emulator, cfg)?;
    let graph = if out.graph.is_weighted() {
        out.graph
    } else {
        Graph::from_weighted_edges(g.vertex_count(), out.graph.edges().iter().copied())?
    };
    Ok(Emulator {
        host_n: g.vertex_count(),
        graph,
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

/// Greedy phase alone, starting from emulator `h`. Returns the grown
/// emulator and the number of edges added and rounds run.
pub fn emulator_greedy_phase(
    g: &Graph,
    h: &Graph,
    r_hat: u32,
    stop_multiplier: u32,
    prefix_multiplier: u32,
    cap: usize,
) -> Result<(Graph, GreedyStats)> {
    let params = GreedyParams { r_hat, stop_multiplier, prefix_multiplier };
    let (out, _, stats) = run_greedy_phase(g, h, params, Kind::Emulator, cap)?;
    Ok((out, stats))
}
