//! Parameter sweeps over seeded random graphs, one CSV row per run.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spanlab::emulator::build_emulator;
use spanlab::gen;
use spanlab::schedule::Kind;
use spanlab::spanner::build_spanner;
use spanlab::sparsify::SparsifierConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(default)]
    pub entries: Vec<SweepEntry>,
}

/// Cartesian product of `n`, `seeds` and `depths` for one kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub kind: Kind,
    pub n: Vec<usize>,
    /// Edges per vertex of the generated `gnm` graph.
    #[serde(default = "default_density")]
    pub density: f64,
    pub seeds: Vec<u64>,
    #[serde(default = "default_depths")]
    pub depths: Vec<u32>,
    #[serde(default)]
    pub eps: Option<f64>,
}

fn default_density() -> f64 {
    4.0
}

fn default_depths() -> Vec<u32> {
    vec![1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub kind: Kind,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub depth: u32,
    pub eps: Option<f64>,
}

pub const COLUMNS: [&str; 17] = [
    "kind",
    "n",
    "m",
    "seed",
    "depth",
    "r",
    "r_hat",
    "stop_threshold",
    "baseline_edges",
    "small_cluster_edges",
    "recursive_edges",
    "greedy_edges",
    "output_edges",
    "max_distortion",
    "within_threshold",
    "runtime_ms",
    "error",
];

impl SweepConfig {
    pub fn runs(&self) -> Vec<SweepRun> {
        let mut out = Vec::new();
        for e in &self.entries {
            for &n in &e.n {
                let m = ((n as f64 * e.density).round() as usize).min(n * n.saturating_sub(1) / 2);
                for &seed in &e.seeds {
                    for &depth in &e.depths {
                        out.push(SweepRun { kind: e.kind, n, m, seed, depth, eps: e.eps });
                    }
                }
            }
        }
        out
    }
}

/// Executes one run. Failures land in the `error` column.
pub fn execute(run: &SweepRun) -> Vec<String> {
    let start = Instant::now();
    let mut row = vec![
        run.kind.name().to_string(),
        run.n.to_string(),
        run.m.to_string(),
        run.seed.to_string(),
        run.depth.to_string(),
    ];
    let result = (|| -> spanlab::Result<Vec<String>> {
        let g = gen::gnm(run.n, run.m, run.seed)?;
        let mut cfg = SparsifierConfig::new(run.kind);
        cfg.seed = run.seed;
        cfg.depth = run.depth;
        if let Some(eps) = run.eps {
            cfg.eps = eps;
        }
        let (r, r_hat, stop, stats, edges, dist) = match run.kind {
            Kind::Emulator => {
                let e = build_emulator(&g, &cfg)?;
                (e.r, e.r_hat, e.stop_threshold, e.stats, e.graph.edge_count(), e.max_distortion)
            }
            Kind::Spanner => {
                let s = build_spanner(&g, &cfg)?;
                (s.r, s.r_hat, s.stop_threshold, s.stats, s.subgraph.edge_count(), s.max_distortion)
            }
        };
        Ok(vec![
            r.to_string(),
            r_hat.to_string(),
            stop.to_string(),
            stats.baseline_edges.to_string(),
            stats.small_cluster_edges.to_string(),
            stats.recursive_edges.to_string(),
            stats.greedy_edges.to_string(),
            edges.to_string(),
            dist.to_string(),
            (dist <= stop).to_string(),
        ])
    })();
    let error = match result {
        Ok(cols) => {
            row.extend(cols);
            String::new()
        }
        Err(e) => {
            row.extend(std::iter::repeat_n(String::new(), 10));
            e.to_string()
        }
    };
    row.push(start.elapsed().as_millis().to_string());
    row.push(error);
    row
}

/// Runs every entry on up to `jobs` threads and writes rows in config order.
pub fn run_sweep<W: Write>(cfg: &SweepConfig, jobs: usize, out: W) -> std::io::Result<usize> {
    let runs = cfg.runs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(std::io::Error::other)?;
    let rows: Vec<Vec<String>> = pool.install(|| runs.par_iter().map(execute).collect());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for row in &rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_header_only() {
        let mut buf = Vec::new();
        let n = run_sweep(&SweepConfig { entries: vec![] }, 1, &mut buf).unwrap();
        assert_eq!(n, 0);
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", COLUMNS.join(",")));
    }

    #[test]
    fn cardinality_and_contract() {
        let cfg: SweepConfig = serde_json::from_str(
            r#"{"entries": [{"kind": "emulator", "n": [40, 60], "seeds": [1, 2, 3]}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.runs().len(), 6);
        let mut buf = Vec::new();
        run_sweep(&cfg, 2, &mut buf).unwrap();
        let mut rd = csv::Reader::from_reader(buf.as_slice());
        let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 6);
        for row in rows {
            assert_eq!(&row[16], "");
            let dist: u64 = row[13].parse().unwrap();
            let stop: u64 = row[7].parse().unwrap();
            assert!(dist <= stop);
        }
    }

    #[test]
    fn failures_stay_in_row() {
        let run = SweepRun { kind: Kind::Spanner, n: 5, m: 4, seed: 0, depth: 1, eps: Some(2.0) };
        let row = execute(&run);
        assert_eq!(row.len(), COLUMNS.len());
        assert!(!row[16].is_empty());
    }
}
