//! Seeded graph generators for desk-scale experiments.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenKind {
    Gnm { n: usize, m: usize },
    Cycle { n: usize },
    Path { n: usize },
    Grid { rows: usize, cols: usize },
    Tree { n: usize },
}

pub fn generate(kind: GenKind, seed: u64) -> Result<Graph> {
    match kind {
        GenKind::Gnm { n, m } => gnm(n, m, seed),
        GenKind::Cycle { n } => cycle(n),
        GenKind::Path { n } => path(n),
        GenKind::Grid { rows, cols } => grid(rows, cols),
        GenKind::Tree { n } => random_tree(n, seed),
    }
}

/// Uniform graph with exactly `m` distinct edges.
pub fn gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let total = n * n.saturating_sub(1) / 2;
    if m > total {
        return Err(Error::InvalidParams(format!(
            "gnm: m = {m} exceeds n(n-1)/2 = {total}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = index::sample(&mut rng, total, m).into_vec();
    picks.sort_unstable();
    // Walk the rows of the upper triangle once, decoding sorted indices.
    let mut edges = Vec::with_capacity(m);
    let mut row = 0;
    let mut row_start = 0;
    for k in picks {
        while k >= row_start + (n - 1 - row) {
            row_start += n - 1 - row;
            row += 1;
        }
        edges.push((row, row + 1 + (k - row_start)));
    }
    Graph::from_edges(n, edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("cycle needs n >= 3, got {n}")));
    }
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn path(n: usize) -> Result<Graph> {
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))
}

/// `rows x cols` grid; vertex `(i, j)` has id `i * cols + j`.
pub fn grid(rows: usize, cols: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let v = i * cols + j;
            if j + 1 < cols {
                edges.push((v, v + 1));
            }
            if i + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::from_edges(rows * cols, edges)
}

/// Random recursive tree: vertex `v > 0` attaches to a uniform earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Graph::from_edges(n, (1..n).map(|v| (rng.gen_range(0..v), v)))
}

pub fn complete(n: usize) -> Result<Graph> {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
}

/// `k` seeded pairs `(s, t)` with `s != t`, drawn independently.
pub fn random_pairs(n: usize, k: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if n < 2 && k > 0 {
        return Err(Error::InvalidParams(format!("cannot draw pairs from {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..k)
        .map(|_| {
            let s = rng.gen_range(0..n);
            let t = (s + rng.gen_range(1..n)) % n;
            (s, t)
        })
        .collect())
}
