//! Ball cluster decomposition with coverage and low overlap.
//!
//! Every vertex `v` first picks a growth radius `rho_v = r * q^j` (with
//! `q = max(4, ceil(n^eps))`): the smallest level `j` at which the ball
//! stops expanding quickly, `|B(v, 4 rho)| <= ceil(n^eps) * |B(v, rho)|`.
//! Such a level exists within `ceil(1/eps)` steps because each failure
//! multiplies the ball size by more than `n^eps`.
//!
//! Centers are then chosen greedily by decreasing `rho`, keeping a vertex
//! only if its kernel `B(v, rho_v)` is disjoint from all chosen kernels.
//! A rejected vertex `u` meets a chosen kernel of radius `rho_v >= rho_u`,
//! so `d(u, v) <= 2 rho_v`: cores `B(v, 2 rho_v)` cover `V`. Clusters are
//! `B(v, 4 rho_v)`, and disjoint kernels give
//! `sum |cluster| <= ceil(n^eps) * sum |kernel| <= ceil(n^eps) * n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::paths::{ball, bfs_bounded, sssp};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterDecomposition {
    pub r: u32,
    pub eps: f64,
    pub centers: Vec<Vertex>,
    /// Core radii `r_i`; clusters use `2 r_i`.
    pub radii: Vec<u32>,
    /// Growth level `j` of each center.
    pub levels: Vec<u32>,
    pub cores: Vec<Vec<Vertex>>,
    pub clusters: Vec<Vec<Vertex>>,
    /// Index of the first cluster whose core contains the vertex.
    pub core_of: Vec<usize>,
    /// Kernel sizes `|B(v_i, rho_i)|`; kernels are pairwise disjoint.
    pub kernel_sizes: Vec<usize>,
    /// Achieved radius exponent: `max r_i <= r * n^(kappa * eps)`.
    pub kappa: f64,
    /// `sum |cluster| / n`.
    pub overlap_constant: f64,
}

/// `ceil(n^eps)` computed so that exact powers are not pushed up by
/// rounding noise.
pub fn ceil_pow(n: usize, eps: f64) -> u64 {
    let x = (n.max(1) as f64).powf(eps);
    let c = x.ceil();
    if c - x > 1.0 - 1e-9 {
        x.round() as u64
    } else {
        c as u64
    }
}

fn validate(r: u32, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidEps(eps));
    }
    if r == 0 {
        return Err(Error::InvalidParams("cluster radius must be >= 1".into()));
    }
    Ok(())
}

pub fn decompose(g: &Graph, r: u32, eps: f64) -> Result<ClusterDecomposition> {
    validate(r, eps)?;
    let n = g.vertex_count();
    let expand = ceil_pow(n, eps);
    let q = expand.max(4);
    let max_level = (1.0 / eps).ceil() as u32;
    let cap = n.max(1) as u64;
    let radius_at = |j: u32| -> u32 { (r as u64).saturating_mul(q.saturating_pow(j)).min(cap * 4) as u32 };

    // growth level of every vertex
    let mut rho = vec![0u32; n];
    let mut level = vec![0u32; n];
    for v in 0..n {
        let d = sssp(g, v);
        let mut hist: Vec<usize> = Vec::new();
        for x in d.raw() {
            if *x != crate::paths::UNREACHABLE {
                let x = *x as usize;
                if hist.len() <= x {
                    hist.resize(x + 1, 0);
                }
                hist[x] += 1;
            }
        }
        let mut cum = hist;
        for i in 1..cum.len() {
            cum[i] += cum[i - 1];
        }
        let within = |radius: u32| -> u64 { cum[(radius as usize).min(cum.len() - 1)] as u64 };
        let mut chosen = max_level;
        for j in 0..=max_level {
            let p = radius_at(j);
            if within(p.saturating_mul(4)) <= expand * within(p) {
                chosen = j;
                break;
            }
        }
        level[v] = chosen;
        rho[v] = radius_at(chosen);
    }

    // disjoint kernels, largest radius first
    let mut order: Vec<Vertex> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(rho[v]), v));
    let mut in_kernel = vec![false; n];
    let mut picked: Vec<Vertex> = Vec::new();
    let mut kernel_sizes = Vec::new();
    for &v in &order {
        if in_kernel[v] {
            continue;
        }
        let kernel = ball(g, v, rho[v]);
        if kernel.iter().any(|&u| in_kernel[u]) {
            continue;
        }
        for &u in &kernel {
            in_kernel[u] = true;
        }
        kernel_sizes.push(kernel.len());
        picked.push(v);
    }

    let mut centers = Vec::with_capacity(picked.len());
    let mut radii = Vec::with_capacity(picked.len());
    let mut levels = Vec::with_capacity(picked.len());
    let mut cores = Vec::with_capacity(picked.len());
    let mut clusters = Vec::with_capacity(picked.len());
    let mut core_of = vec![usize::MAX; n];
    for (i, &v) in picked.iter().enumerate() {
        let ri = 2 * rho[v];
        let d = bfs_bounded(g, v, 2 * ri);
        let core: Vec<Vertex> = (0..n).filter(|&u| d.get(u).is_some_and(|x| x <= ri)).collect();
        let cluster: Vec<Vertex> = (0..n).filter(|&u| d.get(u).is_some()).collect();
        for &u in &core {
            if core_of[u] == usize::MAX {
                core_of[u] = i;
            }
        }
        centers.push(v);
        radii.push(ri);
        levels.push(level[v]);
        cores.push(core);
        clusters.push(cluster);
    }
    if let Some(u) = core_of.iter().position(|&c| c == usize::MAX) {
        return Err(Error::InvariantViolation(format!("vertex {u} left uncovered")));
    }

    let max_r = radii.iter().copied().max().unwrap_or(r);
    let kappa = if n > 1 && max_r > r {
        (max_r as f64 / r as f64).ln() / (eps * (n as f64).ln())
    } else {
        0.0
    };
    let total: usize = clusters.iter().map(Vec::len).sum();
    let d = ClusterDecomposition {
        r,
        eps,
        centers,
        radii,
        levels,
        cores,
        clusters,
        core_of,
        kernel_sizes,
        kappa,
        overlap_constant: if n == 0 { 0.0 } else { total as f64 / n as f64 },
    };
    let report = verify_decomposition(g, &d, r, eps);
    if !report.all_ok() {
        return Err(Error::InvariantViolation(format!("decomposition failed its own audit: {report:?}")));
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    /// Vertices not in the core of the cluster `core_of` names.
    pub coverage_violations: Vec<Vertex>,
    /// `(cluster index, "core" | "cluster")` where the stored set differs
    /// from the exact ball.
    pub ball_mismatches: Vec<(usize, String)>,
    pub radius_violations: Vec<usize>,
    pub distinct_levels: usize,
    pub level_bound: usize,
    pub overlap_sum: usize,
    pub overlap_constant: f64,
    /// `ceil(n^eps)`
    pub overlap_bound: u64,
    /// `sum |cluster| <= ceil(n^eps) * sum |kernel|` with disjoint kernels
    pub charging_ok: bool,
}

impl DecompositionReport {
    pub fn all_ok(&self) -> bool {
        self.coverage_violations.is_empty()
            && self.ball_mismatches.is_empty()
            && self.radius_violations.is_empty()
            && self.distinct_levels <= self.level_bound
            && self.overlap_constant <= self.overlap_bound as f64
            && self.charging_ok
    }
}

/// Recomputes every core and cluster as an exact ball and checks the
/// coverage, radius range and overlap guarantees. Violations are listed,
/// never raised.
pub fn verify_decomposition(g: &Graph, d: &ClusterDecomposition, r: u32, eps: f64) -> DecompositionReport {
    let n = g.vertex_count();
    let k = d.centers.len();
    let mut ball_mismatches = Vec::new();
    let mut radius_violations = Vec::new();
    // a one-vertex graph has n^x = 1 for every x, so only the base core
    // radius 2r is accepted there
    let radius_cap = if n <= 1 {
        2.0 * r as f64
    } else {
        (r as f64) * (n as f64).powf(d.kappa * eps) * (1.0 + 1e-9)
    };
    for i in 0..k {
        let ri = d.radii.get(i).copied().unwrap_or(0);
        if ri < r || ri as f64 > radius_cap {
            radius_violations.push(i);
        }
        let exact = bfs_bounded(g, d.centers[i], 2 * ri);
        let core: Vec<Vertex> = (0..n).filter(|&u| exact.get(u).is_some_and(|x| x <= ri)).collect();
        let cluster: Vec<Vertex> = (0..n).filter(|&u| exact.get(u).is_some()).collect();
        if d.cores.get(i) != Some(&core) {
            ball_mismatches.push((i, "core".to_string()));
        }
        if d.clusters.get(i) != Some(&cluster) {
            ball_mismatches.push((i, "cluster".to_string()));
        }
    }
    let coverage_violations: Vec<Vertex> = (0..n)
        .filter(|&v| {
            d.core_of
                .get(v)
                .and_then(|&c| d.cores.get(c))
                .is_none_or(|core| core.binary_search(&v).is_err())
        })
        .collect();
    let mut lv = d.levels.clone();
    lv.sort_unstable();
    lv.dedup();
    let overlap_sum: usize = d.clusters.iter().map(Vec::len).sum();
    let expand = ceil_pow(n, eps);
    let kernel_total: usize = d.kernel_sizes.iter().sum();
    DecompositionReport {
        coverage_violations,
        ball_mismatches,
        radius_violations,
        distinct_levels: lv.len(),
        level_bound: (1.0 / eps).ceil() as usize + 1,
        overlap_sum,
        overlap_constant: if n == 0 { 0.0 } else { overlap_sum as f64 / n as f64 },
        overlap_bound: expand,
        charging_ok: kernel_total <= n && overlap_sum as u64 <= expand * kernel_total as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn rejects_bad_eps() {
        let g = gen::path(3).unwrap();
        assert_eq!(decompose(&g, 1, 0.0), Err(Error::InvalidEps(0.0)));
        assert_eq!(decompose(&g, 1, 1.0), Err(Error::InvalidEps(1.0)));
    }

    #[test]
    fn single_vertex() {
        let g = Graph::empty(1);
        let d = decompose(&g, 1, 0.5).unwrap();
        assert_eq!(d.cores, vec![vec![0]]);
        assert_eq!(d.clusters, vec![vec![0]]);
        assert_eq!(d.core_of, vec![0]);
    }

    #[test]
    fn two_triangles() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let d = decompose(&g, 1, 0.5).unwrap();
        let rep = verify_decomposition(&g, &d, 1, 0.5);
        assert!(rep.all_ok(), "{rep:?}");
        assert!(rep.overlap_sum as u64 <= 6 * rep.overlap_bound);
        for v in 0..6 {
            assert!(d.cores[d.core_of[v]].contains(&v));
        }
    }

    #[test]
    fn path_100_levels() {
        let g = gen::path(100).unwrap();
        let (r, eps) = (5, 0.25);
        let d = decompose(&g, r, eps).unwrap();
        // q = max(4, ceil(100^0.25)) = 4, core radius 2 r q^j
        for (&ri, &j) in d.radii.iter().zip(&d.levels) {
            assert_eq!(ri, 2 * r * 4u32.pow(j));
        }
        for v in 0..100 {
            let c = d.core_of[v];
            let dist = (v as i64 - d.centers[c] as i64).unsigned_abs() as u32;
            assert!(dist <= d.radii[c]);
        }
        assert!(verify_decomposition(&g, &d, r, eps).all_ok());
    }

    #[test]
    fn mutations_are_flagged() {
        let g = gen::gnm(80, 160, 5).unwrap();
        let d = decompose(&g, 2, 0.3).unwrap();
        assert!(verify_decomposition(&g, &d, 2, 0.3).all_ok());

        let mut m = d.clone();
        let v = m.centers[0];
        m.cores[0].retain(|&u| u != v);
        let rep = verify_decomposition(&g, &m, 2, 0.3);
        assert!(rep.coverage_violations.contains(&v));
        assert!(rep.ball_mismatches.contains(&(0, "core".into())));

        let mut m = d.clone();
        m.clusters[0] = ball(&g, m.centers[0], 3 * m.radii[0]);
        let rep = verify_decomposition(&g, &m, 2, 0.3);
        if m.clusters[0] != d.clusters[0] {
            assert!(rep.ball_mismatches.contains(&(0, "cluster".into())));
        }

        let mut m = d;
        m.radii[0] = 1;
        assert!(!verify_decomposition(&g, &m, 2, 0.3).radius_violations.is_empty());
    }

    #[test]
    fn ceil_pow_is_exact_on_powers() {
        assert_eq!(ceil_pow(16, 0.5), 4);
        assert_eq!(ceil_pow(1000, 0.2), 4);
        assert_eq!(ceil_pow(1000, 0.4), 16);
        assert_eq!(ceil_pow(100, 0.25), 4);
    }
}
