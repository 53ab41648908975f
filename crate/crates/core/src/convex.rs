//! Strongly convex sets of integer vectors near a circle of radius `r`,
//! and their striped variant.
//!
//! All membership and convexity predicates are exact integer arithmetic.
//! The one float in the angular tests is `tan(psi)` for a caller-given
//! angle `psi`; the vectors themselves enter only through integer cross
//! and dot products.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vector = (i64, i64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexVectorSet {
    pub r: u32,
    pub vectors: Vec<Vector>,
    /// Largest angle of a vector to the horizontal axis.
    pub psi_max: f64,
    /// Index lists into `vectors`, in angular order.
    pub stripes: Option<Vec<Vec<usize>>>,
    pub psi2: Option<f64>,
    /// `true` when built on the widened annulus `[r - 1, r]`.
    pub widened: bool,
    /// Number of lattice points in the annulus (first quadrant).
    pub pool_size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexOptions {
    /// Thinning threshold `tau = num / den` in `|u_{i+1} - u_i| > tau r^(1/3)`.
    pub tau_num: u32,
    pub tau_den: u32,
    pub widened: bool,
}

impl Default for ConvexOptions {
    fn default() -> Self {
        ConvexOptions { tau_num: 1, tau_den: 4, widened: false }
    }
}

fn dot(a: Vector, b: Vector) -> i128 {
    a.0 as i128 * b.0 as i128 + a.1 as i128 * b.1 as i128
}

fn cross(a: Vector, b: Vector) -> i128 {
    a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128
}

fn norm2(a: Vector) -> i128 {
    dot(a, a)
}

/// Exact test of `r - r^(-1/3) <= |v| <= r`.
///
/// With `D = r^2 - |v|^2` and `u = r^(2/3)` the lower bound is
/// `2u^2 - D u - 1 >= 0`, i.e. `4u >= D + sqrt(D^2 + 8)`. Cubing
/// (`u^3 = r^2`) gives `64 r^2 - D^3 - 3DQ >= (3D^2 + Q) sqrt(Q)` with
/// `Q = D^2 + 8`, which is decided by comparing squares.
pub fn in_annulus(v: Vector, r: u32) -> bool {
    let r2 = (r as i128) * (r as i128);
    let d = r2 - norm2(v);
    if d < 0 {
        return false;
    }
    // D > 2u already fails; also keeps the cubes below overflow
    if d * d * d > 8 * r2 {
        return false;
    }
    let q = d * d + 8;
    let l = 64 * r2 - d * d * d - 3 * d * q;
    let m = 3 * d * d + q;
    l >= 0 && l * l >= m * m * q
}

/// `r - 1 <= |v| <= r`.
pub fn in_wide_annulus(v: Vector, r: u32) -> bool {
    let n = norm2(v);
    let r = r as i128;
    n <= r * r && n >= (r - 1) * (r - 1)
}

fn annulus_test(widened: bool) -> fn(Vector, u32) -> bool {
    if widened {
        in_wide_annulus
    } else {
        in_annulus
    }
}

/// First-quadrant lattice points (axes included) of the annulus.
pub fn annulus_candidates(r: u32, widened: bool) -> Vec<Vector> {
    let test = annulus_test(widened);
    let r = r as i64;
    let mut out = Vec::new();
    for x in 0..=r {
        for y in 0..=r {
            if (x, y) != (0, 0) && test((x, y), r as u32) {
                out.push((x, y));
            }
        }
    }
    sort_by_angle(&mut out);
    out
}

/// Sorts vectors of the closed upper half plane by angle from the positive
/// x-axis, shorter first on ties.
pub fn sort_by_angle(vs: &mut [Vector]) {
    vs.sort_by(|&a, &b| {
        let c = cross(a, b);
        if c > 0 {
            std::cmp::Ordering::Less
        } else if c < 0 {
            std::cmp::Ordering::Greater
        } else {
            norm2(a).cmp(&norm2(b))
        }
    });
}

/// Strict convex hull (collinear points dropped), counter-clockwise,
/// starting from the lowest-then-leftmost point.
pub fn convex_hull(points: &[Vector]) -> Vec<Vector> {
    let mut pts: Vec<Vector> = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let turn = |o: Vector, a: Vector, b: Vector| cross((a.0 - o.0, a.1 - o.1), (b.0 - o.0, b.1 - o.1));
    let mut lower: Vec<Vector> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vector> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// `true` if `p` lies in the closed convex hull of `points`.
pub fn hull_contains(points: &[Vector], p: Vector) -> bool {
    let hull = convex_hull(points);
    match hull.len() {
        0 => false,
        1 => hull[0] == p,
        2 => on_segment(hull[0], hull[1], p),
        _ => {
            let k = hull.len();
            (0..k).all(|i| {
                let (a, b) = (hull[i], hull[(i + 1) % k]);
                cross((b.0 - a.0, b.1 - a.1), (p.0 - a.0, p.1 - a.1)) >= 0
            })
        }
    }
}

fn on_segment(a: Vector, b: Vector, p: Vector) -> bool {
    cross((b.0 - a.0, b.1 - a.1), (p.0 - a.0, p.1 - a.1)) == 0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
}

/// `|u| > (num/den) r^(1/3)`, i.e. `(den^2 |u|^2)^3 > num^6 r^2`.
fn longer_than_tau(u: Vector, r: u32, num: u32, den: u32) -> bool {
    let lhs = (den as i128).pow(2) * norm2(u);
    lhs.pow(3) > (num as i128).pow(6) * (r as i128).pow(2)
}

pub fn build_convex_set(r: u32) -> Result<ConvexVectorSet> {
    build_convex_set_with(r, ConvexOptions::default())
}

pub fn build_convex_set_with(r: u32, opts: ConvexOptions) -> Result<ConvexVectorSet> {
    if r < 8 {
        return Err(Error::InvalidParams(format!("convex sets need r >= 8, got {r}")));
    }
    if opts.tau_den == 0 {
        return Err(Error::InvalidParams("tau denominator must be positive".into()));
    }
    let pool = annulus_candidates(r, opts.widened);
    if pool.is_empty() {
        return Err(Error::TooSparse(r as u64));
    }

    // hull vertices of the pool together with the origin
    let mut with_origin = pool.clone();
    with_origin.push((0, 0));
    let mut arc: Vec<Vector> = convex_hull(&with_origin).into_iter().filter(|&v| v != (0, 0)).collect();
    sort_by_angle(&mut arc);

    // successive survivors must be more than tau r^(1/3) apart
    let mut thinned: Vec<Vector> = Vec::new();
    for &v in &arc {
        match thinned.last() {
            Some(&u) if !longer_than_tau((v.0 - u.0, v.1 - u.1), r, opts.tau_num, opts.tau_den) => {}
            _ => thinned.push(v),
        }
    }

    // no vector may project onto another beyond that one's length
    let mut by_norm = thinned.clone();
    by_norm.sort_by_key(|&v| norm2(v));
    let mut kept: Vec<Vector> = Vec::new();
    for u in by_norm {
        if kept.iter().all(|&v| dot(u, v) < norm2(v)) {
            kept.push(u);
        }
    }
    sort_by_angle(&mut kept);
    Ok(ConvexVectorSet {
        r,
        psi_max: psi_max(&kept),
        vectors: kept,
        stripes: None,
        psi2: None,
        widened: opts.widened,
        pool_size: pool.len(),
    })
}

fn psi_max(vs: &[Vector]) -> f64 {
    vs.iter().map(|&(x, y)| (y as f64).atan2(x as f64)).fold(0.0, f64::max)
}

/// Witness of a failed strong convexity test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvexityWitness {
    pub vector: Vector,
}

/// `W` is strongly convex iff each `v0` lies strictly outside the convex
/// hull of `{+-u : u in W} ∪ {0}` with `v0` itself removed. That hull is
/// the set of combinations `sum lambda_u u` with `sum |lambda_u| <= 1`,
/// so membership is exactly a nontrivial representation of `v0`.
pub fn check_strong_convexity(w: &[Vector]) -> std::result::Result<(), ConvexityWitness> {
    for (i, &v0) in w.iter().enumerate() {
        let mut pts: Vec<Vector> = vec![(0, 0)];
        for (j, &u) in w.iter().enumerate() {
            if j != i {
                pts.push(u);
            }
            pts.push((-u.0, -u.1));
        }
        pts.retain(|&p| p != v0);
        if hull_contains(&pts, v0) {
            return Err(ConvexityWitness { vector: v0 });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorMeasure {
    pub psi: f64,
    pub start: f64,
    pub count: usize,
    /// `count / (psi r^(2/3))`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CisReport {
    pub size: usize,
    /// `|W| / r^(2/3)`.
    pub size_ratio: f64,
    pub property1_violations: Vec<Vector>,
    pub property3_violations: Vec<(Vector, Vector)>,
    /// Densest sector per tested width.
    pub property2: Vec<SectorMeasure>,
    pub strongly_convex: bool,
}

impl CisReport {
    pub fn exact_properties_hold(&self) -> bool {
        self.property1_violations.is_empty() && self.property3_violations.is_empty()
    }
}

/// Property 1 (norms in the annulus) and property 3 (`u . v < v . v` for
/// distinct `u, v`) exactly; property 2 as the densest sector over
/// `sector_samples` start angles per width.
pub fn check_cis_properties(w: &ConvexVectorSet, sector_samples: usize) -> CisReport {
    let test = annulus_test(w.widened);
    let property1_violations = w.vectors.iter().copied().filter(|&v| !test(v, w.r)).collect();
    let mut property3_violations = Vec::new();
    for &u in &w.vectors {
        for &v in &w.vectors {
            if u != v && dot(u, v) >= norm2(v) {
                property3_violations.push((u, v));
            }
        }
    }
    let scale = (w.r as f64).powf(2.0 / 3.0);
    let angles: Vec<f64> = w.vectors.iter().map(|&(x, y)| (y as f64).atan2(x as f64)).collect();
    let lo = angles.iter().copied().fold(f64::INFINITY, f64::min).min(0.0);
    let hi = angles.iter().copied().fold(0.0, f64::max).max(std::f64::consts::FRAC_PI_2);
    let mut property2 = Vec::new();
    for psi in [0.01, 0.05, 0.1, 0.25] {
        let mut best = SectorMeasure { psi, start: lo, count: 0, ratio: 0.0 };
        let steps = sector_samples.max(1);
        for k in 0..steps {
            let start = lo + (hi - lo) * k as f64 / steps as f64;
            let count = angles.iter().filter(|&&a| a >= start && a <= start + psi).count();
            if count > best.count {
                best = SectorMeasure { psi, start, count, ratio: count as f64 / (psi * scale) };
            }
        }
        property2.push(best);
    }
    CisReport {
        size: w.vectors.len(),
        size_ratio: w.vectors.len() as f64 / scale,
        property1_violations,
        property3_violations,
        property2,
        strongly_convex: check_strong_convexity(&w.vectors).is_ok(),
    }
}

/// Angle between `a` and `b` (both in a common half plane) is at least
/// `psi`, for `0 <= psi < pi/2`.
pub fn angle_at_least(a: Vector, b: Vector, psi: f64) -> bool {
    let d = dot(a, b);
    if d <= 0 {
        return true;
    }
    (cross(a, b).unsigned_abs() as f64) >= psi.tan() * d as f64
}

/// Angle between `a` and `b` is at most `psi`.
pub fn angle_at_most(a: Vector, b: Vector, psi: f64) -> bool {
    let d = dot(a, b);
    d > 0 && (cross(a, b).unsigned_abs() as f64) <= psi.tan() * d as f64
}

pub fn reflect_diagonal(w: &ConvexVectorSet) -> ConvexVectorSet {
    let mut out = w.clone();
    out.vectors = w.vectors.iter().map(|&(x, y)| (y, x)).collect();
    out.stripes = None;
    sort_by_angle(&mut out.vectors);
    out.psi_max = psi_max(&out.vectors);
    out
}

pub fn reflect_vertical(w: &ConvexVectorSet) -> ConvexVectorSet {
    let mut out = w.clone();
    out.vectors = w.vectors.iter().map(|&(x, y)| (-x, y)).collect();
    out.stripes = None;
    sort_by_angle(&mut out.vectors);
    out.psi_max = psi_max(&out.vectors);
    out
}

/// Longest run `vs[i..=j]` whose end vectors are at most `psi1` apart.
fn densest_window(vs: &[Vector], psi1: f64) -> (usize, usize) {
    let mut best = (0, 0);
    let mut j = 0;
    for i in 0..vs.len() {
        j = j.max(i);
        while j + 1 < vs.len() && angle_at_most(vs[i], vs[j + 1], psi1) {
            j += 1;
        }
        if j - i > best.1 - best.0 {
            best = (i, j);
        }
    }
    best
}

/// Greedy carving of `c` stripes of size `beta` separated by angle `psi2`.
fn carve(vs: &[Vector], c: usize, beta: usize, psi2: f64) -> Option<Vec<Vec<usize>>> {
    let mut stripes = Vec::new();
    let mut i = 0;
    while stripes.len() < c {
        if let Some(last) = stripes.last().and_then(|s: &Vec<usize>| s.last().copied()) {
            while i < vs.len() && !angle_at_least(vs[last], vs[i], psi2) {
                i += 1;
            }
        }
        if i + beta > vs.len() {
            return None;
        }
        stripes.push((i..i + beta).collect());
        i += beta;
    }
    Some(stripes)
}

/// Striped subset of `W(r_O)`: the densest `psi1`-sector among the
/// vectors below the diagonal (or the mirror image of those above it),
/// cut into `c` stripes of equal size `beta` (as large as possible) with
/// angular gaps of at least `psi2` between consecutive stripes.
pub fn build_striped_set(r_o: u32, c: usize, psi1: f64, psi2: f64) -> Result<ConvexVectorSet> {
    build_striped_set_with(r_o, c, psi1, psi2, ConvexOptions::default())
}

pub fn build_striped_set_with(r_o: u32, c: usize, psi1: f64, psi2: f64, opts: ConvexOptions) -> Result<ConvexVectorSet> {
    let right = std::f64::consts::FRAC_PI_2;
    if c == 0 || !(psi1 > 0.0 && psi1 < right) || !(psi2 >= 0.0 && psi2 < right) {
        return Err(Error::InvalidParams(format!("bad stripe parameters c={c} psi1={psi1} psi2={psi2}")));
    }
    let base = build_convex_set_with(r_o, opts)?;
    let mut below: Vec<Vector> = base.vectors.iter().copied().filter(|&(x, y)| y <= x).collect();
    let mut above: Vec<Vector> = base.vectors.iter().copied().filter(|&(x, y)| y >= x).map(|(x, y)| (y, x)).collect();
    sort_by_angle(&mut below);
    sort_by_angle(&mut above);
    let wa = densest_window(&below, psi1);
    let wb = densest_window(&above, psi1);
    let size = |vs: &[Vector], w: (usize, usize)| if vs.is_empty() { 0 } else { w.1 - w.0 + 1 };
    let window: Vec<Vector> = if size(&above, wb) > size(&below, wa) {
        above[wb.0..=wb.1].to_vec()
    } else if below.is_empty() {
        Vec::new()
    } else {
        below[wa.0..=wa.1].to_vec()
    };
    let mut found = None;
    for beta in (1..=window.len() / c).rev() {
        if let Some(s) = carve(&window, c, beta, psi2) {
            found = Some(s);
            break;
        }
    }
    let stripes = found.ok_or(Error::InfeasibleStripes(format!(
        "sector of {} vectors cannot host {c} stripes with gap {psi2}",
        window.len()
    )))?;
    let mut vectors = Vec::new();
    let mut relabeled = Vec::new();
    for s in &stripes {
        relabeled.push((vectors.len()..vectors.len() + s.len()).collect());
        vectors.extend(s.iter().map(|&i| window[i]));
    }
    Ok(ConvexVectorSet {
        r: r_o,
        psi_max: psi_max(&vectors),
        vectors,
        stripes: Some(relabeled),
        psi2: Some(psi2),
        widened: opts.widened,
        pool_size: base.pool_size,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripeReport {
    pub stripe_sizes: Vec<usize>,
    pub equal_sizes: bool,
    pub stripe_count_ok: bool,
    /// Cross-stripe pairs closer than `psi2`.
    pub gap_violations: Vec<(Vector, Vector)>,
    /// Vectors outside the annulus or (below the diagonal) with first
    /// coordinate outside `[r/2, r]`.
    pub range_violations: Vec<Vector>,
}

impl StripeReport {
    pub fn passed(&self) -> bool {
        self.equal_sizes && self.stripe_count_ok && self.gap_violations.is_empty() && self.range_violations.is_empty()
    }
}

pub fn verify_stripes(w: &ConvexVectorSet, c: usize, psi2: f64) -> StripeReport {
    let stripes = w.stripes.clone().unwrap_or_default();
    let sizes: Vec<usize> = stripes.iter().map(Vec::len).collect();
    let mut gap_violations = Vec::new();
    for a in 0..stripes.len() {
        for b in a + 1..stripes.len() {
            for &i in &stripes[a] {
                for &j in &stripes[b] {
                    if !angle_at_least(w.vectors[i], w.vectors[j], psi2) {
                        gap_violations.push((w.vectors[i], w.vectors[j]));
                    }
                }
            }
        }
    }
    let test = annulus_test(w.widened);
    let r = w.r as i64;
    let range_violations = w
        .vectors
        .iter()
        .copied()
        .filter(|&(x, y)| !test((x, y), w.r) || (y <= x && (2 * x < r || x > r)))
        .collect();
    StripeReport {
        equal_sizes: sizes.windows(2).all(|p| p[0] == p[1]) && sizes.iter().all(|&s| s > 0),
        stripe_count_ok: sizes.len() == c,
        stripe_sizes: sizes,
        gap_violations,
        range_violations,
    }
}
