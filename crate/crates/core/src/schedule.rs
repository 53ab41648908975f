//! Exponent recurrences of the recursive constructions, the radius choice
//! `r = ceil(n^e)`, and the depth-indexed recursion driver.
//!
//! Feeding a construction with a base of distortion exponent `a` yields
//! exponent `1/(6 - 4a)` for emulators and `1/(3 - 4a/3)` for spanners, so
//! the same map gives both the next schedule value and the radius exponent.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::emulator::{build_emulator, Emulator};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spanner::{build_spanner, SpannerResult};
use crate::sparsify::SparsifierConfig;

pub type Rational = Ratio<i128>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Emulator,
    Spanner,
}

impl Kind {
    pub fn initial(self) -> Rational {
        match self {
            Kind::Emulator => Rational::new(1, 4),
            Kind::Spanner => Rational::new(3, 7),
        }
    }

    /// Exponent of the new construction given a base with exponent `a`.
    pub fn step(self, a: Rational) -> Rational {
        match self {
            Kind::Emulator => (Rational::from_integer(6) - a * 4).recip(),
            Kind::Spanner => (Rational::from_integer(3) - a * Rational::new(4, 3)).recip(),
        }
    }

    /// Positive root of `4a^2 - 6a + 1` resp. `4a^2 - 9a + 3` below 1/2.
    pub fn fixed_point(self) -> f64 {
        match self {
            Kind::Emulator => (3.0 - 5f64.sqrt()) / 4.0,
            Kind::Spanner => (9.0 - 33f64.sqrt()) / 8.0,
        }
    }

    pub fn default_stop_multiplier(self) -> u32 {
        match self {
            Kind::Emulator => 16,
            Kind::Spanner => 32,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Emulator => "emulator",
            Kind::Spanner => "spanner",
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        match s {
            "emulator" => Ok(Kind::Emulator),
            "spanner" => Ok(Kind::Spanner),
            other => Err(Error::InvalidParams(format!("unknown kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentSchedule {
    pub kind: Kind,
    /// `a_0 ..= a_k`, exact.
    pub values: Vec<Rational>,
    pub fixed_point: f64,
}

impl ExponentSchedule {
    pub fn decimals(&self) -> Vec<f64> {
        self.values.iter().map(ratio_to_f64).collect()
    }

    pub fn last(&self) -> Rational {
        *self.values.last().expect("schedule holds a_0")
    }
}

pub fn ratio_to_f64(a: &Rational) -> f64 {
    *a.numer() as f64 / *a.denom() as f64
}

pub fn exponent_schedule(kind: Kind, iterations: usize) -> ExponentSchedule {
    let mut values = vec![kind.initial()];
    for _ in 0..iterations {
        let next = kind.step(*values.last().unwrap());
        values.push(next);
    }
    ExponentSchedule { kind, values, fixed_point: kind.fixed_point() }
}

/// Parses `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidParams(format!("not a fraction: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse::<i128>().map_err(|_| bad())?, q.trim().parse::<i128>().map_err(|_| bad())?),
        None => (s.trim().parse::<i128>().map_err(|_| bad())?, 1),
    };
    if q == 0 {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

fn check_alpha(alpha: Rational) -> Result<()> {
    if alpha <= Rational::zero() || alpha >= Rational::one() {
        return Err(Error::InvalidAlpha(format!("{alpha} not in (0, 1)")));
    }
    Ok(())
}

/// `ceil(n^e)` where `e` is the radius exponent for `kind` and `alpha`.
pub fn radius_for(kind: Kind, n: usize, alpha: Rational) -> Result<u32> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("radius needs n >= 2, got {n}")));
    }
    check_alpha(alpha)?;
    let e = kind.step(alpha);
    let r = ceil_rational_power(n as u64, *e.numer() as u64, *e.denom() as u64);
    u32::try_from(r).map_err(|_| Error::InvalidParams(format!("radius {r} overflows")))
}

/// Smallest `R >= 1` with `R^q >= n^p`. Exact for moderate exponents.
pub fn ceil_rational_power(n: u64, p: u64, q: u64) -> u64 {
    let approx = (n as f64).powf(p as f64 / q as f64);
    if p > 512 || q > 512 {
        return (approx - 1e-9).ceil().max(1.0) as u64;
    }
    let target = BigUint::from(n).pow(p as u32);
    let reaches = |r: u64| BigUint::from(r).pow(q as u32) >= target;
    let mut r = (approx.ceil() as u64).max(1);
    while r > 1 && reaches(r - 1) {
        r -= 1;
    }
    while !reaches(r) {
        r += 1;
    }
    r
}

/// Output of one recursion driver call.
#[derive(Clone, Debug)]
pub enum Recursed {
    Emulator(Emulator),
    Spanner(SpannerResult),
}

impl Recursed {
    pub fn graph(&self) -> &Graph {
        match self {
            Recursed::Emulator(e) => &e.graph,
            Recursed::Spanner(s) => &s.subgraph,
        }
    }
}

/// Depth 0 applies the base procedure; depth `d > 0` runs one level with
/// `alpha = a_{d-1}` whose large clusters recurse at depth `d - 1`.
pub fn run_recursive(g: &Graph, kind: Kind, depth: u32, cfg: &SparsifierConfig) -> Result<Recursed> {
    let mut cfg = cfg.clone();
    cfg.depth = depth;
    Ok(match kind {
        Kind::Emulator => Recursed::Emulator(build_emulator(g, &cfg)?),
        Kind::Spanner => Recursed::Spanner(build_spanner(g, &cfg)?),
    })
}

/// Schedule value fed to a level at recursion depth `depth >= 1`.
pub fn alpha_for_depth(kind: Kind, depth: u32) -> Rational {
    exponent_schedule(kind, depth.saturating_sub(1) as usize).last()
}

pub(crate) fn rational_string(a: &Rational) -> String {
    format!("{}/{}", a.numer(), a.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emulator_values() {
        let s = exponent_schedule(Kind::Emulator, 3);
        let want = [(1, 4), (1, 5), (5, 26), (13, 68)];
        let got: Vec<(i128, i128)> = s.values.iter().map(|a| (*a.numer(), *a.denom())).collect();
        // 13/68 is already reduced
        assert_eq!(got, want.to_vec());
    }

    #[test]
    fn spanner_values() {
        let s = exponent_schedule(Kind::Spanner, 1);
        assert_eq!(s.values, vec![Rational::new(3, 7), Rational::new(7, 17)]);
    }

    #[test]
    fn fixed_points() {
        for kind in [Kind::Emulator, Kind::Spanner] {
            let s = exponent_schedule(kind, 20);
            // every a_i lies above the fixed point (the defining quadratic is
            // negative between its roots), so strictly decreasing values
            // mean strictly shrinking gaps; checked in exact arithmetic
            let (b, c) = match kind {
                Kind::Emulator => (6, 1),
                Kind::Spanner => (9, 3),
            };
            for a in &s.values {
                let q = *a * *a * 4 - *a * b + Rational::from_integer(c);
                assert!(q < Rational::zero(), "{a} is not above the fixed point");
            }
            assert!(s.values.windows(2).all(|w| w[1] < w[0]));
            assert!((s.decimals()[20] - s.fixed_point).abs() < 1e-9);
        }
        let a = Kind::Emulator.fixed_point();
        assert!((4.0 * a * a - 6.0 * a + 1.0).abs() < 1e-12);
        assert_eq!(format!("{a:.3}"), "0.191");
        let b = Kind::Spanner.fixed_point();
        assert!((4.0 * b * b - 9.0 * b + 3.0).abs() < 1e-12);
        assert_eq!(format!("{b:.3}"), "0.407");
    }

    #[test]
    fn radii() {
        assert_eq!(radius_for(Kind::Emulator, 1 << 20, Rational::new(1, 4)).unwrap(), 16);
        assert_eq!(radius_for(Kind::Spanner, 1 << 17, Rational::new(3, 7)).unwrap(), 128);
        // 400^(1/5) = 3.31..
        assert_eq!(radius_for(Kind::Emulator, 400, Rational::new(1, 4)).unwrap(), 4);
        assert!(radius_for(Kind::Emulator, 1, Rational::new(1, 4)).is_err());
        assert!(matches!(radius_for(Kind::Spanner, 100, Rational::new(1, 1)), Err(Error::InvalidAlpha(_))));
        assert!(matches!(radius_for(Kind::Spanner, 100, Rational::zero()), Err(Error::InvalidAlpha(_))));
    }

    #[test]
    fn exact_power_boundaries() {
        assert_eq!(ceil_rational_power(1000, 1, 3), 10);
        assert_eq!(ceil_rational_power(1001, 1, 3), 11);
        assert_eq!(ceil_rational_power(2, 0, 1), 1);
        assert_eq!(ceil_rational_power(81, 3, 4), 27);
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("5/26").unwrap(), Rational::new(5, 26));
        assert_eq!(parse_rational("2").unwrap(), Rational::from_integer(2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(alpha_for_depth(Kind::Emulator, 1), Rational::new(1, 4));
        assert_eq!(alpha_for_depth(Kind::Emulator, 2), Rational::new(1, 5));
    }
}
