//! Seeded instance generators.
//!
//! All draws go through [`crate::rng`]: edge `(i, j)` reads its own stream, the
//! planted side reads [`rng::PARTITION_STREAM`], so every output is a pure
//! function of its parameters and seed.

use std::fmt;
use std::str::FromStr;

use rand_chacha::rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::dual::{jitter, JITTER_EPS};
use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::graph::{Cut, WeightedGraph};
use crate::oracle::{self, OracleConfig};
use crate::rng;

/// Bounded, strictly positive edge-weight distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WeightDistribution {
    Constant(f64),
    Uniform(f64, f64),
    /// `high` with probability `p`, otherwise `low`.
    TwoPoint { p: f64, low: f64, high: f64 },
}

impl WeightDistribution {
    fn validate(self) -> Result<Self> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        let ok = match self {
            WeightDistribution::Constant(c) => pos(c),
            WeightDistribution::Uniform(a, b) => pos(a) && pos(b) && a <= b,
            WeightDistribution::TwoPoint { p, low, high } => {
                (0.0..=1.0).contains(&p) && pos(low) && pos(high) && low <= high
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidArgument(format!("invalid weight distribution {self}")))
        }
    }

    pub fn constant(c: f64) -> Result<Self> {
        WeightDistribution::Constant(c).validate()
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        WeightDistribution::Uniform(a, b).validate()
    }

    pub fn two_point(p: f64, low: f64, high: f64) -> Result<Self> {
        WeightDistribution::TwoPoint { p, low, high }.validate()
    }

    pub fn mean(&self) -> f64 {
        match *self {
            WeightDistribution::Constant(c) => c,
            WeightDistribution::Uniform(a, b) => 0.5 * (a + b),
            WeightDistribution::TwoPoint { p, low, high } => p * high + (1.0 - p) * low,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            WeightDistribution::Constant(_) => 0.0,
            WeightDistribution::Uniform(a, b) => (b - a) * (b - a) / 12.0,
            WeightDistribution::TwoPoint { p, low, high } => p * (1.0 - p) * (high - low) * (high - low),
        }
    }

    /// One draw; consumes exactly one `u64` unless constant.
    pub fn sample(&self, r: &mut impl RngCore) -> f64 {
        match *self {
            WeightDistribution::Constant(c) => c,
            WeightDistribution::Uniform(a, b) => a + (b - a) * rng::unit_f64(r),
            WeightDistribution::TwoPoint { p, low, high } => {
                if rng::unit_f64(r) < p {
                    high
                } else {
                    low
                }
            }
        }
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightDistribution::Constant(c) => write!(f, "constant:{c}"),
            WeightDistribution::Uniform(a, b) => write!(f, "uniform:{a}:{b}"),
            WeightDistribution::TwoPoint { p, low, high } => write!(f, "two_point:{p}:{low}:{high}"),
        }
    }
}

impl FromStr for WeightDistribution {
    type Err = Error;

    /// `constant:c`, `uniform:a:b` or `two_point:p:low:high`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let nums: Vec<f64> = parts
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("bad number {t:?} in distribution {s:?}")))
            })
            .collect::<Result<_>>()?;
        match (kind, nums.as_slice()) {
            ("constant", &[c]) => Self::constant(c),
            ("uniform", &[a, b]) => Self::uniform(a, b),
            ("two_point", &[p, lo, hi]) => Self::two_point(p, lo, hi),
            _ => Err(Error::InvalidArgument(format!(
                "unknown distribution {s:?}; expected constant:c, uniform:a:b or two_point:p:low:high"
            ))),
        }
    }
}

impl TryFrom<String> for WeightDistribution {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WeightDistribution> for String {
    fn from(d: WeightDistribution) -> String {
        d.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub graph: WeightedGraph,
    pub planted: Cut,
    pub gamma: f64,
    pub dist: WeightDistribution,
    pub seed: u64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("gamma must be finite and at least 1, got {gamma}")))
    }
}

/// Uniform `n/2`-subset by a partial Fisher–Yates shuffle on the partition stream.
fn planted_half(n: usize, seed: u64) -> Cut {
    let mut r = rng::stream(seed, rng::PARTITION_STREAM);
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n / 2 {
        let pick = k + rng::below(&mut r, (n - k) as u64) as usize;
        perm.swap(k, pick);
    }
    Cut::from_side(n, &perm[..n / 2]).expect("indices in range").canonical()
}

/// Planted model: complete graph with i.i.d. weights from `dist`, a uniformly
/// random half `S`, and every edge across `S` multiplied by `gamma`.
pub fn gen_planted(n: usize, dist: WeightDistribution, gamma: f64, seed: u64) -> Result<PlantedInstance> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Validation(format!("planted model needs an even n ≥ 2, got {n}")));
    }
    check_gamma(gamma)?;
    let dist = dist.validate()?;
    let planted = planted_half(n, seed);
    let mut g = WeightedGraph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut r = rng::stream(seed, rng::edge_stream(n, i, j));
            let w = dist.sample(&mut r);
            let f = if planted.signs()[i] != planted.signs()[j] { gamma } else { 1.0 };
            g.set(i, j, w * f);
        }
    }
    Ok(PlantedInstance {
        graph: g,
        planted,
        gamma,
        dist,
        seed,
    })
}

/// `G(n, p)` with unit weights.
pub fn gen_gnp_simple(n: usize, p: f64, seed: u64) -> Result<WeightedGraph> {
    gen_random_weighted(n, p, WeightDistribution::Constant(1.0), seed)
}

/// Each pair is an edge with probability `p`, weighted by a draw from `dist`.
pub fn gen_random_weighted(n: usize, p: f64, dist: WeightDistribution, seed: u64) -> Result<WeightedGraph> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("edge probability must lie in (0, 1), got {p}")));
    }
    let dist = dist.validate()?;
    let mut g = WeightedGraph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut r = rng::stream(seed, rng::edge_stream(n, i, j));
            if rng::unit_f64(&mut r) < p {
                g.set(i, j, dist.sample(&mut r));
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stabilized {
    pub graph: WeightedGraph,
    pub max_cut: Cut,
    pub gamma_before: ExtReal,
    pub gamma_after: ExtReal,
    /// Multiplier applied to the maximum-cut edges.
    pub factor: f64,
    /// Weights were jittered first to break a tie between maximum cuts.
    pub jittered: bool,
}

/// Multiply the maximum-cut edges by `target / γ*`, which makes the stability
/// exactly `target` (up to rounding). Infinite `γ*` is left unchanged.
pub fn stabilize_by_scaling(g: &WeightedGraph, target: f64, cfg: &OracleConfig) -> Result<Stabilized> {
    check_gamma(target)?;
    let before = oracle::stability_gamma(g, cfg)?;
    if !before.unique {
        return Err(Error::NonUniqueMaxCut);
    }
    let max_cut = before.max_cut.clone();
    if before.gamma_star.is_infinite() {
        return Ok(Stabilized {
            graph: g.clone(),
            max_cut,
            gamma_before: before.gamma_star,
            gamma_after: before.gamma_star,
            factor: 1.0,
            jittered: false,
        });
    }
    let factor = target / before.gamma_star.value();
    let mut out = g.clone();
    for (i, j, w) in g.edges() {
        if max_cut.signs()[i] != max_cut.signs()[j] {
            out.set(i, j, w * factor);
        }
    }
    let after = oracle::stability_gamma(&out, cfg)?;
    if !after.unique || !after.max_cut.same_partition(&max_cut) || after.gamma_star.value() < target * (1.0 - 1e-9) {
        return Err(Error::Validation(format!(
            "scaling reached stability {} instead of {target}",
            after.gamma_star
        )));
    }
    Ok(Stabilized {
        graph: out,
        max_cut,
        gamma_before: before.gamma_star,
        gamma_after: after.gamma_star,
        factor,
        jittered: false,
    })
}

/// [`stabilize_by_scaling`], jittering the weights by a relative `1e-6` first
/// when the maximum cut is tied.
pub fn stabilize_with_jitter(g: &WeightedGraph, target: f64, seed: u64, cfg: &OracleConfig) -> Result<Stabilized> {
    match stabilize_by_scaling(g, target, cfg) {
        Err(Error::NonUniqueMaxCut) => {
            let mut s = stabilize_by_scaling(&jitter(g, JITTER_EPS, seed), target, cfg)?;
            s.jittered = true;
            Ok(s)
        }
        other => other,
    }
}

/// Two copies of `g` on vertices `0..n` and `n..2n`, with `i` joined to `n+i`
/// by weight `τ·w(i)`.
pub fn cross_product_amplify(g: &WeightedGraph, tau: f64) -> Result<WeightedGraph> {
    check_gamma(tau)?;
    let n = g.n();
    let wdeg = g.degrees().weighted;
    let mut out = WeightedGraph::empty(2 * n);
    for (i, j, w) in g.edges() {
        out.set(i, j, w);
        out.set(n + i, n + j, w);
    }
    for (i, &d) in wdeg.iter().enumerate() {
        if d > 0.0 {
            out.set(i, n + i, tau * d);
        }
    }
    Ok(out)
}

/// Cut of the amplified graph that uses `c` on the first copy and `−c` on the second.
pub fn amplified_cut(c: &Cut) -> Cut {
    let mut signs = c.signs().to_vec();
    signs.extend(c.signs().iter().map(|s| -s));
    Cut::new(signs).expect("signs are ±1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cut_value;

    #[test]
    fn distribution_round_trip_and_moments() {
        for s in ["constant:1", "uniform:0.5:1.5", "two_point:0.25:1:3"] {
            let d: WeightDistribution = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        let u = WeightDistribution::uniform(0.5, 1.5).unwrap();
        assert_eq!(u.mean(), 1.0);
        assert!((u.variance() - 1.0 / 12.0).abs() < 1e-15);
        let t = WeightDistribution::two_point(0.25, 1.0, 3.0).unwrap();
        assert_eq!(t.mean(), 1.5);
        assert_eq!(t.variance(), 0.75);
        for bad in ["", "constant", "constant:0", "uniform:2:1", "two_point:1.5:1:2", "gauss:0:1", "uniform:0.5"] {
            assert!(bad.parse::<WeightDistribution>().is_err(), "{bad}");
        }
    }

    #[test]
    fn planted_examples() {
        let p = gen_planted(2, WeightDistribution::Constant(1.0), 3.0, 0).unwrap();
        assert_eq!(p.graph.weight(0, 1), 3.0);
        assert_eq!(p.planted.signs(), &[1, -1]);

        let cfg = OracleConfig::default();
        for seed in 0..5 {
            let p = gen_planted(4, WeightDistribution::Constant(1.0), 2.0, seed).unwrap();
            assert_eq!(cut_value(&p.graph, &p.planted).unwrap(), 8.0);
            let m = oracle::brute_force_max_cut(&p.graph, &cfg).unwrap();
            assert!(m.unique && m.cut.same_partition(&p.planted));
        }

        let p = gen_planted(12, WeightDistribution::uniform(0.5, 1.5).unwrap(), 4.0, 7).unwrap();
        let m = oracle::brute_force_max_cut(&p.graph, &cfg).unwrap();
        assert!(m.unique && m.cut.same_partition(&p.planted));
        assert_eq!(p.planted.signs().iter().filter(|&&s| s == 1).count(), 6);

        assert!(matches!(gen_planted(5, WeightDistribution::Constant(1.0), 2.0, 0), Err(Error::Validation(_))));
    }

    #[test]
    fn planted_weights_follow_the_model() {
        let dist = WeightDistribution::uniform(0.5, 1.5).unwrap();
        let p = gen_planted(10, dist, 3.0, 11).unwrap();
        for (i, j, w) in p.graph.edges() {
            let cross = p.planted.signs()[i] != p.planted.signs()[j];
            let base = if cross { w / 3.0 } else { w };
            assert!((0.5..1.5).contains(&base), "({i},{j}) {w}");
        }
        assert_eq!(p.graph.edge_count(), 45);
    }

    #[test]
    fn stabilize_examples() {
        let cfg = OracleConfig::default();
        let tri = WeightedGraph::from_edges(3, &[(0, 1, 2.0), (1, 2, 3.0), (0, 2, 1.0)]).unwrap();
        let s = stabilize_by_scaling(&tri, 4.0, &cfg).unwrap();
        assert_eq!(s.gamma_before, ExtReal(2.0));
        assert_eq!(s.factor, 2.0);
        assert_eq!(s.graph.weight(0, 1), 4.0);
        assert_eq!(s.graph.weight(1, 2), 6.0);
        assert_eq!(s.graph.weight(0, 2), 1.0);
        assert!(s.gamma_after.value() >= 4.0 - 1e-9);

        let again = stabilize_by_scaling(&s.graph, 4.0, &cfg).unwrap();
        assert!((again.factor - 1.0).abs() < 1e-9);

        let c4 = WeightedGraph::from_unit_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let s = stabilize_by_scaling(&c4, 10.0, &cfg).unwrap();
        assert_eq!(s.graph, c4);

        let unit = WeightedGraph::from_unit_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(stabilize_by_scaling(&unit, 3.0, &cfg), Err(Error::NonUniqueMaxCut));
        let s = stabilize_with_jitter(&unit, 3.0, 1, &cfg).unwrap();
        assert!(s.jittered);
        assert!(s.gamma_after.value() >= 3.0 - 1e-6);
    }

    #[test]
    fn amplify_examples() {
        let k2 = WeightedGraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let a = cross_product_amplify(&k2, 1.0).unwrap();
        let expect = WeightedGraph::from_unit_edges(4, &[(0, 1), (2, 3), (0, 2), (1, 3)]).unwrap();
        assert_eq!(a, expect);
        let m = oracle::brute_force_max_cut(&a, &OracleConfig::default()).unwrap();
        assert_eq!(m.value, 4.0);
        let lifted = amplified_cut(&Cut::new(vec![1, -1]).unwrap());
        assert_eq!(cut_value(&a, &lifted).unwrap(), 4.0);
    }

    #[test]
    fn gnp_examples() {
        assert_eq!(gen_gnp_simple(10, 0.5, 3).unwrap(), gen_gnp_simple(10, 0.5, 3).unwrap());
        let complete = (0..20).filter(|&s| gen_gnp_simple(6, 0.999, s).unwrap().edge_count() == 15).count();
        assert!(complete >= 18);
        let total: usize = (0..200).map(|s| gen_gnp_simple(10, 0.3, s).unwrap().edge_count()).sum();
        let mean = total as f64 / 200.0;
        // σ of the mean is √(45·0.3·0.7/200)
        let sd = (45.0 * 0.21 / 200.0f64).sqrt();
        assert!((mean - 13.5).abs() < 3.0 * sd, "{mean}");
        assert!(gen_gnp_simple(4, 1.0, 0).is_err());
    }
}
