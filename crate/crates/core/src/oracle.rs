//! Exhaustive ground truth for small instances.
//!
//! Everything here enumerates the `2^(n-1)` partitions with vertex 0 pinned to
//! the `+1` side. Partitions are visited in Gray-code order so each step
//! updates running sums in `O(n)`; the sums are recomputed from scratch every
//! [`RESYNC_PERIOD`] steps to bound floating-point drift, and every reported
//! value is recomputed exactly for the winning partition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::graph::{cut_value_unchecked, Cut, WeightedGraph};
use crate::rng;

pub const DEFAULT_ORACLE_LIMIT: usize = 22;
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-9;
const RESYNC_PERIOD: u64 = 256;

/// Enumeration cap and tie tolerance for the exhaustive routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Largest `n` accepted.
    pub limit: usize,
    /// Two cut values are tied when they differ by at most this fraction of
    /// the larger one.
    pub tie_tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            limit: DEFAULT_ORACLE_LIMIT,
            tie_tolerance: DEFAULT_TIE_TOLERANCE,
        }
    }
}

impl OracleConfig {
    pub fn with_limit(limit: usize) -> Self {
        OracleConfig {
            limit,
            ..Default::default()
        }
    }

    fn check(&self, g: &WeightedGraph) -> Result<()> {
        // masks are u64 and cheeger enumerates all n bits
        let hard = self.limit.min(63);
        if g.n() > hard {
            return Err(Error::SizeLimit {
                n: g.n(),
                limit: hard,
            });
        }
        Ok(())
    }

    fn tie_abs(&self, scale: f64) -> f64 {
        self.tie_tolerance * scale.abs()
    }
}

/// Maximum cut found by enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxCut {
    pub cut: Cut,
    pub value: f64,
    /// No other partition comes within the tie tolerance of `value`.
    pub unique: bool,
}

/// Stability quantities of an instance relative to its maximum cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub max_cut: Cut,
    pub max_value: f64,
    pub unique: bool,
    /// Threshold `γ*`: the instance is `γ`-stable exactly for `γ < γ*`.
    pub gamma_star: ExtReal,
    /// Local stability of the maximum cut; never below `gamma_star`.
    pub gamma_local: ExtReal,
    /// Edge distinctness threshold `α*` in `[0, 1]`.
    pub alpha_star: f64,
    /// Largest `k` for which the maximum cut is `k`-distinct.
    pub k_star: ExtReal,
    /// The alternative partition attaining `gamma_star`; absent when `γ* = ∞`.
    pub worst_cut: Option<Cut>,
}

/// Visit Gray-code masks over `bits` bits. `step(mask, flipped)` gets the
/// vertex (bit index + 1) that changed, or `None` for the initial all-zero mask.
fn for_each_gray(bits: usize, mut step: impl FnMut(u64, Option<usize>)) {
    step(0, None);
    let total = 1u64 << bits;
    for k in 1..total {
        let bit = k.trailing_zeros() as usize;
        step(k ^ (k >> 1), Some(bit + 1));
    }
}

/// Every canonical partition's cut value indexed by mask.
fn all_cut_values(g: &WeightedGraph) -> Vec<f64> {
    let n = g.n();
    let bits = n.saturating_sub(1);
    let mut values = vec![0.0; 1usize << bits];
    let mut signs = vec![1.0f64; n];
    let mut value = 0.0;
    let mut steps = 0u64;
    for_each_gray(bits, |mask, flipped| {
        if let Some(v) = flipped {
            steps += 1;
            if steps % RESYNC_PERIOD == 0 {
                signs[v] = -signs[v];
                value = exact_value(g, &signs);
            } else {
                let row = g.row(v);
                let sv = signs[v];
                // edges to same-side vertices enter the cut, the rest leave it
                let delta: f64 = row.iter().zip(&signs).map(|(w, s)| w * s * sv).sum();
                value += delta;
                signs[v] = -sv;
            }
        }
        values[mask as usize] = value;
    });
    values
}

fn exact_value(g: &WeightedGraph, signs: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..g.n() {
        let row = g.row(i);
        for j in (i + 1)..g.n() {
            if signs[i] != signs[j] {
                total += row[j];
            }
        }
    }
    total
}

/// Enumerates all partitions; ties resolve to the lowest canonical mask.
pub fn brute_force_max_cut(g: &WeightedGraph, cfg: &OracleConfig) -> Result<MaxCut> {
    cfg.check(g)?;
    let n = g.n();
    if n == 0 {
        return Ok(MaxCut {
            cut: Cut::new(vec![])?,
            value: 0.0,
            unique: true,
        });
    }
    let values = all_cut_values(g);
    let (best_mask, _) = argmax_with_ties(&values, cfg);
    let cut = Cut::from_mask(n, best_mask);
    let value = cut_value_unchecked(g, &cut);
    let thr = value - cfg.tie_abs(value);
    let unique = values
        .iter()
        .enumerate()
        .all(|(m, &v)| m as u64 == best_mask || v < thr);
    Ok(MaxCut { cut, value, unique })
}

fn argmax_with_ties(values: &[f64], cfg: &OracleConfig) -> (u64, f64) {
    let vmax = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let thr = vmax - cfg.tie_abs(vmax);
    let mask = values.iter().position(|&v| v >= thr).unwrap_or(0);
    (mask as u64, vmax)
}

/// Running sums of the two edge classes crossing a flip set `U`, relative to
/// a fixed reference cut.
struct RelativeSums<'a> {
    g: &'a WeightedGraph,
    reference: Vec<f64>,
    flip: Vec<f64>,
    across: f64,
    inside: f64,
}

impl<'a> RelativeSums<'a> {
    fn new(g: &'a WeightedGraph, reference: &Cut) -> Self {
        let n = g.n();
        RelativeSums {
            g,
            reference: (0..n).map(|i| reference.sign(i)).collect(),
            flip: vec![1.0; n],
            across: 0.0,
            inside: 0.0,
        }
    }

    fn toggle(&mut self, v: usize, exact: bool) {
        if exact {
            self.flip[v] = -self.flip[v];
            self.recompute();
            return;
        }
        let row = self.g.row(v);
        let (sv, xv) = (self.reference[v], self.flip[v]);
        let (mut d_across, mut d_inside) = (0.0, 0.0);
        for j in 0..row.len() {
            let w = row[j];
            if w == 0.0 {
                continue;
            }
            // x_v x_j = +1 means the edge does not yet cross U
            let t = w * xv * self.flip[j];
            if self.reference[j] != sv {
                d_across += t;
            } else {
                d_inside += t;
            }
        }
        self.across += d_across;
        self.inside += d_inside;
        self.flip[v] = -xv;
    }

    fn recompute(&mut self) {
        let (a, i) = relative_weights(self.g, &self.reference, &self.flip);
        self.across = a;
        self.inside = i;
    }
}

/// `(W_S, W_T)`: weight of reference-cut edges that `T` drops and of
/// reference-uncut edges that `T` adds, where `T` flips the vertices with
/// `flip = -1`.
fn relative_weights(g: &WeightedGraph, reference: &[f64], flip: &[f64]) -> (f64, f64) {
    let (mut across, mut inside) = (0.0, 0.0);
    for (i, j, w) in g.edges() {
        if flip[i] != flip[j] {
            if reference[i] != reference[j] {
                across += w;
            } else {
                inside += w;
            }
        }
    }
    (across, inside)
}

fn flip_vector(n: usize, mask: u64) -> Vec<f64> {
    (0..n)
        .map(|i| if i > 0 && (mask >> (i - 1)) & 1 == 1 { -1.0 } else { 1.0 })
        .collect()
}

fn apply_flip(reference: &Cut, mask: u64) -> Cut {
    let n = reference.len();
    let signs = (0..n)
        .map(|i| {
            let s = reference.signs()[i];
            if i > 0 && (mask >> (i - 1)) & 1 == 1 {
                -s
            } else {
                s
            }
        })
        .collect();
    Cut::new(signs).expect("signs stay ±1").canonical()
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    mask: u64,
}

impl Best {
    fn new() -> Self {
        Best {
            value: f64::INFINITY,
            mask: 0,
        }
    }

    /// Keep the smaller value; near-equal values keep the lower mask.
    fn offer(&mut self, value: f64, mask: u64) {
        if !self.value.is_finite() {
            if value < self.value {
                *self = Best { value, mask };
            }
            return;
        }
        let slack = 1e-12 * value.abs().max(self.value.abs());
        if value < self.value - slack || ((value - self.value).abs() <= slack && mask < self.mask) {
            self.value = value;
            self.mask = mask;
        }
    }

    fn found(&self) -> bool {
        self.value.is_finite()
    }
}

/// Full stability analysis: maximum cut, `γ*`, local stability, `α*`, `k*`.
///
/// For every alternative partition `T` (encoded as the set `U` of vertices
/// whose side differs from the maximum cut `S`):
///
/// * `γ(T) = w(E(S,S̄) ∖ E(T,T̄)) / w(E(T,T̄) ∖ E(S,S̄))`, with `x/0 = ∞` and
///   `0/0` excluded;
/// * `α(T) = (w(S) − w(T)) / w(E(S,S̄) Δ E(T,T̄))`, `0/0` excluded;
/// * `k(T) = (w(S) − w(T)) / min(|U|, n − |U|)`.
///
/// A non-unique maximum reports `γ* = 1`, `α* = 0`, `k* = 0` and a tied
/// partition as the worst cut.
pub fn stability_gamma(g: &WeightedGraph, cfg: &OracleConfig) -> Result<StabilityReport> {
    let mc = brute_force_max_cut(g, cfg)?;
    let n = g.n();
    let gamma_local = local_stability_gamma(g, &mc.cut)?;

    if !mc.unique {
        let values = all_cut_values(g);
        let thr = mc.value - cfg.tie_abs(mc.value);
        let best = mc.cut.to_mask();
        let other = values
            .iter()
            .enumerate()
            .position(|(m, &v)| m as u64 != best && v >= thr)
            .map(|m| Cut::from_mask(n, m as u64));
        return Ok(StabilityReport {
            max_cut: mc.cut,
            max_value: mc.value,
            unique: false,
            gamma_star: ExtReal(1.0),
            gamma_local,
            alpha_star: 0.0,
            k_star: ExtReal(0.0),
            worst_cut: other,
        });
    }

    // any nonempty edge set weighs at least the lightest edge
    let min_w = g.edges().map(|(_, _, w)| w).fold(f64::INFINITY, f64::min);
    let zero = if min_w.is_finite() { 0.5 * min_w } else { 0.0 };

    let mut gamma = Best::new();
    let mut alpha = Best::new();
    let mut kdist = Best::new();
    let mut sums = RelativeSums::new(g, &mc.cut);
    let mut steps = 0u64;
    for_each_gray(n.saturating_sub(1), |mask, flipped| {
        let Some(v) = flipped else { return };
        steps += 1;
        sums.toggle(v, steps % RESYNC_PERIOD == 0);
        let (ws, wt) = (sums.across, sums.inside);
        let ws_zero = ws < zero;
        let wt_zero = wt < zero;
        if !wt_zero {
            gamma.offer(if ws_zero { 0.0 } else { ws / wt }, mask);
        }
        if !(ws_zero && wt_zero) {
            alpha.offer((ws - wt) / (ws + wt), mask);
        }
        let size = mask.count_ones() as usize;
        let dist = size.min(n - size) as f64;
        let diff = if ws_zero && wt_zero { 0.0 } else { ws - wt };
        kdist.offer(diff / dist, mask);
    });

    let reference: Vec<f64> = (0..n).map(|i| mc.cut.sign(i)).collect();
    let exact = |mask: u64| relative_weights(g, &reference, &flip_vector(n, mask));

    let (gamma_star, worst_cut) = if gamma.found() {
        let (ws, wt) = exact(gamma.mask);
        (ExtReal(ws / wt), Some(apply_flip(&mc.cut, gamma.mask)))
    } else {
        (ExtReal::INFINITY, None)
    };
    let alpha_star = if alpha.found() {
        let (ws, wt) = exact(alpha.mask);
        (ws - wt) / (ws + wt)
    } else {
        1.0
    };
    let k_star = if kdist.found() {
        let (ws, wt) = exact(kdist.mask);
        let size = kdist.mask.count_ones() as usize;
        let diff = if ws < zero && wt < zero { 0.0 } else { ws - wt };
        ExtReal(diff / size.min(n - size) as f64)
    } else {
        ExtReal::INFINITY
    };

    Ok(StabilityReport {
        max_cut: mc.cut,
        max_value: mc.value,
        unique: true,
        gamma_star,
        gamma_local,
        alpha_star,
        k_star,
        worst_cut,
    })
}

/// `α*`; zero when the maximum cut is not unique.
pub fn edge_distinctness_alpha(g: &WeightedGraph, cfg: &OracleConfig) -> Result<f64> {
    Ok(stability_gamma(g, cfg)?.alpha_star)
}

/// `k*`; zero when the maximum cut is not unique.
pub fn k_distinctness(g: &WeightedGraph, cfg: &OracleConfig) -> Result<ExtReal> {
    Ok(stability_gamma(g, cfg)?.k_star)
}

/// Smallest ratio, over vertices, of weight to the opposite side over weight
/// to the own side. A vertex with nothing on its own side contributes `∞`.
pub fn local_stability_gamma(g: &WeightedGraph, c: &Cut) -> Result<ExtReal> {
    if c.len() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            actual: c.len(),
        });
    }
    let mut best = f64::INFINITY;
    for v in 0..g.n() {
        let (mut opp, mut own) = (0.0, 0.0);
        for (u, &w) in g.row(v).iter().enumerate() {
            if c.signs()[u] == c.signs()[v] {
                own += w;
            } else {
                opp += w;
            }
        }
        if own > 0.0 {
            best = best.min(opp / own);
        }
    }
    Ok(ExtReal(best))
}

/// Cheeger constant of the support: `min |E(U,Ū)| / |U|` over nonempty `U`
/// with `|U| ≤ n/2`, every support edge counted once. `∞` when `n < 2`.
pub fn cheeger_constant(g: &WeightedGraph, cfg: &OracleConfig) -> Result<ExtReal> {
    cfg.check(g)?;
    let n = g.n();
    let adj: Vec<u64> = (0..n)
        .map(|i| {
            g.row(i)
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0.0)
                .fold(0u64, |m, (j, _)| m | (1 << j))
        })
        .collect();
    let mut best = f64::INFINITY;
    let half = n / 2;
    for mask in 1u64..(1u64 << n) {
        let size = mask.count_ones() as usize;
        if size > half {
            continue;
        }
        let mut boundary = 0u32;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            boundary += (adj[i] & !mask).count_ones();
        }
        best = best.min(boundary as f64 / size as f64);
    }
    Ok(ExtReal(best))
}

/// Plays the perturbation game at level `gamma`: first the optimal adversary
/// (multiply `E(T,T̄) ∖ E(S,S̄)` by `gamma` for the worst `T`), then `trials`
/// random `gamma`-perturbations. Returns true when any of them makes some
/// other partition strictly heavier than the original maximum cut.
pub fn sample_perturbation_attack(
    g: &WeightedGraph,
    gamma: f64,
    trials: usize,
    seed: u64,
    cfg: &OracleConfig,
) -> Result<bool> {
    let report = stability_gamma(g, cfg)?;
    if !(gamma >= 1.0) {
        return Ok(false);
    }
    let s = &report.max_cut;
    let beats = |w_other: f64, w_s: f64| w_other > w_s + cfg.tie_abs(w_s);

    if let Some(t) = &report.worst_cut {
        let (mut w_s, mut w_t) = (0.0, 0.0);
        for (i, j, w) in g.edges() {
            let in_s = s.signs()[i] != s.signs()[j];
            let in_t = t.signs()[i] != t.signs()[j];
            let boosted = if in_t && !in_s { gamma * w } else { w };
            if in_s {
                w_s += boosted;
            }
            if in_t {
                w_t += boosted;
            }
        }
        if beats(w_t, w_s) {
            return Ok(true);
        }
    }

    let mut rng = rng::stream(seed, rng::AUX_STREAM);
    for _ in 0..trials {
        let mut perturbed = g.clone();
        for (i, j, w) in g.edges() {
            let u = rng::unit_f64(&mut rng);
            // half the draws sit on the extreme points of [1, γ]
            let f = if u < 0.25 {
                1.0
            } else if u < 0.5 {
                gamma
            } else {
                1.0 + (gamma - 1.0) * rng::unit_f64(&mut rng)
            };
            perturbed.set(i, j, w * f);
        }
        let w_s = cut_value_unchecked(&perturbed, s);
        let best = brute_force_max_cut(&perturbed, cfg)?;
        if beats(best.value, w_s) {
            return Ok(true);
        }
    }
    Ok(false)
}
